//! Assembly statistics: N50/NG50, L50/LG50, and an exact-match genome
//! fraction for error-free runs.
//!
//! N50 is the contig length at which the contigs of that length or longer
//! cover at least half the assembly; NG50 uses the reference size as the
//! target instead. L50/LG50 count the contigs needed to get there. The
//! genome fraction here is deliberately exact-substring based (no
//! alignment): it is meant for desk-scale error-free data where a correct
//! contig IS a substring of the reference, and it stays oracle-checkable.

use alloc::vec;
use alloc::vec::Vec;

use crate::contig::Contig;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssemblyStats {
    /// Contigs surviving the min-length filter; all fields describe them.
    pub contig_count: u64,
    pub longest: u64,
    pub total_length: u64,
    pub n50: u64,
    pub l50: u64,
    /// Present when a genome size was supplied; 0 means the assembly never
    /// reaches half the reference (undefined NG50).
    pub ng50: Option<u64>,
    pub lg50: Option<u64>,
    /// Present when a reference was supplied; percentage of reference
    /// positions covered by at least one exact contig occurrence.
    pub genome_fraction: Option<f64>,
    /// Contigs with no exact occurrence in the reference at all.
    pub misassembled: Option<u64>,
}

/// Sort lengths descending and accumulate until the running sum reaches half
/// of `target`; returns that length and how many contigs it took, or (0, 0)
/// when even the whole assembly falls short of target/2.
pub fn n50_l50(lengths: &[u64], target: u64) -> (u64, u64) {
    let mut sorted: Vec<u64> = lengths.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut sum: u64 = 0;
    for (i, &len) in sorted.iter().enumerate() {
        sum += len;
        // sum >= target/2 without losing the odd half
        if 2 * sum >= target {
            return (len, i as u64 + 1);
        }
    }
    (0, 0)
}

/// Fraction of reference positions covered by at least one exact occurrence
/// of any contig (occurrences may overlap), plus the count of contigs that
/// never occur. Returns percentages in 0..=100.
pub fn genome_fraction<'a, I>(contigs: I, reference: &[u8]) -> (f64, u64)
where
    I: IntoIterator<Item = &'a [u8]>,
{
    if reference.is_empty() {
        return (0.0, 0);
    }
    let hay = core::str::from_utf8(reference).expect("reference is ASCII base text");
    let mut covered = vec![false; reference.len()];
    let mut misassembled = 0u64;
    for contig in contigs {
        if contig.is_empty() {
            continue;
        }
        let Ok(needle) = core::str::from_utf8(contig) else {
            misassembled += 1;
            continue;
        };
        let mut from = 0usize;
        let mut seen = false;
        // str::find is two-way search: linear, not quadratic, per occurrence
        while let Some(at) = hay[from..].find(needle) {
            let start = from + at;
            covered[start..start + needle.len()].fill(true);
            seen = true;
            from = start + 1; // occurrences may overlap
            if from + needle.len() > hay.len() {
                break;
            }
        }
        if !seen {
            misassembled += 1;
        }
    }
    let hits = covered.iter().filter(|&&c| c).count();
    (100.0 * hits as f64 / reference.len() as f64, misassembled)
}

/// Filter contigs shorter than `min_length`, then compute every metric the
/// inputs allow: NG50/LG50 need `genome_size`, the genome fraction needs the
/// reference itself.
pub fn compute_stats(
    contigs: &[Contig],
    min_length: u64,
    genome_size: Option<u64>,
    reference: Option<&[u8]>,
) -> AssemblyStats {
    let kept: Vec<&Contig> = contigs
        .iter()
        .filter(|c| c.len() as u64 >= min_length)
        .collect();
    if kept.is_empty() {
        return AssemblyStats {
            ng50: genome_size.map(|_| 0),
            lg50: genome_size.map(|_| 0),
            genome_fraction: reference.map(|_| 0.0),
            misassembled: reference.map(|_| 0),
            ..AssemblyStats::default()
        };
    }

    let lengths: Vec<u64> = kept.iter().map(|c| c.len() as u64).collect();
    let total: u64 = lengths.iter().sum();
    let longest = *lengths.iter().max().expect("nonempty");
    let (n50, l50) = n50_l50(&lengths, total);
    let (ng50, lg50) = match genome_size {
        Some(g) => {
            let (n, l) = n50_l50(&lengths, g);
            (Some(n), Some(l))
        }
        None => (None, None),
    };
    let (genome_fraction, misassembled) = match reference {
        Some(r) => {
            let (f, m) = genome_fraction(kept.iter().map(|c| c.sequence.as_slice()), r);
            (Some(f), Some(m))
        }
        None => (None, None),
    };

    AssemblyStats {
        contig_count: kept.len() as u64,
        longest,
        total_length: total,
        n50,
        l50,
        ng50,
        lg50,
        genome_fraction,
        misassembled,
    }
}
