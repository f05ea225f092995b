//! Edge-weight normalization.
//!
//! At coverage c, a single-copy k-mer is expected to be observed about
//! `num_reads * (read_length - k + 1) / genome_size` times; dividing every
//! counter by that factor maps expected coverage back to multiplicity ~1.
//! The division is integer round-half-up over the exact rational factor,
//! because the stored weights are 8-bit integers. A counter that lands on 0
//! stays 0 and its edge is treated as absent downstream; successor links are
//! deliberately left in place (edge presence is defined by counter > 0
//! everywhere after this pass).

use core::ops::Range;

use crate::graph::Graph;

#[derive(Clone, Copy, Debug)]
pub struct NormalizationParams {
    pub num_reads: u64,
    pub read_length: u64,
    pub k: u64,
    /// User-supplied genome size estimate; must be positive.
    pub genome_size: u64,
}

/// The k-mer duplication factor as an exact rational, clamped to at least 1
/// so that normalization never inflates weights.
#[derive(Clone, Copy, Debug)]
pub struct Factor {
    num: u64,
    den: u64,
}

impl Factor {
    pub fn new(num: u64, den: u64) -> Factor {
        assert!(den > 0, "factor denominator must be positive");
        if num <= den {
            // factors below 1 clamp to exactly 1: division leaves weights intact
            return Factor { num: 1, den: 1 };
        }
        let g = gcd(num, den);
        Factor {
            num: num / g,
            den: den / g,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// round_half_up(c / factor), in exact integer arithmetic:
    /// floor(c*den/num + 1/2) = (2*c*den + num) / (2*num).
    #[inline]
    pub fn normalize_counter(self, c: u8) -> u8 {
        let num = self.num as u128;
        let den = self.den as u128;
        let v = (2 * c as u128 * den + num) / (2 * num);
        debug_assert!(v <= u8::MAX as u128, "factor >= 1 cannot grow a counter");
        v as u8
    }
}

impl PartialEq for Factor {
    fn eq(&self, other: &Factor) -> bool {
        self.num as u128 * other.den as u128 == other.num as u128 * self.den as u128
    }
}
impl Eq for Factor {}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `num_reads * (read_length - k + 1) / genome_size`, clamped to >= 1.
pub fn duplicates_factor(p: &NormalizationParams) -> Factor {
    assert!(p.genome_size > 0, "genome size estimate must be positive");
    assert!(p.read_length >= p.k, "reads shorter than k carry no k-mers");
    let kmers_per_read = p.read_length - p.k + 1;
    let num = p
        .num_reads
        .checked_mul(kmers_per_read)
        .expect("total k-mer count overflows u64");
    Factor::new(num, p.genome_size)
}

/// Rescale every counter of every node in the bucket range. Ranges across
/// workers must be disjoint and cover the table; disjointness makes the
/// parallel pass bit-identical to a sequential one.
pub fn normalize_range(g: &Graph<'_>, factor: Factor, buckets: Range<usize>) {
    if factor == Factor::new(1, 1) {
        return; // identity; skip the walk
    }
    g.for_each_node_in(buckets, |n| {
        let counters = n.counters();
        for (i, &c) in counters.iter().enumerate() {
            if c != 0 {
                n.store_counter(i, factor.normalize_counter(c));
            }
        }
    });
}
