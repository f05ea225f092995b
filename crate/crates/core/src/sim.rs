//! Deterministic genome and read simulation.
//!
//! Everything is driven by ChaCha8 (a portable, seedable stream cipher RNG)
//! so that a (size, seed) pair reproduces byte-identical data on any
//! platform or implementation. The draw protocol is part of the contract
//! and documented in the README: the genome uses stream 0 of the seed, the
//! reads use stream 1; one u64 per read start, then per base one u64 for
//! the error uniform and one u64 for the substitution pick, drawn whether
//! or not an error fires so that runs differing only in error rate share
//! read positions and nest their error sites.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Display-order sampling alphabet (distinct from the encoded A,C,T,G order
/// used by graph counters; sampling order is its own contract).
const ALPHABET: [u8; 4] = *b"ACGT";

#[derive(Clone, Copy, Debug)]
pub struct SimulationConfig {
    pub genome_size: usize,
    /// Bases per read; every read has exactly this length.
    pub read_length: usize,
    /// Fold coverage; reads are drawn until coverage * genome / read_length.
    pub coverage: f64,
    /// Per-base substitution probability in [0, 1]. No indels.
    pub error_rate: f64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn num_reads(&self) -> usize {
        // round half up; f64::round lives in std, and the operands here are
        // always positive, so +0.5 then truncate is the same thing
        (self.coverage * self.genome_size as f64 / self.read_length as f64 + 0.5) as usize
    }
}

/// Uniform i.i.d. genome over ACGT; identical output for identical inputs.
pub fn simulate_genome(size: usize, seed: u64) -> Vec<u8> {
    assert!(size >= 1, "a genome has at least one base");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    (0..size)
        .map(|_| ALPHABET[(rng.next_u32() >> 30) as usize])
        .collect()
}

/// Fixed-length reads at uniform random positions (with replacement), each
/// base independently substituted with probability `error_rate`.
pub fn simulate_reads(genome: &[u8], cfg: &SimulationConfig) -> Vec<Vec<u8>> {
    assert!(cfg.read_length >= 1 && cfg.read_length <= genome.len());
    assert!(cfg.coverage > 0.0, "coverage must be positive");
    assert!((0.0..=1.0).contains(&cfg.error_rate));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);

    let n = cfg.num_reads();
    let span = (genome.len() - cfg.read_length + 1) as u64;
    let mut reads = Vec::with_capacity(n);
    for _ in 0..n {
        let start = (rng.next_u64() % span) as usize;
        let mut read = genome[start..start + cfg.read_length].to_vec();
        for base in &mut read {
            // both draws happen whether or not the error fires, so configs
            // that differ only in error rate share read starts and nest
            // their error sites
            let uniform = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let pick = rng.next_u64() % 3;
            if uniform < cfg.error_rate {
                *base = substitute(*base, pick as usize);
            }
        }
        reads.push(read);
    }
    reads
}

/// The `pick`-th base (display order) that differs from `original`.
fn substitute(original: u8, pick: usize) -> u8 {
    debug_assert!(pick < 3);
    let mut alternatives = [0u8; 3];
    let mut n = 0;
    for b in ALPHABET {
        if b != original {
            alternatives[n] = b;
            n += 1;
        }
    }
    alternatives[pick]
}
