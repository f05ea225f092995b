//! Whole-pipeline check in the regime where assembly is exact: error-free
//! reads, every genome k-mer covered, all (k-1)-mers distinct. Under those
//! preconditions the graph is a single path and extraction must return the
//! genome itself, byte for byte.

use std::collections::HashSet;

use lfasm_core::contig::find_contigs;
use lfasm_core::graph::{Graph, Worker};
use lfasm_core::sim::{simulate_genome, simulate_reads, SimulationConfig};

const GENOME: usize = 2_000;
const K: usize = 21;

fn preconditions_hold(genome: &[u8], reads: &[Vec<u8>]) -> bool {
    let mut seen = HashSet::new();
    if !genome.windows(K - 1).all(|w| seen.insert(w)) {
        return false; // a repeated (k-1)-mer would merge path vertices
    }
    let read_kmers: HashSet<&[u8]> = reads.iter().flat_map(|r| r.windows(K)).collect();
    genome.windows(K).all(|w| read_kmers.contains(w))
}

#[test]
fn exact_coverage_reconstructs_the_genome() {
    // deterministic seed scan: the test needs one instance satisfying the
    // preconditions, and the scan order makes the chosen instance stable
    for seed in 1..=50 {
        let genome = simulate_genome(GENOME, seed);
        let cfg = SimulationConfig {
            genome_size: GENOME,
            read_length: 100,
            coverage: 30.0,
            error_rate: 0.0,
            seed,
        };
        let reads = simulate_reads(&genome, &cfg);
        if !preconditions_hold(&genome, &reads) {
            continue;
        }

        let graph = Graph::new(GENOME, K);
        {
            let mut w = Worker::new(&graph);
            w.make_graph(reads.iter().map(|r| r.as_slice()));
        }
        assert_eq!(
            graph.node_count(),
            GENOME - (K - 1) + 1,
            "one vertex per (k-1)-mer"
        );

        let mut contigs = Vec::new();
        find_contigs(&graph, 0..graph.table_size(), &mut contigs);
        assert_eq!(contigs.len(), 1, "a single path must yield a single contig");
        assert_eq!(
            contigs[0].sequence, genome,
            "seed {seed}: reconstruction must be exact"
        );
        assert_eq!(contigs[0].start_label, &genome[..K - 1]);
        return;
    }
    panic!("no seed in 1..=50 satisfied the reconstruction preconditions");
}
