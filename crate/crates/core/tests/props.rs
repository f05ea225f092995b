//! Randomized invariants: sequence utilities against their definitions,
//! graph counters against a naive sequential model, normalization shape,
//! and the N50 scan against its textbook statement.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use lfasm_core::graph::{Graph, Worker};
use lfasm_core::normalize::Factor;
use lfasm_core::seq::{kmers, split, Base};
use lfasm_core::stats::n50_l50;

fn dna(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0usize..4, len)
        .prop_map(|v| v.into_iter().map(|i| b"ACGT"[i]).collect())
}

fn read_set() -> impl Strategy<Value = Vec<Vec<u8>>> {
    proptest::collection::vec(dna(1..40), 1..8)
}

/// What a single thread with a hash map would do: per-label saturating
/// counters in encoded order, and first = "never seen as a k-mer suffix".
struct NaiveModel {
    counters: BTreeMap<Vec<u8>, [u8; 4]>,
    seen_as_right: BTreeSet<Vec<u8>>,
}

fn naive_build(reads: &[Vec<u8>], k: usize) -> NaiveModel {
    let mut model = NaiveModel {
        counters: BTreeMap::new(),
        seen_as_right: BTreeSet::new(),
    };
    for read in reads {
        for kmer in kmers(read, k) {
            let s = split(kmer);
            let slot = model.counters.entry(s.left.to_vec()).or_insert([0; 4]);
            slot[s.next_base.index()] = slot[s.next_base.index()].saturating_add(1);
            model.counters.entry(s.right.to_vec()).or_insert([0; 4]);
            model.seen_as_right.insert(s.right.to_vec());
        }
    }
    model
}

proptest! {
    #[test]
    fn split_recombines_into_the_kmer(kmer in dna(2..12)) {
        let s = split(&kmer);
        prop_assert_eq!(s.left, &kmer[..kmer.len() - 1]);
        prop_assert_eq!(s.right, &kmer[1..]);
        prop_assert_eq!(s.next_base.to_ascii(), *kmer.last().unwrap());
        // the defining overlap: left and right agree on the middle
        prop_assert_eq!(&s.left[1..], &s.right[..s.right.len() - 1]);
    }

    #[test]
    fn kmer_count_is_window_count(read in dna(0..60), k in 2usize..8) {
        let expected = if read.len() >= k { read.len() - k + 1 } else { 0 };
        prop_assert_eq!(kmers(&read, k).count(), expected);
    }

    #[test]
    fn encode_decode_roundtrip(byte in prop_oneof![
        Just(b'A'), Just(b'C'), Just(b'G'), Just(b'T'),
        Just(b'a'), Just(b'c'), Just(b'g'), Just(b't'),
    ]) {
        let b = Base::from_ascii(byte);
        prop_assert_eq!(b.to_ascii(), byte.to_ascii_uppercase());
        prop_assert_eq!(Base::from_index(b.index()).to_ascii(), b.to_ascii());
    }

    #[test]
    fn graph_matches_the_naive_model(reads in read_set(), k in 2usize..8) {
        let model = naive_build(&reads, k);
        let graph = Graph::new(64, k);
        {
            let mut w = Worker::new(&graph);
            w.make_graph(reads.iter().map(|r| r.as_slice()));
        }
        prop_assert_eq!(graph.node_count(), model.counters.len());
        for (label, expected) in &model.counters {
            let node = graph.find_vertex(label).expect("model label missing from graph");
            prop_assert_eq!(&node.counters(), expected);
            prop_assert_eq!(node.first(), !model.seen_as_right.contains(label));
            for (i, &count) in expected.iter().enumerate() {
                let successor = node.successor(Base::from_index(i));
                prop_assert_eq!(successor.is_some(), count > 0);
                if let Some(s) = successor {
                    let mut want = label[1..].to_vec();
                    want.push(Base::from_index(i).to_ascii());
                    prop_assert_eq!(s.label(), &want[..]);
                }
            }
        }
    }

    #[test]
    fn normalization_is_monotone(num in 1u64..10_000, den in 1u64..10_000) {
        let f = Factor::new(num, den);
        for c in 0..255u8 {
            prop_assert!(f.normalize_counter(c) <= f.normalize_counter(c + 1));
        }
        if num <= den {
            // clamped to 1: dividing by anything <= 1 must change nothing
            for c in [0u8, 1, 7, 128, 255] {
                prop_assert_eq!(f.normalize_counter(c), c);
            }
        }
    }

    #[test]
    fn n50_satisfies_its_definition(lengths in proptest::collection::vec(0u64..10_000, 0..20)) {
        let total: u64 = lengths.iter().sum();
        let (n50, l50) = n50_l50(&lengths, total);
        if total == 0 {
            prop_assert_eq!((n50, l50), (0, 0));
        } else {
            prop_assert!(lengths.contains(&n50));
            let mut sorted = lengths.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let prefix: u64 = sorted[..l50 as usize].iter().sum();
            prop_assert!(2 * prefix >= total, "the L50 longest must reach half the total");
            prop_assert!(2 * (prefix - n50) < total, "L50 must be minimal");
            prop_assert_eq!(sorted[l50 as usize - 1], n50, "N50 is the length of the L50-th contig");
        }
    }
}
