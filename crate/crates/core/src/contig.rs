//! Contig extraction: walks of unambiguous out-edges.
//!
//! After normalization an edge exists iff its counter is positive. A contig
//! starts at every vertex whose `first` flag survived (never seen as a
//! k-mer suffix, so nothing precedes it) and at every branch vertex, one
//! contig per outgoing edge; it then extends while the current vertex has
//! exactly one live out-edge. Vertices with zero or one out-edge and
//! first=false start nothing, which means an isolated cycle with no entry
//! point emits no contig at all; the cycle guard below exists so that a
//! direct walk into such a loop still terminates.

use alloc::vec::Vec;
use core::ops::Range;
use core::ptr;

use crate::graph::{Graph, Node};
use crate::seq::{Base, DECODE};

/// Number of bases `b` with a positive counter: live out-edges.
#[inline]
pub fn out_degree(n: &Node<'_>) -> usize {
    n.counters().iter().filter(|&&c| c > 0).count()
}

/// True iff the walk through `n` is unambiguous (exactly one live out-edge).
/// Zero is not one: dead ends return false.
#[inline]
pub fn only_one_path(n: &Node<'_>) -> bool {
    out_degree(n) == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contig {
    /// Assembled text; starts with `start_label`, then one base per edge.
    pub sequence: Vec<u8>,
    /// Label of the vertex the walk started from.
    pub start_label: Vec<u8>,
}

impl Contig {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

fn single_live_base(n: &Node<'_>) -> Base {
    let counters = n.counters();
    let i = (0..4)
        .find(|&i| counters[i] > 0)
        .expect("caller checked out_degree == 1");
    Base::from_index(i)
}

fn live_successor<'s, 'r>(n: &'s Node<'r>, base: Base) -> &'s Node<'r> {
    // a positive counter with no stored link means the build left the graph
    // inconsistent; refusing to continue beats emitting garbage contigs
    n.successor(base)
        .expect("edge counter is positive but the successor link is null")
}

/// Walk from `start` and spell out one contig. With `first_base` given the
/// walk takes that specific edge first (the per-edge start at a branch);
/// it then extends while the current vertex has exactly one live out-edge.
/// The walk stops at a branch or dead end, when it returns to `start` (the
/// cycle guard), or after a hard cap of table_size + k appended bases.
pub fn make_path<'r>(g: &Graph<'r>, start: &Node<'r>, first_base: Option<Base>) -> Contig {
    let cap = g.table_size() + g.k();
    let mut sequence = Vec::with_capacity(start.label().len() + 16);
    sequence.extend_from_slice(start.label());
    let mut steps = 0usize;

    let mut current: &Node<'r> = start;
    if let Some(base) = first_base {
        debug_assert!(start.counter(base) > 0, "per-edge starts need a live edge");
        sequence.push(DECODE[base.index()]);
        steps += 1;
        let next = live_successor(start, base);
        if ptr::eq(next, start) {
            return finish(sequence, start);
        }
        current = next;
    }

    while only_one_path(current) && steps < cap {
        let base = single_live_base(current);
        sequence.push(DECODE[base.index()]);
        steps += 1;
        let next = live_successor(current, base);
        if ptr::eq(next, start) {
            break; // came back around to the walk's entry
        }
        current = next;
    }
    finish(sequence, start)
}

fn finish(sequence: Vec<u8>, start: &Node<'_>) -> Contig {
    Contig {
        sequence,
        start_label: start.label().to_vec(),
    }
}

/// Emit every contig whose start vertex hashes into `buckets`. Start rule:
/// a branch vertex (out-degree >= 2) contributes one contig per live edge;
/// otherwise a vertex with first=true contributes one contig. Ranges across
/// workers must be disjoint and cover the table; extraction never mutates
/// the graph.
pub fn find_contigs<'r>(g: &Graph<'r>, buckets: Range<usize>, sink: &mut Vec<Contig>) {
    g.for_each_node_in(buckets, |n| {
        let degree = out_degree(n);
        if degree >= 2 {
            // one contig for every outgoing edge; a first flag on a branch
            // vertex adds nothing extra or the same paths would be emitted twice
            for (i, &c) in n.counters().iter().enumerate() {
                if c > 0 {
                    sink.push(make_path(g, n, Some(Base::from_index(i))));
                }
            }
        } else if n.first() {
            sink.push(make_path(g, n, None));
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Worker;

    fn build<'a>(reads: &[&'a [u8]], k: usize, table_size: usize) -> Graph<'a> {
        let g = Graph::new(table_size, k);
        {
            let mut w = Worker::new(&g);
            w.make_graph(reads.iter().copied());
        }
        g
    }

    fn all_contigs(g: &Graph<'_>) -> Vec<Vec<u8>> {
        let mut sink = Vec::new();
        find_contigs(g, 0..g.table_size(), &mut sink);
        let mut seqs: Vec<Vec<u8>> = sink.into_iter().map(|c| c.sequence).collect();
        seqs.sort();
        seqs
    }

    #[test]
    fn degree_counting_on_the_worked_graph() {
        let g = build(&[b"ACGACGACGC" as &[u8]], 4, 64);
        let acg = g.find_vertex(b"ACG").unwrap();
        let cga = g.find_vertex(b"CGA").unwrap();
        let cgc = g.find_vertex(b"CGC").unwrap();
        assert_eq!(out_degree(acg), 2);
        assert_eq!(out_degree(cga), 1);
        assert_eq!(out_degree(cgc), 0);
        assert!(!only_one_path(acg));
        assert!(only_one_path(cga));
        assert!(!only_one_path(cgc), "a dead end is not an unambiguous path");
    }

    #[test]
    fn linear_chain_spells_through() {
        // ACG -> CGT -> GTA -> TAC, all unambiguous
        let g = build(&[b"ACGTAC" as &[u8]], 4, 64);
        let start = g.find_vertex(b"ACG").unwrap();
        let contig = make_path(&g, start, None);
        assert_eq!(contig.sequence, b"ACGTAC");
        assert_eq!(contig.start_label, b"ACG");
    }

    #[test]
    fn per_edge_start_at_a_branch() {
        let g = build(&[b"ACGACGACGC" as &[u8]], 4, 64);
        let acg = g.find_vertex(b"ACG").unwrap();
        let via_c = make_path(&g, acg, Some(Base::from_ascii(b'C')));
        assert_eq!(via_c.sequence, b"ACGC", "CGC is terminal after one hop");
        let via_a = make_path(&g, acg, Some(Base::from_ascii(b'A')));
        // the A edge runs CGA -> GAC -> back to the entry vertex
        assert_eq!(via_a.sequence, b"ACGACG");
    }

    #[test]
    fn homopolymer_cycle_is_bounded() {
        let g = build(&[b"AAAAA" as &[u8]], 4, 16);
        let aaa = g.find_vertex(b"AAA").unwrap();
        let contig = make_path(&g, aaa, None);
        // append the loop edge once, then the guard notices the entry vertex
        assert_eq!(contig.sequence, b"AAAA");
    }

    #[test]
    fn unique_kmer_read_yields_itself() {
        let read = b"ACGTACCGGT";
        let g = build(&[read as &[u8]], 4, 64);
        assert_eq!(all_contigs(&g), [read.to_vec()]);
    }

    #[test]
    fn worked_graph_emits_per_edge_contigs_only() {
        let g = build(&[b"ACGACGACGC" as &[u8]], 4, 64);
        // ACG is the only start vertex (out-degree 2; every first flag is
        // false because every label occurs as a suffix somewhere)
        assert_eq!(all_contigs(&g), [b"ACGACG".to_vec(), b"ACGC".to_vec()]);
    }

    #[test]
    fn isolated_cycle_emits_nothing() {
        let g = build(&[b"AAAAA" as &[u8]], 4, 16);
        assert_eq!(all_contigs(&g).len(), 0);
    }

    #[test]
    fn empty_graph_emits_nothing() {
        let g: Graph<'static> = Graph::new(8, 4);
        assert!(all_contigs(&g).is_empty());
    }

    #[test]
    fn extraction_is_read_only() {
        let g = build(&[b"ACGACGACGC" as &[u8], b"TTACGT"], 4, 64);
        let before = g.snapshot_canonical();
        let _ = all_contigs(&g);
        assert_eq!(g.snapshot_canonical(), before);
    }

    #[test]
    fn partitioned_extraction_matches_sequential() {
        let g = build(&[b"ACGACGACGC" as &[u8], b"TTACGT", b"GGGCAT"], 4, 97);
        let mut whole = Vec::new();
        find_contigs(&g, 0..97, &mut whole);
        let mut pieces = Vec::new();
        find_contigs(&g, 0..40, &mut pieces);
        find_contigs(&g, 40..97, &mut pieces);
        let canon = |v: &mut Vec<Contig>| {
            let mut s: Vec<_> = v.drain(..).map(|c| c.sequence).collect();
            s.sort();
            s
        };
        assert_eq!(canon(&mut whole), canon(&mut pieces));
    }

    #[test]
    fn every_contig_rewraps_present_edges() {
        let g = build(&[b"ACGTACCGGTACGATT" as &[u8], b"CCGGAATT"], 5, 64);
        let mut sink = Vec::new();
        find_contigs(&g, 0..64, &mut sink);
        assert!(!sink.is_empty());
        for contig in &sink {
            assert!(contig.sequence.starts_with(&contig.start_label));
            for win in contig.sequence.windows(g.k()) {
                let s = crate::seq::split(win);
                let node = g.find_vertex(s.left).expect("walked label must exist");
                assert!(node.counter(s.next_base) > 0, "walked edge must be present");
            }
        }
    }
}
