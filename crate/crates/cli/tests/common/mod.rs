//! Reference implementations the acceptance gates compare against: a plain
//! single-threaded map-and-count graph builder that emits the same
//! canonical snapshot text, written independently of the lock-free code
//! (its own base encoding, its own counting) so agreement means something.

use std::collections::BTreeMap;

/// Encoded base order used by the snapshot columns.
pub const DEC: [u8; 4] = *b"ACTG";

pub fn enc(c: u8) -> usize {
    ((c >> 1) & 0x3) as usize
}

#[derive(Default)]
pub struct NaiveGraph {
    /// label -> (first, exact counts in encoded order)
    pub nodes: BTreeMap<Vec<u8>, (bool, [u64; 4])>,
}

pub fn naive_build<R: AsRef<[u8]>>(reads: &[R], k: usize) -> NaiveGraph {
    let mut g = NaiveGraph::default();
    for read in reads {
        let read = read.as_ref();
        if read.len() < k {
            continue;
        }
        for kmer in read.windows(k) {
            let left = &kmer[..k - 1];
            let right = &kmer[1..];
            let e = g.nodes.entry(left.to_vec()).or_insert((true, [0; 4]));
            e.1[enc(kmer[k - 1])] += 1;
            g.nodes.entry(right.to_vec()).or_insert((true, [0; 4])).0 = false;
        }
    }
    g
}

impl NaiveGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Same line format as the concurrent graph's canonical snapshot:
    /// label, first flag, saturated counters, successor labels.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        for (label, (first, counts)) in &self.nodes {
            out.push_str(std::str::from_utf8(label).unwrap());
            out.push('\t');
            out.push(if *first { '1' } else { '0' });
            out.push('\t');
            for (i, c) in counts.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&c.min(&255).to_string());
            }
            out.push('\t');
            for i in 0..4 {
                if i > 0 {
                    out.push('|');
                }
                if counts[i] > 0 {
                    out.push_str(std::str::from_utf8(&label[1..]).unwrap());
                    out.push(DEC[i] as char);
                } else {
                    out.push('-');
                }
            }
            out.push('\n');
        }
        out
    }
}
