//! Lock-free A-Bruijn graph assembly.
//!
//! The graph is a fixed-size chained hash table whose nodes are (k-1)-mers.
//! Any number of workers build it concurrently using only atomic loads,
//! compare-and-swap publication of chain heads, and saturating atomic
//! counter updates; nothing is ever unlinked, so no reclamation protocol is
//! needed. After a build barrier the edge weights can be normalized by the
//! expected k-mer duplication factor, and contigs fall out of a walk over
//! unambiguous paths.
//!
//! The crate is `no_std` (plus `alloc`): it contains the algorithm, the
//! per-worker node arenas, the weight normalizer, the contig extractor,
//! assembly statistics, and a deterministic read simulator. Threads, files,
//! and clocks live in the `lfasm` companion crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_op_in_unsafe_fn)]

extern crate alloc;

pub mod arena;
pub mod contig;
pub mod graph;
pub mod normalize;
pub mod seq;
pub mod sim;
pub mod stats;
