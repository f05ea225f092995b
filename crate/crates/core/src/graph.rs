//! The lock-free A-Bruijn graph.
//!
//! A fixed-size array of N atomic chain heads; every node hangs off exactly
//! one chain, chosen by hashing its (k-1)-mer label. Workers publish new
//! nodes by compare-and-swap on the chain head and never unlink anything,
//! which keeps the protocol ABA-free: a failed head CAS always means another
//! worker genuinely inserted. Counters saturate at 255 through an atomic
//! read-modify-write loop, successor links are idempotent atomic stores
//! (every worker that processes the same k-mer computes the same target),
//! and the `first` flag only ever moves true to false, so racing stores
//! converge.
//!
//! Memory: nodes live in per-worker arena blocks (`arena::Pool`). When a
//! worker is dropped its blocks are pushed onto the graph's retired list, so
//! every published node outlives the graph borrow that references it; a
//! candidate that lost its publication race is recycled into the owning
//! worker's free list instead, and nobody else can have seen it.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::ptr;
use core::sync::atomic::{AtomicBool, AtomicPtr, AtomicU8, Ordering};

use crate::arena::{Block, Pool, DEFAULT_BLOCK_CAPACITY};
use crate::seq::{kmers, split, Base};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over `bytes`, folded into a running state. Use `fnv1a64` unless
/// you are streaming.
#[inline]
pub fn fnv1a64_update(mut state: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        state ^= b as u64;
        state = state.wrapping_mul(FNV_PRIME);
    }
    state
}

/// 64-bit FNV-1a. Chosen as the label hash because it is trivially
/// reproducible across implementations and languages.
#[inline]
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    fnv1a64_update(FNV_OFFSET, bytes)
}

/// Bucket for a label in a table of `n` chains.
#[inline]
pub fn hash_index(label: &[u8], n: usize) -> usize {
    debug_assert!(n >= 1);
    (fnv1a64(label) % n as u64) as usize
}

/// One graph vertex: a (k-1)-mer label, four saturating edge counters and
/// four successor links (indexed in encoded A,C,T,G order), the `first`
/// flag (true iff the label was never observed as a k-mer suffix), and the
/// intrusive chain link.
pub struct Node<'r> {
    label: &'r [u8],
    counters: [AtomicU8; 4],
    successors: [AtomicPtr<Node<'r>>; 4],
    first: AtomicBool,
    /// Written only while the node is still private to its creating worker;
    /// immutable from publication on.
    next: *mut Node<'r>,
    /// Debug guard: set once the node is reachable, checked on recycle.
    #[cfg(debug_assertions)]
    published: AtomicBool,
}

// Safety: after publication every mutable field is atomic; `next` is written
// only before the node becomes reachable and `label` is a shared immutable
// borrow. Node values are moved between threads only while still private.
unsafe impl Send for Node<'_> {}
unsafe impl Sync for Node<'_> {}

impl<'r> Node<'r> {
    fn fresh(label: &'r [u8], first: bool) -> Self {
        Node {
            label,
            counters: [const { AtomicU8::new(0) }; 4],
            successors: [const { AtomicPtr::new(ptr::null_mut()) }; 4],
            first: AtomicBool::new(first),
            next: ptr::null_mut(),
            #[cfg(debug_assertions)]
            published: AtomicBool::new(false),
        }
    }

    #[inline]
    pub fn label(&self) -> &'r [u8] {
        self.label
    }

    #[inline]
    pub fn counter(&self, base: Base) -> u8 {
        self.counters[base.index()].load(Ordering::Relaxed)
    }

    #[inline]
    pub fn counters(&self) -> [u8; 4] {
        [
            self.counters[0].load(Ordering::Relaxed),
            self.counters[1].load(Ordering::Relaxed),
            self.counters[2].load(Ordering::Relaxed),
            self.counters[3].load(Ordering::Relaxed),
        ]
    }

    /// The node this edge points at, if the link has been stored.
    #[inline]
    pub fn successor(&self, base: Base) -> Option<&Node<'r>> {
        let p = self.successors[base.index()].load(Ordering::Acquire);
        unsafe { p.as_ref() }
    }

    #[inline]
    pub fn first(&self) -> bool {
        self.first.load(Ordering::Relaxed)
    }

    /// Saturating increment: read, clamp-add, CAS, retry. A plain fetch_add
    /// would wrap past 255 and corrupt the weight.
    #[inline]
    fn bump(&self, base: Base) {
        let _ =
            self.counters[base.index()].fetch_update(Ordering::Relaxed, Ordering::Relaxed, |c| {
                if c == u8::MAX {
                    None
                } else {
                    Some(c + 1)
                }
            });
    }

    pub(crate) fn store_counter(&self, index: usize, value: u8) {
        self.counters[index].store(value, Ordering::Relaxed);
    }
}

/// Store the successor link for (`left`, `next_base`). Idempotent: once both
/// vertices are published, every worker that processes this k-mer resolves
/// the same `right` node, so concurrent duplicate stores write the same
/// value.
#[inline]
pub fn link_edge<'r>(left: &Node<'r>, next_base: Base, right: &Node<'r>) {
    debug_assert_eq!(
        &right.label[..right.label.len() - 1],
        &left.label[1..],
        "edge endpoints must overlap in k-2 characters"
    );
    debug_assert_eq!(*right.label.last().unwrap(), next_base.to_ascii());
    left.successors[next_base.index()]
        .store(right as *const Node<'r> as *mut Node<'r>, Ordering::Release);
}

/// Walk a chain from `from` (inclusive) to `until` (exclusive), looking for
/// `label`. Pass a null `until` to walk the entire chain.
///
/// # Safety
/// Every node reachable from `from` must be published (or owned by the
/// caller) and alive for `'g`, and `until`, when non-null, must lie on the
/// chain downstream of `from`.
unsafe fn find_between<'g, 'r>(
    from: *mut Node<'r>,
    until: *mut Node<'r>,
    label: &[u8],
) -> Option<&'g Node<'r>> {
    let mut cur = from;
    while cur != until && !cur.is_null() {
        let n = unsafe { &*cur };
        if n.label == label {
            return Some(n);
        }
        cur = n.next;
    }
    None
}

struct Retired {
    // held only so the blocks (and the nodes inside them) outlive the
    // workers that allocated them; freed when the graph drops
    _blocks: Vec<Block>,
    next: *mut Retired,
}

/// The shared graph: table of chain heads plus the dimension k. All
/// construction-time mutation goes through [`Worker`]; reads may run
/// concurrently with inserts.
pub struct Graph<'r> {
    table: Box<[AtomicPtr<Node<'r>>]>,
    k: usize,
    retired: AtomicPtr<Retired>,
}

impl<'r> Graph<'r> {
    /// `table_size` is fixed for the graph's whole life; the usual choice is
    /// the approximate genome size. `k` is the graph dimension (labels are
    /// (k-1)-mers).
    pub fn new(table_size: usize, k: usize) -> Self {
        assert!(table_size >= 1, "table must have at least one bucket");
        assert!(k >= 2, "k must be at least 2");
        Graph {
            table: (0..table_size)
                .map(|_| AtomicPtr::new(ptr::null_mut()))
                .collect(),
            k,
            retired: AtomicPtr::new(ptr::null_mut()),
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn table_size(&self) -> usize {
        self.table.len()
    }

    /// Chain walk at the label's bucket. Never blocks; `None` is only valid
    /// advice, since a concurrent insert may publish the label right after.
    pub fn find_vertex(&self, label: &[u8]) -> Option<&Node<'r>> {
        let head = self.table[hash_index(label, self.table.len())].load(Ordering::Acquire);
        // Safety: chain nodes are published and live until self is dropped.
        unsafe { find_between(head, ptr::null_mut(), label) }
    }

    /// Visit every node in the bucket range, chain by chain. Order is
    /// hash/insertion dependent; use the snapshot for anything canonical.
    pub fn for_each_node_in<'s, F: FnMut(&'s Node<'r>)>(&'s self, buckets: Range<usize>, mut f: F) {
        for b in buckets {
            let mut cur = self.table[b].load(Ordering::Acquire);
            // Safety: published nodes live until the graph is dropped, so
            // handing out references bound to the graph borrow is sound.
            while let Some(n) = unsafe { cur.as_ref() } {
                f(n);
                cur = n.next;
            }
        }
    }

    pub fn for_each_node<'s, F: FnMut(&'s Node<'r>)>(&'s self, f: F) {
        self.for_each_node_in(0..self.table.len(), f);
    }

    pub fn node_count(&self) -> usize {
        let mut count = 0;
        self.for_each_node(|_| count += 1);
        count
    }

    /// All nodes ordered by label; the canonical view of the graph.
    pub fn nodes_sorted(&self) -> Vec<&Node<'r>> {
        let mut all = Vec::new();
        self.for_each_node(|n| all.push(n));
        all.sort_unstable_by(|a, b| a.label.cmp(b.label));
        all
    }

    fn write_snapshot<W: fmt::Write>(&self, out: &mut W) -> fmt::Result {
        for n in self.nodes_sorted() {
            out.write_str(label_str(n.label))?;
            out.write_char('\t')?;
            out.write_char(if n.first() { '1' } else { '0' })?;
            out.write_char('\t')?;
            let c = n.counters();
            write!(out, "{},{},{},{}", c[0], c[1], c[2], c[3])?;
            out.write_char('\t')?;
            for i in 0..4 {
                if i > 0 {
                    out.write_char('|')?;
                }
                match n.successor(Base::from_index(i)) {
                    Some(s) => out.write_str(label_str(s.label))?,
                    None => out.write_char('-')?,
                }
            }
            out.write_char('\n')?;
        }
        Ok(())
    }

    /// Line-oriented canonical serialization, independent of table size,
    /// chain order, and scheduling:
    /// `label<TAB>first<TAB>cA,cC,cT,cG<TAB>succA|succC|succT|succG`,
    /// `-` for an absent successor, one line per node, sorted by label.
    /// Callers must be past the build barrier (no concurrent mutation).
    pub fn snapshot_canonical(&self) -> String {
        let mut s = String::new();
        self.write_snapshot(&mut s)
            .expect("writing to String cannot fail");
        s
    }

    /// FNV-1a over exactly the bytes `snapshot_canonical` would produce,
    /// without materializing them.
    pub fn snapshot_hash(&self) -> u64 {
        struct Hasher(u64);
        impl fmt::Write for Hasher {
            fn write_str(&mut self, s: &str) -> fmt::Result {
                self.0 = fnv1a64_update(self.0, s.as_bytes());
                Ok(())
            }
        }
        let mut h = Hasher(FNV_OFFSET);
        self.write_snapshot(&mut h)
            .expect("hash writer cannot fail");
        h.0
    }

    /// Lock-free push of a worker's arena blocks; the nodes inside remain
    /// valid until the graph itself is dropped.
    fn adopt_blocks(&self, blocks: Vec<Block>) {
        if blocks.is_empty() {
            return;
        }
        let entry = Box::into_raw(Box::new(Retired {
            _blocks: blocks,
            next: ptr::null_mut(),
        }));
        let mut head = self.retired.load(Ordering::Relaxed);
        loop {
            unsafe { (*entry).next = head };
            match self
                .retired
                .compare_exchange(head, entry, Ordering::Release, Ordering::Relaxed)
            {
                Ok(_) => return,
                Err(actual) => head = actual,
            }
        }
    }
}

impl Drop for Graph<'_> {
    fn drop(&mut self) {
        // teardown is wholesale: free adopted block lists, never walk chains
        let mut cur = *self.retired.get_mut();
        while !cur.is_null() {
            let entry = unsafe { Box::from_raw(cur) };
            cur = entry.next;
        }
    }
}

fn label_str(label: &[u8]) -> &str {
    core::str::from_utf8(label).expect("labels are ASCII base text")
}

/// What `add_*_vertex` should do to a chain entry for its label.
#[derive(Clone, Copy)]
enum Touch {
    /// Left end of a k-mer: bump the counter toward the spelled base; a
    /// fresh node is born with `first = true`.
    Left(Base),
    /// Right end: no counter, and `first` is forced false even on nodes that
    /// already exist.
    Right,
}

/// One build participant. Holds the worker-local node pool and a borrow of
/// the shared graph; create one per thread. Dropping the worker hands its
/// arena blocks to the graph, which is what lets `&Node` references outlive
/// the worker itself.
pub struct Worker<'g, 'r> {
    graph: &'g Graph<'r>,
    pool: Pool<Node<'r>>,
    /// Test hook: called immediately before every head CAS attempt. Lets a
    /// liveness test suspend one worker mid-insert and watch the others
    /// finish; `None` costs one predictable branch.
    pub pause_before_publish: Option<fn()>,
}

impl<'g, 'r> Worker<'g, 'r> {
    pub fn new(graph: &'g Graph<'r>) -> Self {
        Self::with_block_capacity(graph, DEFAULT_BLOCK_CAPACITY)
    }

    pub fn with_block_capacity(graph: &'g Graph<'r>, block_capacity: usize) -> Self {
        Worker {
            graph,
            pool: Pool::with_block_capacity(block_capacity),
            pause_before_publish: None,
        }
    }

    pub fn graph(&self) -> &'g Graph<'r> {
        self.graph
    }

    pub fn pool(&self) -> &Pool<Node<'r>> {
        &self.pool
    }

    /// Ensure a node labelled `left` exists and count one observation of the
    /// k-mer `left + next_base`. Lock-free: the only loop retries a head CAS
    /// whose failure proves another worker inserted a node.
    pub fn add_left_vertex(&mut self, left: &'r [u8], next_base: Base) -> &'g Node<'r> {
        self.insert(left, Touch::Left(next_base))
    }

    /// Ensure a node labelled `right` exists and force its `first` flag
    /// false: the label was just seen as a k-mer suffix, so it cannot start
    /// a contig. Counters are untouched.
    pub fn add_right_vertex(&mut self, right: &'r [u8]) -> &'g Node<'r> {
        self.insert(right, Touch::Right)
    }

    fn insert(&mut self, label: &'r [u8], touch: Touch) -> &'g Node<'r> {
        debug_assert_eq!(label.len(), self.graph.k - 1, "labels are (k-1)-mers");
        let bucket = &self.graph.table[hash_index(label, self.graph.table.len())];

        let head = bucket.load(Ordering::Acquire);
        // Safety: chain nodes are published and outlive the graph borrow.
        if let Some(n) = unsafe { find_between(head, ptr::null_mut(), label) } {
            return touch_existing(n, touch);
        }

        // Absent as of `head`: build a candidate and try to publish it. The
        // candidate is private until the CAS lands, so plain writes are fine.
        let mut node = match touch {
            Touch::Left(base) => {
                let mut n = Node::fresh(label, true);
                n.counters[base.index()] = AtomicU8::new(1); // pre-counted
                n
            }
            Touch::Right => Node::fresh(label, false),
        };
        node.next = head;
        let slot = self.pool.acquire(node);
        let raw = slot.as_ptr();

        // Everything from `expected` to the chain tail has been searched.
        let mut expected = head;
        loop {
            if let Some(pause) = self.pause_before_publish {
                pause();
            }
            #[cfg(debug_assertions)]
            unsafe {
                (*raw).published.store(true, Ordering::Relaxed);
            }
            match bucket.compare_exchange(expected, raw, Ordering::AcqRel, Ordering::Acquire) {
                // Safety: now published; the graph keeps it alive for 'g.
                Ok(_) => return unsafe { &*raw },
                Err(actual) => {
                    #[cfg(debug_assertions)]
                    unsafe {
                        (*raw).published.store(false, Ordering::Relaxed);
                    }
                    // Someone else grew this chain. Only the new prefix
                    // [actual, expected) can hold our label.
                    if let Some(n) = unsafe { find_between(actual, expected, label) } {
                        #[cfg(debug_assertions)]
                        unsafe {
                            debug_assert!(!(*raw).published.load(Ordering::Relaxed));
                        }
                        // our candidate lost the race and was never visible
                        unsafe { self.pool.recycle(slot) };
                        return touch_existing(n, touch);
                    }
                    unsafe { (*raw).next = actual };
                    expected = actual;
                }
            }
        }
    }

    /// Process this worker's share of the reads: for every k-mer, insert
    /// both (k-1)-mers, re-find them, and store the edge. Re-finding after
    /// the adds mirrors the build algorithm and double-checks that the
    /// published entries are exactly what the adds returned.
    pub fn make_graph(&mut self, reads: impl IntoIterator<Item = &'r [u8]>) {
        let k = self.graph.k;
        for read in reads {
            for kmer in kmers(read, k) {
                let s = split(kmer);
                let l0 = self.add_left_vertex(s.left, s.next_base);
                let r0 = self.add_right_vertex(s.right);
                let l = self
                    .graph
                    .find_vertex(s.left)
                    .expect("left vertex just inserted");
                let r = self
                    .graph
                    .find_vertex(s.right)
                    .expect("right vertex just inserted");
                debug_assert!(ptr::eq(l, l0), "find must resolve the node add returned");
                debug_assert!(ptr::eq(r, r0), "find must resolve the node add returned");
                link_edge(l, s.next_base, r);
            }
        }
    }
}

fn touch_existing<'g, 'r>(n: &'g Node<'r>, touch: Touch) -> &'g Node<'r> {
    match touch {
        Touch::Left(base) => n.bump(base),
        // monotone true -> false, so racing stores converge
        Touch::Right => n.first.store(false, Ordering::Relaxed),
    }
    n
}

impl Drop for Worker<'_, '_> {
    fn drop(&mut self) {
        self.graph.adopt_blocks(self.pool.take_blocks());
    }
}
