//! Per-worker slot pools.
//!
//! Bulk insertion must not fight over a global allocator lock, so each
//! worker draws node slots from its own pool: memory arrives in large
//! blocks, recycled slots (nodes that lost a publication race before ever
//! becoming reachable) are reused LIFO, and nothing is returned to the
//! system until teardown. Pools are strictly single-worker; the only thing
//! that ever leaves one is its block list, handed over wholesale when the
//! owning worker is done so published nodes stay alive as long as the graph
//! (see `Graph::adopt_blocks`).

use alloc::alloc::{alloc, dealloc, handle_alloc_error, Layout};
use alloc::vec::Vec;
use core::marker::PhantomData;
use core::mem;
use core::ptr::NonNull;

pub const DEFAULT_BLOCK_CAPACITY: usize = 4096;

/// One raw allocation holding `capacity` slots of some pool's item type.
/// Frees itself on drop; the slots must not need drop glue.
pub struct Block {
    base: NonNull<u8>,
    layout: Layout,
}

// blocks move between threads only at hand-over points (worker teardown),
// when the slots they hold are either published (shared atomically) or dead
unsafe impl Send for Block {}

impl Drop for Block {
    fn drop(&mut self) {
        unsafe { dealloc(self.base.as_ptr(), self.layout) };
    }
}

pub struct Pool<T> {
    blocks: Vec<Block>,
    /// Slots handed out of the newest block; == capacity when full or empty.
    used: usize,
    capacity: usize,
    free: Vec<NonNull<T>>,
    acquired: usize,
    recycled: usize,
    _own: PhantomData<T>,
}

// the pool itself is confined to one worker at a time; moving it (and the
// raw slot pointers it owns) to another thread is fine when T allows it
unsafe impl<T: Send> Send for Pool<T> {}

impl<T> Pool<T> {
    pub fn new() -> Self {
        Self::with_block_capacity(DEFAULT_BLOCK_CAPACITY)
    }

    pub fn with_block_capacity(capacity: usize) -> Self {
        assert!(capacity > 0, "block capacity must be positive");
        // teardown frees blocks without visiting slots, so T must not own
        // anything that needs dropping
        assert!(!mem::needs_drop::<T>(), "pool items must not need drop");
        assert!(mem::size_of::<T>() > 0, "zero-sized items need no pool");
        Pool {
            blocks: Vec::new(),
            used: capacity,
            capacity,
            free: Vec::new(),
            acquired: 0,
            recycled: 0,
            _own: PhantomData,
        }
    }

    /// Write `value` into a fresh slot and return it. Recycled slots are
    /// reused before the current block is touched; a new block is allocated
    /// only when both are exhausted. Allocation failure is fatal.
    pub fn acquire(&mut self, value: T) -> NonNull<T> {
        self.acquired += 1;
        let slot = match self.free.pop() {
            Some(slot) => slot,
            None => {
                if self.used == self.capacity {
                    self.grow();
                }
                let block = self.blocks.last().expect("grow pushed a block");
                let base = block.base.as_ptr() as *mut T;
                let slot = unsafe { NonNull::new_unchecked(base.add(self.used)) };
                self.used += 1;
                slot
            }
        };
        unsafe { slot.as_ptr().write(value) };
        slot
    }

    /// Take back a slot that never became reachable (it lost its CAS race
    /// before publication). It goes on the free list for this pool only.
    ///
    /// # Safety
    /// `slot` must have come from this pool's `acquire`, must not be
    /// referenced by anything, and must not be recycled twice.
    pub unsafe fn recycle(&mut self, slot: NonNull<T>) {
        self.recycled += 1;
        // poison so a stale reference to a recycled slot shows up loudly
        #[cfg(debug_assertions)]
        unsafe {
            core::ptr::write_bytes(slot.as_ptr() as *mut u8, 0xa5, mem::size_of::<T>());
        }
        self.free.push(slot);
    }

    fn grow(&mut self) {
        let layout = Layout::array::<T>(self.capacity).expect("block layout overflow");
        let base =
            NonNull::new(unsafe { alloc(layout) }).unwrap_or_else(|| handle_alloc_error(layout));
        self.blocks.push(Block { base, layout });
        self.used = 0;
    }

    /// Hand every block (and the slots inside) to the caller, leaving the
    /// pool empty. Outstanding free-list entries point into the moved blocks
    /// and are dropped with them.
    pub fn take_blocks(&mut self) -> Vec<Block> {
        self.free.clear();
        self.used = self.capacity;
        mem::take(&mut self.blocks)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn acquired(&self) -> usize {
        self.acquired
    }

    pub fn recycled(&self) -> usize {
        self.recycled
    }

    /// Slots currently owned by callers: acquired minus recycled. After a
    /// build this equals the number of nodes the worker published.
    pub fn live(&self) -> usize {
        self.acquired - self.recycled
    }
}

impl<T> Default for Pool<T> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_block_covers_capacity_acquires() {
        let mut pool: Pool<u64> = Pool::with_block_capacity(1024);
        assert_eq!(pool.block_count(), 0);
        let slots: Vec<_> = (0..1024).map(|i| pool.acquire(i)).collect();
        assert_eq!(pool.block_count(), 1);
        // all distinct and readable
        for (i, s) in slots.iter().enumerate() {
            assert_eq!(unsafe { *s.as_ref() }, i as u64);
        }
        pool.acquire(9999);
        assert_eq!(pool.block_count(), 2);
    }

    #[test]
    fn million_acquires_block_arithmetic() {
        let mut pool: Pool<u64> = Pool::with_block_capacity(1024);
        for i in 0..1_000_000u64 {
            pool.acquire(i);
        }
        assert_eq!(pool.block_count(), 977); // ceil(1e6 / 1024)
        assert_eq!(pool.acquired(), 1_000_000);
        assert_eq!(pool.live(), 1_000_000);
    }

    #[test]
    fn recycle_is_lifo_and_reuses_before_block() {
        let mut pool: Pool<u64> = Pool::with_block_capacity(4);
        let a = pool.acquire(1);
        unsafe { pool.recycle(a) };
        let b = pool.acquire(2);
        assert_eq!(a, b);
        assert_eq!(unsafe { *b.as_ref() }, 2);

        // recycling n slots then acquiring n slots allocates no new block
        let slots: Vec<_> = (0..3).map(|i| pool.acquire(i)).collect();
        let blocks_before = pool.block_count();
        for s in slots.into_iter().rev() {
            unsafe { pool.recycle(s) };
        }
        for i in 10..13 {
            pool.acquire(i);
        }
        assert_eq!(pool.block_count(), blocks_before);
        assert_eq!(pool.live(), pool.acquired() - pool.recycled());
    }

    #[test]
    fn take_blocks_resets_the_pool() {
        let mut pool: Pool<u64> = Pool::with_block_capacity(8);
        for i in 0..20 {
            pool.acquire(i);
        }
        let blocks = pool.take_blocks();
        assert_eq!(blocks.len(), 3);
        assert_eq!(pool.block_count(), 0);
        // pool still usable afterwards; fresh block on next acquire
        pool.acquire(42);
        assert_eq!(pool.block_count(), 1);
        drop(blocks);
    }
}
