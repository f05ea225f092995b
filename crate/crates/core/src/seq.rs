//! Alphabet encoding and k-mer decomposition.
//!
//! A base is mapped to two bits with `(c >> 1) & 0x3`, which gives A=0, C=1,
//! T=2, G=3 in two instructions and happens to work for lower case too.
//! Everything indexed by a base (counters, successor slots) uses this
//! encoded A,C,T,G order, not the alphabetical display order.

/// Two-bit base code. Constructed from ASCII, never out of range.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Base(u8);

/// Encoded-order decode table: `DECODE[Base::index()]` is the ASCII base.
pub const DECODE: [u8; 4] = *b"ACTG";

impl Base {
    /// `(c >> 1) & 0x3`. Callers must feed ACGT (either case); anything else
    /// still lands in 0..3 but means nothing, so ingestion validates first.
    #[inline(always)]
    pub fn from_ascii(c: u8) -> Base {
        Base((c >> 1) & 0x3)
    }

    #[inline(always)]
    pub fn from_index(i: usize) -> Base {
        debug_assert!(i < 4);
        Base(i as u8)
    }

    #[inline(always)]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline(always)]
    pub fn to_ascii(self) -> u8 {
        DECODE[self.0 as usize]
    }
}

/// True for the four bases the graph accepts, either case.
#[inline]
pub fn is_acgt(c: u8) -> bool {
    matches!(c & !0x20, b'A' | b'C' | b'G' | b'T')
}

/// The `len - k + 1` consecutive k-mers of a read, left to right. A read
/// shorter than k has none.
#[inline]
pub fn kmers(read: &[u8], k: usize) -> impl Iterator<Item = &[u8]> {
    assert!(k >= 2, "k must be at least 2");
    read.windows(k)
}

/// A k-mer split into its two overlapping (k-1)-mers plus the base that the
/// edge between them spells.
#[derive(Clone, Copy, Debug)]
pub struct KmerSplit<'a> {
    /// `kmer[..k-1]`, the edge source label.
    pub left: &'a [u8],
    /// `kmer[1..]`, the edge target label.
    pub right: &'a [u8],
    /// Last character of the k-mer; indexes the source's counter/successor.
    pub next_base: Base,
}

#[inline(always)]
pub fn split(kmer: &[u8]) -> KmerSplit<'_> {
    let k = kmer.len();
    debug_assert!(k >= 2);
    KmerSplit {
        left: &kmer[..k - 1],
        right: &kmer[1..],
        next_base: Base::from_ascii(kmer[k - 1]),
    }
}
