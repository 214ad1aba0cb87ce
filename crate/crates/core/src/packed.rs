//! Fixed-width packed integer arrays.
//!
//! Indices into an N-element input cost ⌈lg(N+1)⌉ bits each, not a full
//! machine word; storing them packed is what keeps the algorithms inside
//! their bit budgets. [`IndexVec`] charges its storage to a meter;
//! [`PackedBits`] is the raw unmetered form used inside structures that
//! charge one combined region for several arrays.

use crate::error::Result;
use crate::workspace::{Region, WorkspaceMeter};

/// Number of bits needed to store any value in `0..=n`.
#[inline]
pub fn index_bits(n: usize) -> u32 {
    (usize::BITS - n.leading_zeros()).max(1)
}

/// Raw bounded array of `width`-bit unsigned values. Does not charge a
/// meter; the owner accounts for [`PackedBits::bit_size`].
pub(crate) struct PackedBits {
    words: Vec<u64>,
    width: u32,
    len: usize,
    cap: usize,
}

impl PackedBits {
    pub fn new(cap: usize, width: u32) -> Self {
        assert!(width >= 1 && width <= 64, "width {width} out of range");
        let bits = cap as u64 * width as u64;
        PackedBits {
            words: vec![0u64; (bits as usize).div_ceil(64)],
            width,
            len: 0,
            cap,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.cap
    }

    /// Storage footprint in bits (capacity, not fill level).
    pub fn bit_size(&self) -> u64 {
        self.cap as u64 * self.width as u64
    }

    #[inline]
    fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        assert!(i < self.len, "index {i} out of bounds (len={})", self.len);
        let off = i as u64 * self.width as u64;
        let word = (off / 64) as usize;
        let shift = (off % 64) as u32;
        let low = self.words[word] >> shift;
        let have = 64 - shift;
        let v = if have >= self.width {
            low
        } else {
            low | (self.words[word + 1] << have)
        };
        v & self.mask()
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u64) {
        assert!(i < self.len, "index {i} out of bounds (len={})", self.len);
        debug_assert!(
            v <= self.mask(),
            "value {v} does not fit in {} bits",
            self.width
        );
        let v = v & self.mask();
        let off = i as u64 * self.width as u64;
        let word = (off / 64) as usize;
        let shift = (off % 64) as u32;
        self.words[word] &= !(self.mask() << shift);
        self.words[word] |= v << shift;
        let have = 64 - shift;
        if have < self.width {
            let hi_bits = self.width - have;
            let hi_mask = (1u64 << hi_bits) - 1;
            self.words[word + 1] &= !hi_mask;
            self.words[word + 1] |= v >> have;
        }
    }

    #[inline]
    pub fn push(&mut self, v: u64) {
        assert!(self.len < self.cap, "capacity {} exceeded", self.cap);
        self.len += 1;
        self.set(self.len - 1, v);
    }

    pub fn clear(&mut self) {
        self.len = 0;
    }

    pub fn truncate(&mut self, len: usize) {
        assert!(len <= self.len);
        self.len = len;
    }
}

/// A metered bounded array of `width`-bit unsigned values.
pub struct IndexVec {
    inner: PackedBits,
    _region: Region,
}

impl IndexVec {
    pub fn with_capacity(
        cap: usize,
        width: u32,
        meter: &WorkspaceMeter,
        label: &str,
    ) -> Result<Self> {
        let inner = PackedBits::new(cap, width);
        let region = meter.allocate(inner.bit_size(), label)?;
        Ok(IndexVec {
            inner,
            _region: region,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.inner.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.inner.len() == 0
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.inner.capacity()
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.inner.width
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.inner.get(i)
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u64) {
        self.inner.set(i, v)
    }

    #[inline]
    pub fn push(&mut self, v: u64) {
        self.inner.push(v)
    }

    #[inline]
    pub fn swap(&mut self, i: usize, j: usize) {
        if i != j {
            let a = self.inner.get(i);
            let b = self.inner.get(j);
            self.inner.set(i, b);
            self.inner.set(j, a);
        }
    }

    pub fn clear(&mut self) {
        self.inner.clear();
    }

    pub fn truncate(&mut self, len: usize) {
        assert!(len <= self.inner.len);
        self.inner.len = len;
    }
}
