//! Unary-encoded per-bucket active counts with rank/select.
//!
//! The input is split into `buckets` contiguous ranges of width
//! ⌈N/buckets⌉. The count vector holds, in input order, one 1-bit per
//! active element, with a 0-bit separating consecutive buckets: counts
//! (2, 0, 3) encode as 1100111. Select on the ones and on the zeros
//! (complement) turns an active's rank into its bucket and its position
//! among the bucket's in-filter elements.

use crate::bits::{BitBuffer, RsBitVector};
use crate::error::Result;
use crate::input::ReadOnlyArray;
use crate::pruning::FilterPair;
use crate::workspace::WorkspaceMeter;

pub struct CountVector {
    bits: RsBitVector,
    buckets: usize,
    bucket_width: usize,
}

/// Decoded location of the j-th active element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BucketPosition {
    /// Position of the j-th 1-bit in the count vector (a).
    pub select_pos: usize,
    /// 1-based bucket holding the element (u = a − j + 1).
    pub bucket: usize,
    /// Position of the 0-bit bordering buckets u−1 and u (z), absent
    /// for the first bucket.
    pub border: Option<usize>,
    /// Rank of the element among the bucket's in-filter elements (g).
    pub rank_in_bucket: usize,
}

impl CountVector {
    /// One input scan: emits a 1 for every element strictly inside the
    /// filters and a 0 at each bucket border. `active` must equal the
    /// number of in-filter elements (it sizes the buffer exactly).
    pub fn build(
        a: &ReadOnlyArray,
        filters: &FilterPair,
        buckets: usize,
        active: usize,
        meter: &WorkspaceMeter,
    ) -> Result<CountVector> {
        assert!(buckets >= 1);
        let n = a.len();
        let bucket_width = n.div_ceil(buckets);
        let mut buf = BitBuffer::new((active + buckets - 1) as u64, meter, "count-vector")?;
        let mut current_bucket = 1usize;
        for i in 1..=n {
            let b = (i - 1) / bucket_width + 1;
            while current_bucket < b {
                buf.push(false);
                current_bucket += 1;
            }
            let key = a.get(i);
            if filters.admits(a, &key) {
                buf.push(true);
            }
        }
        while current_bucket < buckets {
            buf.push(false);
            current_bucket += 1;
        }
        debug_assert_eq!(buf.len(), (active + buckets - 1) as u64);
        Ok(CountVector {
            bits: RsBitVector::build(buf, meter)?,
            buckets,
            bucket_width,
        })
    }

    /// Builds directly from per-bucket counts.
    pub fn from_counts(
        counts: &[usize],
        bucket_width: usize,
        meter: &WorkspaceMeter,
    ) -> Result<CountVector> {
        let buckets = counts.len();
        let total: usize = counts.iter().sum();
        let mut buf = BitBuffer::new((total + buckets - 1) as u64, meter, "count-vector")?;
        for (b, &c) in counts.iter().enumerate() {
            if b > 0 {
                buf.push(false);
            }
            for _ in 0..c {
                buf.push(true);
            }
        }
        Ok(CountVector {
            bits: RsBitVector::build(buf, meter)?,
            buckets,
            bucket_width,
        })
    }

    #[inline]
    pub fn buckets(&self) -> usize {
        self.buckets
    }

    #[inline]
    pub fn bucket_width(&self) -> usize {
        self.bucket_width
    }

    /// Number of active elements encoded.
    #[inline]
    pub fn active_total(&self) -> usize {
        self.bits.ones_total() as usize
    }

    /// 1-based input range `[first, last]` covered by bucket `u`.
    pub fn bucket_range(&self, u: usize, n: usize) -> (usize, usize) {
        let first = (u - 1) * self.bucket_width + 1;
        let last = usize::min(u * self.bucket_width, n);
        (first, last)
    }

    /// Bucket of a 1-based input index.
    #[inline]
    pub fn bucket_of(&self, input_index: usize) -> usize {
        (input_index - 1) / self.bucket_width + 1
    }

    /// Locates the j-th active element: select over the ones gives a,
    /// the bucket is u = a − j + 1, the border before it sits at
    /// z = complement-select(u−1), and the in-bucket rank is a − z
    /// (or a in the first bucket).
    pub fn locate(&self, j: usize) -> BucketPosition {
        let a = self.bits.select(j as u64) as usize;
        let u = a - j + 1;
        if u > 1 {
            let z = self.bits.complement_select((u - 1) as u64) as usize;
            BucketPosition {
                select_pos: a,
                bucket: u,
                border: Some(z),
                rank_in_bucket: a - z,
            }
        } else {
            BucketPosition {
                select_pos: a,
                bucket: 1,
                border: None,
                rank_in_bucket: a,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_counts_2_0_3() {
        let m = WorkspaceMeter::unlimited();
        let cv = CountVector::from_counts(&[2, 0, 3], 1, &m).unwrap();
        // Encoded as 1100111: S−1 = 2 zeros, 5 ones.
        assert_eq!(cv.active_total(), 5);
        let pos = cv.locate(3);
        assert_eq!(pos.select_pos, 5);
        assert_eq!(pos.bucket, 3);
        assert_eq!(pos.border, Some(4));
        assert_eq!(pos.rank_in_bucket, 1);
    }

    #[test]
    fn locate_first_bucket() {
        let m = WorkspaceMeter::unlimited();
        let cv = CountVector::from_counts(&[2, 0, 3], 1, &m).unwrap();
        let pos = cv.locate(2);
        assert_eq!(pos.select_pos, 2);
        assert_eq!(pos.bucket, 1);
        assert_eq!(pos.border, None);
        assert_eq!(pos.rank_in_bucket, 2);
    }

    #[test]
    fn build_matches_filtered_scan() {
        use crate::input::{generate, Distribution, GeneratorSpec};
        use crate::input::OrderedKey;
        let a = generate(&GeneratorSpec::new(200, 4, Distribution::UniformPermutation)).unwrap();
        let f = FilterPair {
            low: Some(OrderedKey {
                value: 50,
                index: a.values().iter().position(|&v| v == 50).unwrap() + 1,
            }),
            high: Some(OrderedKey {
                value: 151,
                index: a.values().iter().position(|&v| v == 151).unwrap() + 1,
            }),
        };
        let buckets = 16;
        let m = WorkspaceMeter::unlimited();
        let cv = CountVector::build(&a, &f, buckets, 100, &m).unwrap();
        assert_eq!(cv.active_total(), 100);
        // Every active's decoded bucket matches its input position.
        let mut j = 0;
        for i in 1..=a.len() {
            let v = a.values()[i - 1];
            if v > 50 && v < 151 {
                j += 1;
                let pos = cv.locate(j);
                assert_eq!(pos.bucket, cv.bucket_of(i), "active #{j} at input {i}");
            }
        }
    }
}
