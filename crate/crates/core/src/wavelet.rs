//! Wavelet stack: survival history of a prune-and-search run.
//!
//! A stack of rank/select bit vectors. The bottom level has one bit per
//! input element; each pushed level has one bit per element that was
//! still active below, so the vectors shrink as pruning progresses.
//! `is_active` walks rank queries bottom-up, `index` walks selects
//! top-down, both in O(height). The point of the structure is that
//! membership of the shrinking active set costs a constant number of
//! bits per element instead of an index's ⌈lg N⌉ bits.

use std::cell::Cell;

use crate::bits::{BitBuffer, RsBitVector};
use crate::constants::{STACK_SHRINK_DEN, STACK_SHRINK_NUM};
use crate::error::{Error, Result};
use crate::workspace::{Region, WorkspaceMeter};

pub struct WaveletStack {
    levels: Vec<RsBitVector>,
    base_len: usize,
    /// One offset word per level; re-charged as the stack grows.
    header: Option<Region>,
    meter: WorkspaceMeter,
    /// Levels may stop shrinking geometrically once the active count is
    /// at or below this; larger levels that shrink too slowly are
    /// counted as violations.
    shrink_exempt_below: usize,
    geometry_violations: Cell<u32>,
    level_visits: Cell<u64>,
}

impl WaveletStack {
    /// Stack over `n` elements, all active.
    pub fn create(n: usize, meter: &WorkspaceMeter) -> Result<Self> {
        let lg = (n.max(2) as f64).log2();
        Self::with_shrink_exemption(n, meter, (n as f64 / lg).ceil() as usize)
    }

    /// As [`WaveletStack::create`], with an explicit geometric-shrink
    /// exemption threshold for callers whose pruning guarantee carries
    /// an additive term relative to a different input size.
    pub fn with_shrink_exemption(
        n: usize,
        meter: &WorkspaceMeter,
        shrink_exempt_below: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter(
                "wavelet stack needs at least one element".to_string(),
            ));
        }
        let bottom = BitBuffer::all_ones(n as u64, meter, "wavelet-level-1")?;
        let bottom = RsBitVector::build(bottom, meter)?;
        let header = meter.allocate(64, "wavelet-header")?;
        Ok(WaveletStack {
            levels: vec![bottom],
            base_len: n,
            header: Some(header),
            meter: meter.clone(),
            shrink_exempt_below,
            geometry_violations: Cell::new(0),
            level_visits: Cell::new(0),
        })
    }

    #[inline]
    pub fn base_len(&self) -> usize {
        self.base_len
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Number of currently active elements (1-count of the top level).
    #[inline]
    pub fn active_count(&self) -> usize {
        self.levels.last().unwrap().ones_total() as usize
    }

    /// A label for the next level's bit buffer; pass the buffer built
    /// under it to [`WaveletStack::push_level`].
    pub fn next_level_label(&self) -> String {
        format!("wavelet-level-{}", self.levels.len() + 1)
    }

    /// Pushes a survival mask: bit j says whether the j-th currently
    /// active element stays active. The mask length must equal
    /// [`WaveletStack::active_count`] and at least one bit must be set.
    pub fn push_level(&mut self, mask: BitBuffer) -> Result<()> {
        let prev = self.active_count();
        assert_eq!(
            mask.len() as usize,
            prev,
            "mask length {} does not match active count {prev}",
            mask.len()
        );
        let ones = mask.count_ones() as usize;
        if ones == 0 {
            return Err(Error::EmptyLevel);
        }
        if prev > self.shrink_exempt_below
            && ones as u64 * STACK_SHRINK_DEN > prev as u64 * STACK_SHRINK_NUM
        {
            self.geometry_violations
                .set(self.geometry_violations.get() + 1);
        }
        let level = RsBitVector::build(mask, &self.meter)?;
        self.levels.push(level);
        self.header = None; // release before re-charging at the new size
        self.header = Some(
            self.meter
                .allocate(self.levels.len() as u64 * 64, "wavelet-header")?,
        );
        Ok(())
    }

    /// Whether input element `i` (1-based) is active at the top level.
    pub fn is_active(&self, i: usize) -> bool {
        assert!(
            i >= 1 && i <= self.base_len,
            "element {i} out of bounds (N={})",
            self.base_len
        );
        let mut pos = i as u64;
        for level in &self.levels {
            self.level_visits.set(self.level_visits.get() + 1);
            if !level.access(pos) {
                return false;
            }
            pos = level.rank(pos);
        }
        true
    }

    /// Input index of the j-th active element, in left-to-right order.
    ///
    /// Panics if there are fewer active elements than `j`.
    pub fn index(&self, j: usize) -> usize {
        assert!(
            j >= 1 && j <= self.active_count(),
            "fewer active elements than j={j} (active={})",
            self.active_count()
        );
        let mut pos = j as u64;
        for level in self.levels.iter().rev() {
            self.level_visits.set(self.level_visits.get() + 1);
            pos = level.select(pos);
        }
        pos as usize
    }

    /// Times a level answered a rank/access/select during `is_active`
    /// or `index`; query-cost instrumentation for tests.
    pub fn level_visits(&self) -> u64 {
        self.level_visits.get()
    }

    /// Pushed levels that broke the geometric-shrink condition.
    pub fn geometry_violations(&self) -> u32 {
        self.geometry_violations.get()
    }

    /// Metered footprint: level bits, their rank/select support, and
    /// the header.
    pub fn total_bits(&self) -> u64 {
        let levels: u64 = self
            .levels
            .iter()
            .map(|l| l.len().div_ceil(64) * 64 + l.support_bits())
            .sum();
        levels + self.levels.len() as u64 * 64
    }
}
