//! Zone-based selection in O(lg²N) bits.
//!
//! Recursion on (segment, filters, k): split the segment into 16 zones,
//! find the zone with the most active elements, recursively select that
//! zone's active median, classify the whole segment against it, update
//! a filter and k, and continue on the same segment (the second call is
//! the loop). Each combined step removes at least 1/(2·16) of the
//! actives, so the recursion depth stays logarithmic, and a frame costs
//! a constant number of words.

use crate::constants::{LOGSQ_BASE_CASE, ZONE_COUNT};
use crate::error::{Error, Result};
use crate::input::ReadOnlyArray;
use crate::packed::{index_bits, IndexVec};
use crate::pruning::FilterPair;
use crate::selection::baseline;
use crate::selection::RunCtx;
use crate::workspace::WorkspaceMeter;

/// Declared cost of one recursion frame: segment bounds, two filters
/// (value and index each), k, and the call-phase bit, in eight words.
const ZONE_FRAME_BITS: u64 = 512;

pub(super) fn run(ctx: &mut RunCtx, k: usize) -> Result<usize> {
    let a = ctx.a;
    let n = a.len();
    if n == 1 {
        return Ok(1);
    }
    // Initialize the filters to the minimum and maximum.
    let mut min_key = a.get(1);
    let mut max_key = min_key;
    for i in 2..=n {
        let key = a.get(i);
        if a.key_less(&key, &min_key) {
            min_key = key;
        } else if a.key_less(&max_key, &key) {
            max_key = key;
        }
    }
    ctx.passes += 1;
    if k == 1 {
        return Ok(min_key.index);
    }
    if k == n {
        return Ok(max_key.index);
    }
    let mut scratch = IndexVec::with_capacity(
        LOGSQ_BASE_CASE,
        index_bits(n),
        ctx.meter,
        "logsq-base",
    )?;
    let filters = FilterPair {
        low: Some(min_key),
        high: Some(max_key),
    };
    recurse(
        a, ctx.meter, 1, n, filters, k - 1, n - 2, &mut scratch, &mut ctx.passes,
    )
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    a: &ReadOnlyArray,
    meter: &WorkspaceMeter,
    first: usize,
    last: usize,
    mut filters: FilterPair,
    mut k: usize,
    mut n_active: usize,
    scratch: &mut IndexVec,
    passes: &mut u64,
) -> Result<usize> {
    let _frame = meter.allocate(ZONE_FRAME_BITS, "zone-frame")?;
    loop {
        debug_assert!(k >= 1 && k <= n_active);
        if n_active < LOGSQ_BASE_CASE {
            scratch.clear();
            for i in first..=last {
                let key = a.get(i);
                if filters.admits(a, &key) {
                    scratch.push(i as u64);
                }
            }
            *passes += 1;
            debug_assert_eq!(scratch.len(), n_active);
            return baseline::select_among(scratch, a, k, meter);
        }

        // Count actives per zone; ties go to the leftmost zone.
        let seg_len = last - first + 1;
        let zone_len = seg_len.div_ceil(ZONE_COUNT);
        let mut counts = [0usize; ZONE_COUNT];
        for i in first..=last {
            let key = a.get(i);
            if filters.admits(a, &key) {
                counts[(i - first) / zone_len] += 1;
            }
        }
        *passes += 1;
        let mut heavy = 0;
        for (z, &c) in counts.iter().enumerate() {
            if c > counts[heavy] {
                heavy = z;
            }
        }
        let n_heavy = counts[heavy];
        debug_assert!(n_heavy >= 1);
        let heavy_first = first + heavy * zone_len;
        let heavy_last = usize::min(heavy_first + zone_len - 1, last);

        // First call: the heavy zone's active median.
        let med_idx = recurse(
            a,
            meter,
            heavy_first,
            heavy_last,
            filters.clone(),
            n_heavy.div_ceil(2),
            n_heavy,
            scratch,
            passes,
        )?;
        let med = a.get(med_idx);

        // Classify the segment against the median.
        let mut sigma = 0usize;
        for i in first..=last {
            let key = a.get(i);
            if filters.admits(a, &key) && a.key_less(&key, &med) {
                sigma += 1;
            }
        }
        *passes += 1;

        if k == sigma + 1 {
            return Ok(med_idx);
        }
        let n_before = n_active;
        if k <= sigma {
            filters.high = Some(med);
            n_active = sigma;
        } else {
            filters.low = Some(med);
            k -= sigma + 1;
            n_active -= sigma + 1;
        }
        let removed = n_before - n_active;
        if removed < usize::max(1, n_before / (2 * ZONE_COUNT)) {
            return Err(Error::InvariantViolation(format!(
                "zone step removed {removed} of {n_before} actives"
            )));
        }
        // Second call on the same segment = next loop iteration.
    }
}
