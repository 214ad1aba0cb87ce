//! In-workspace linear-time selection over an index array.
//!
//! Deterministic median-of-medians with groups of 5. The element values
//! stay in the read-only input; the workspace holds packed indices plus
//! a charged constant-size frame per recursion level. Comparisons and
//! reads go through the instrumented array, so callers can assert the
//! O(length) bound.

use crate::error::Result;
use crate::input::{OrderedKey, ReadOnlyArray};
use crate::packed::IndexVec;
use crate::workspace::WorkspaceMeter;

/// Declared cost of one activation record (four words).
const FRAME_BITS: u64 = 256;

/// Ranges at or below this length are finished by selection sort.
const SMALL: usize = 32;

/// Input index of the k-th smallest element among `indices[0..len)`.
///
/// The index array is permuted: afterwards the k-th smallest sits at
/// position k-1, everything before it is smaller, everything after it
/// larger.
pub fn select_among(
    indices: &mut IndexVec,
    a: &ReadOnlyArray,
    k: usize,
    meter: &WorkspaceMeter,
) -> Result<usize> {
    assert!(
        k >= 1 && k <= indices.len(),
        "k={k} out of range (len={})",
        indices.len()
    );
    select_range(indices, a, 0, indices.len(), k, meter)
}

/// Sorts `indices` ascending (tie-broken order) by repeatedly selecting
/// the minimum of the remaining suffix.
pub(crate) fn sort_by_rank(
    indices: &mut IndexVec,
    a: &ReadOnlyArray,
    meter: &WorkspaceMeter,
) -> Result<()> {
    let len = indices.len();
    for pos in 0..len.saturating_sub(1) {
        select_range(indices, a, pos, len, 1, meter)?;
    }
    Ok(())
}

fn select_range(
    v: &mut IndexVec,
    a: &ReadOnlyArray,
    mut lo: usize,
    mut hi: usize,
    mut k: usize,
    meter: &WorkspaceMeter,
) -> Result<usize> {
    let _frame = meter.allocate(FRAME_BITS, "baseline-frame")?;
    loop {
        let len = hi - lo;
        debug_assert!(k >= 1 && k <= len);
        if len <= SMALL {
            selection_sort(v, a, lo, hi);
            return Ok(v.get(lo + k - 1) as usize);
        }

        // Medians of fives, swapped to the front of the range.
        let mut m = lo;
        let mut i = lo;
        while i < hi {
            let glen = usize::min(5, hi - i);
            let med = median_offset(v, a, i, glen);
            v.swap(m, i + med);
            m += 1;
            i += 5;
        }
        let groups = m - lo;

        let pivot_idx = select_range(v, a, lo, lo + groups, groups.div_ceil(2), meter)?;
        let pivot = a.get(pivot_idx);

        // Move the pivot to the end, then Lomuto partition. Keys are
        // distinct under the tie-broken order, so the pivot's rank is
        // exact.
        let mut pivot_pos = lo;
        while v.get(pivot_pos) as usize != pivot_idx {
            pivot_pos += 1;
        }
        v.swap(pivot_pos, hi - 1);
        let mut store = lo;
        for p in lo..hi - 1 {
            let key = a.get(v.get(p) as usize);
            if a.key_less(&key, &pivot) {
                v.swap(p, store);
                store += 1;
            }
        }
        v.swap(store, hi - 1);
        let rank = store - lo + 1;

        if k == rank {
            return Ok(pivot_idx);
        } else if k < rank {
            hi = lo + rank - 1;
        } else {
            k -= rank;
            lo += rank;
        }
    }
}

fn selection_sort(v: &mut IndexVec, a: &ReadOnlyArray, lo: usize, hi: usize) {
    for i in lo..hi.saturating_sub(1) {
        let mut best = i;
        let mut best_key = a.get(v.get(i) as usize);
        for j in i + 1..hi {
            let key = a.get(v.get(j) as usize);
            if a.key_less(&key, &best_key) {
                best = j;
                best_key = key;
            }
        }
        v.swap(i, best);
    }
}

/// Offset (within the group) of the lower median of the `glen ≤ 5`
/// elements starting at `start`.
fn median_offset(v: &IndexVec, a: &ReadOnlyArray, start: usize, glen: usize) -> usize {
    let mut keys: [(OrderedKey, usize); 5] = [(OrderedKey { value: 0, index: 0 }, 0); 5];
    for off in 0..glen {
        keys[off] = (a.get(v.get(start + off) as usize), off);
    }
    // Insertion sort of at most five entries.
    for i in 1..glen {
        let mut j = i;
        while j > 0 && a.key_less(&keys[j].0, &keys[j - 1].0) {
            keys.swap(j, j - 1);
            j -= 1;
        }
    }
    keys[glen.div_ceil(2) - 1].1
}
