//! Linear-time selection in Θ(N) bits.
//!
//! Every round pushes a survival mask onto a wavelet stack instead of
//! storing indices. The actives are split into equal-sized groups small
//! enough that one group's indices fit in the workspace; the median of
//! the group medians partitions the actives, one classification sweep
//! counts the smaller side and records the "smaller than pivot" mask,
//! and flipping that mask word-parallel yields the other branch. Once
//! at most ⌈N/lg N⌉ actives remain, their indices are copied out and a
//! standard in-workspace selection finishes.

use crate::bits::BitBuffer;
use crate::constants::PRUNE_SLACK;
use crate::error::{Error, Result};
use crate::packed::{index_bits, IndexVec};
use crate::selection::baseline;
use crate::selection::{RoundRecord, RunCtx};
use crate::wavelet::WaveletStack;

/// Group count for `n` actives: enough groups that each group's indices
/// fit in `cap` entries, sizes within one of each other so the
/// median-of-medians guarantee carries only an O(groups) additive term.
pub(super) fn group_count(n: usize, cap: usize) -> usize {
    n.div_ceil(cap).max(1)
}

pub(super) fn run(ctx: &mut RunCtx, k: usize) -> Result<usize> {
    let a = ctx.a;
    let n_input = a.len();
    if n_input == 1 {
        return Ok(1);
    }
    let width = index_bits(n_input);
    let lg = (n_input as f64).log2();
    let group_cap = (n_input as f64 / lg).ceil() as usize;
    let prune_limit = |n: usize| 3 * n / 4 + (PRUNE_SLACK * index_bits(n_input) as u64) as usize;

    let mut k_run = k;
    let mut stack = WaveletStack::with_shrink_exemption(n_input, ctx.meter, group_cap)?;
    let mut group = IndexVec::with_capacity(group_cap, width, ctx.meter, "group-indices")?;
    let mut medians = IndexVec::with_capacity(
        n_input.div_ceil(group_cap) + 1,
        width,
        ctx.meter,
        "median-indices",
    )?;

    loop {
        let n = stack.active_count();
        if n <= group_cap {
            break;
        }

        // Group medians, walking the actives in input order.
        medians.clear();
        let groups = group_count(n, group_cap);
        let (base, extra) = (n / groups, n % groups);
        let mut j = 1usize;
        for g in 0..groups {
            let glen = base + usize::from(g < extra);
            group.clear();
            for t in 0..glen {
                group.push(stack.index(j + t) as u64);
            }
            let med = baseline::select_among(&mut group, a, glen.div_ceil(2), ctx.meter)?;
            medians.push(med as u64);
            j += glen;
        }
        ctx.passes += 1;
        let mu_idx =
            { let mid = medians.len().div_ceil(2); baseline::select_among(&mut medians, a, mid, ctx.meter)? };
        let mu = a.get(mu_idx);

        // One sweep: count actives below the pivot and record them.
        let mut mask = BitBuffer::new(n as u64, ctx.meter, &stack.next_level_label())?;
        let mut sigma = 0usize;
        let mut mu_pos = 0usize;
        for j in 1..=n {
            let idx = stack.index(j);
            if idx == mu_idx {
                mu_pos = j;
                mask.push(false);
                continue;
            }
            let key = a.get(idx);
            let less = a.key_less(&key, &mu);
            mask.push(less);
            sigma += usize::from(less);
        }
        ctx.passes += 1;
        debug_assert!(mu_pos >= 1);

        if k_run == sigma + 1 {
            return Ok(mu_idx);
        }
        let survivors = if k_run <= sigma { sigma } else { n - sigma - 1 };
        ctx.diag.rounds.push(RoundRecord {
            active_before: n,
            survivors,
        });
        if survivors > prune_limit(n) {
            return Err(Error::InvariantViolation(format!(
                "pruning rate: {survivors} of {n} survive a round"
            )));
        }
        if k_run <= sigma {
            // The "< pivot" mask is the survival mask.
        } else {
            mask.flip_all();
            mask.clear_bit(mu_pos as u64);
            k_run -= sigma + 1;
        }
        stack.push_level(mask)?;
    }

    // Endgame: indices fit in the workspace now.
    let n = stack.active_count();
    let mut endgame = IndexVec::with_capacity(n, width, ctx.meter, "endgame-indices")?;
    for j in 1..=n {
        endgame.push(stack.index(j) as u64);
    }
    ctx.passes += 1;
    drop(stack);
    baseline::select_among(&mut endgame, a, k_run, ctx.meter)
}
