//! Selection sized to Θ(S) bits of workspace.
//!
//! For budgets up to ⌈√(N·lg N)⌉ the pruning engine runs to completion
//! and the survivors' indices fit directly in the workspace. Larger
//! budgets first reduce the active count to at most S, then build a
//! count vector over S input buckets and a wavelet stack over the ≤ S
//! survivors. Median-of-medians rounds then prune the stack; each round
//! enumerates the actives without stored indices by decoding, per
//! active, its bucket and in-bucket rank from the count vector and
//! scanning that bucket — continuing a scan, not restarting it, when
//! consecutive actives share a bucket. Once the survivors collapse into
//! one bucket (or few enough remain), their indices are copied out and
//! the baseline selector finishes.

use crate::bits::BitBuffer;
use crate::error::{Error, Result};
use crate::input::{OrderedKey, ReadOnlyArray};
use crate::packed::{index_bits, IndexVec};
use crate::pruning::{reduce_to_s, FilterPair, PruneTrace, ReduceOutcome};
use crate::selection::baseline;
use crate::selection::count_vector::CountVector;
use crate::selection::linear_bits::group_count;
use crate::selection::{RoundRecord, RunCtx};
use crate::wavelet::WaveletStack;

pub(super) fn run(ctx: &mut RunCtx, k: usize, s_bits: u64) -> Result<usize> {
    let a = ctx.a;
    let n_input = a.len();
    if n_input == 1 {
        return Ok(1);
    }
    let width = index_bits(n_input);
    // Actives whose packed indices fill no more than half the budget
    // are finished directly in workspace.
    let endgame_cap = usize::max(64, (s_bits / (2 * width as u64)) as usize);
    let sqrt_threshold = ((n_input as f64) * (n_input as f64).log2()).sqrt().ceil() as u64;

    let mut trace = PruneTrace::default();
    let outcome = if s_bits <= sqrt_threshold {
        // Small budget: prune all the way down with sampling passes.
        reduce_to_s(a, k, s_bits, endgame_cap, ctx.meter, &mut trace)?
    } else {
        reduce_to_s(
            a,
            k,
            s_bits,
            usize::min(s_bits as usize, n_input),
            ctx.meter,
            &mut trace,
        )?
    };
    ctx.passes += trace.passes;
    ctx.diag.filter_trace = trace.snapshots;

    let (filters, mut k_run, n_active) = match outcome {
        ReduceOutcome::Answer(idx) => return Ok(idx),
        ReduceOutcome::Reduced { filters, k, active } => (filters, k, active),
    };

    if n_active <= endgame_cap {
        return finish_by_scan(ctx, &filters, k_run, n_active);
    }

    // Bucket stage: count vector over min(S, N) buckets plus a wavelet
    // stack over the survivors.
    let buckets = usize::min(s_bits as usize, n_input);
    let cvec = CountVector::build(a, &filters, buckets, n_active, ctx.meter)?;
    ctx.passes += 1;
    let mut stack = WaveletStack::create(n_active, ctx.meter)?;
    let group_cap = usize::max(5, (s_bits / (4 * width as u64)) as usize);
    let mut group = IndexVec::with_capacity(
        usize::min(group_cap, n_active),
        width,
        ctx.meter,
        "group-indices",
    )?;
    let mut medians = IndexVec::with_capacity(
        n_active.div_ceil(group_cap) + 1,
        width,
        ctx.meter,
        "median-indices",
    )?;

    loop {
        let n = stack.active_count();
        if n <= endgame_cap {
            break;
        }

        // Group medians via bucket-decoded enumeration.
        medians.clear();
        let mut cursor = BucketCursor::new(a, &filters, &cvec);
        let groups = group_count(n, group_cap);
        let (base, extra) = (n / groups, n % groups);
        let mut j = 1usize;
        for g in 0..groups {
            let glen = base + usize::from(g < extra);
            group.clear();
            for t in 0..glen {
                let (idx, _key) = cursor.locate(stack.index(j + t))?;
                group.push(idx as u64);
            }
            let med = baseline::select_among(&mut group, a, glen.div_ceil(2), ctx.meter)?;
            medians.push(med as u64);
            j += glen;
        }
        ctx.passes += 1;
        ctx.diag.bucket_scan_reads += cursor.scan_reads;
        let mu_idx =
            { let mid = medians.len().div_ceil(2); baseline::select_among(&mut medians, a, mid, ctx.meter)? };
        let mu = a.get(mu_idx);

        // Classification sweep: σ, the "< pivot" mask, and the
        // survivor extent for the one-bucket test.
        let mut cursor = BucketCursor::new(a, &filters, &cvec);
        let mut mask = BitBuffer::new(n as u64, ctx.meter, &stack.next_level_label())?;
        let mut sigma = 0usize;
        let mut mu_pos = 0usize;
        let mut less_span: Option<(usize, usize)> = None;
        let mut greater_span: Option<(usize, usize)> = None;
        for j in 1..=n {
            let (idx, key) = cursor.locate(stack.index(j))?;
            if idx == mu_idx {
                mu_pos = j;
                mask.push(false);
                continue;
            }
            let less = a.key_less(&key, &mu);
            mask.push(less);
            let span = if less { &mut less_span } else { &mut greater_span };
            *span = Some(match span {
                None => (idx, idx),
                Some((first, _)) => (*first, idx),
            });
            sigma += usize::from(less);
        }
        ctx.passes += 1;
        ctx.diag.bucket_scan_reads += cursor.scan_reads;
        debug_assert!(mu_pos >= 1);

        if k_run == sigma + 1 {
            return Ok(mu_idx);
        }
        let (survivors, span) = if k_run <= sigma {
            (sigma, less_span)
        } else {
            (n - sigma - 1, greater_span)
        };
        ctx.diag.rounds.push(RoundRecord {
            active_before: n,
            survivors,
        });
        if survivors >= n {
            return Err(Error::InvariantViolation(format!(
                "bucket round made no progress at n={n}"
            )));
        }
        if k_run <= sigma {
            // Keep the "< pivot" mask.
        } else {
            mask.flip_all();
            mask.clear_bit(mu_pos as u64);
            k_run -= sigma + 1;
        }
        stack.push_level(mask)?;

        let (first, last) = span.expect("at least one survivor");
        if cvec.bucket_of(first) == cvec.bucket_of(last) {
            break;
        }
    }

    // Endgame: copy the survivors' indices out of the bucket encoding.
    let n = stack.active_count();
    let mut endgame = IndexVec::with_capacity(n, width, ctx.meter, "endgame-indices")?;
    let mut cursor = BucketCursor::new(a, &filters, &cvec);
    for j in 1..=n {
        let (idx, _key) = cursor.locate(stack.index(j))?;
        endgame.push(idx as u64);
    }
    ctx.passes += 1;
    ctx.diag.bucket_scan_reads += cursor.scan_reads;
    drop(stack);
    drop(cvec);
    baseline::select_among(&mut endgame, a, k_run, ctx.meter)
}

/// Collects the in-filter elements (there are `active` of them) and
/// selects directly.
fn finish_by_scan(
    ctx: &mut RunCtx,
    filters: &FilterPair,
    k: usize,
    active: usize,
) -> Result<usize> {
    let a = ctx.a;
    let n = a.len();
    let mut indices =
        IndexVec::with_capacity(active, index_bits(n), ctx.meter, "endgame-indices")?;
    for i in 1..=n {
        let key = a.get(i);
        if filters.admits(a, &key) {
            indices.push(i as u64);
        }
    }
    ctx.passes += 1;
    debug_assert_eq!(indices.len(), active);
    baseline::select_among(&mut indices, a, k, ctx.meter)
}

/// Sequentially locates actives by their rank among the base survivors,
/// resuming the current bucket's scan when consecutive queries fall in
/// the same bucket.
struct BucketCursor<'a> {
    a: &'a ReadOnlyArray,
    filters: &'a FilterPair,
    cvec: &'a CountVector,
    last_bucket: usize,
    last_input_pos: usize,
    last_rank: usize,
    scan_reads: u64,
}

impl<'a> BucketCursor<'a> {
    fn new(a: &'a ReadOnlyArray, filters: &'a FilterPair, cvec: &'a CountVector) -> Self {
        BucketCursor {
            a,
            filters,
            cvec,
            last_bucket: 0,
            last_input_pos: 0,
            last_rank: 0,
            scan_reads: 0,
        }
    }

    /// Input index and key of the base survivor with rank `j0` among
    /// all base survivors (1-based, ascending across calls within a
    /// bucket).
    fn locate(&mut self, j0: usize) -> Result<(usize, OrderedKey)> {
        let pos = self.cvec.locate(j0);
        let (first, last) = self.cvec.bucket_range(pos.bucket, self.a.len());
        let (mut at, mut counted) =
            if pos.bucket == self.last_bucket && pos.rank_in_bucket > self.last_rank {
                (self.last_input_pos + 1, self.last_rank)
            } else {
                (first, 0)
            };
        while at <= last {
            let key = self.a.get(at);
            self.scan_reads += 1;
            if self.filters.admits(self.a, &key) {
                counted += 1;
                if counted == pos.rank_in_bucket {
                    self.last_bucket = pos.bucket;
                    self.last_input_pos = at;
                    self.last_rank = counted;
                    return Ok((at, key));
                }
            }
            at += 1;
        }
        Err(Error::InvariantViolation(format!(
            "bucket {} ran out before rank {}",
            pos.bucket, pos.rank_in_bucket
        )))
    }
}

#[cfg(test)]
mod tests {
    use crate::input::{generate, Distribution, GeneratorSpec, ReadOnlyArray};
    use crate::oracle::oracle_select;
    use crate::selection::{select_general, select_linear_bits};
    use crate::workspace::WorkspaceMeter;

    #[test]
    fn agrees_with_linear_bits_at_s_equals_n() {
        let n = 1 << 12;
        for seed in 0..3 {
            let a = generate(&GeneratorSpec::new(
                n,
                seed,
                Distribution::UniformPermutation,
            ))
            .unwrap();
            for k in [1, n / 2, n] {
                let m1 = WorkspaceMeter::unlimited();
                let m2 = WorkspaceMeter::unlimited();
                let r1 = select_general(&a, k, n as u64, &m1).unwrap();
                let r2 = select_linear_bits(&a, k, &m2).unwrap();
                assert_eq!(r1.answer_index, r2.answer_index, "seed={seed} k={k}");
            }
        }
    }

    #[test]
    fn matches_oracle_across_budgets() {
        let n = 1 << 13;
        let lg = (n as f64).log2();
        let budgets = [
            (lg * lg * lg) as u64 + 1,
            n as u64 / 2,
            n as u64,
            4 * n as u64,
        ];
        for seed in 0..2 {
            for dist in [Distribution::UniformPermutation, Distribution::FewDistinct] {
                let a = generate(&GeneratorSpec::new(n, seed, dist)).unwrap();
                for &s in &budgets {
                    for k in [1, n / 3, n / 2, n] {
                        let m = WorkspaceMeter::unlimited();
                        let r = select_general(&a, k, s, &m).unwrap();
                        assert_eq!(
                            r.answer_index,
                            oracle_select(a.values(), k),
                            "seed={seed} s={s} k={k} dist={dist:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tiny_inputs() {
        for n in 1usize..=8 {
            let a = generate(&GeneratorSpec::new(n, 5, Distribution::FewDistinct)).unwrap();
            for k in 1..=n {
                let m = WorkspaceMeter::unlimited();
                let s = u64::max(n as u64, 512);
                let r = select_general(&a, k, s, &m).unwrap();
                assert_eq!(r.answer_index, oracle_select(a.values(), k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn pure_pruning_branch_matches_oracle() {
        // Budgets at or below ⌈√(N·lg N)⌉ skip the bucket stage and run
        // the pruning engine to completion. Legal budgets only reach
        // that branch at very large N, so drive the internal entry
        // point directly.
        let n = 1 << 12;
        let a = generate(&GeneratorSpec::new(n, 8, Distribution::UniformPermutation)).unwrap();
        let sqrt_threshold = ((n as f64) * (n as f64).log2()).sqrt().ceil() as u64;
        for k in [1, n / 2, n] {
            let m = WorkspaceMeter::unlimited();
            let mut ctx = crate::selection::RunCtx {
                a: &a,
                meter: &m,
                passes: 0,
                diag: Default::default(),
            };
            let got = super::run(&mut ctx, k, sqrt_threshold).unwrap();
            assert_eq!(got, oracle_select(a.values(), k), "k={k}");
        }
    }

    #[test]
    fn budget_below_cube_rejected() {
        let a = ReadOnlyArray::from_values((1..=1000).collect()).unwrap();
        let m = WorkspaceMeter::unlimited();
        assert!(select_general(&a, 5, 100, &m).is_err());
    }

    #[test]
    fn peak_tracks_budget_parameter() {
        let c = crate::constants::GENERAL_PEAK_FACTOR;
        let n = 1 << 14;
        let a = generate(&GeneratorSpec::new(n, 2, Distribution::UniformPermutation)).unwrap();
        let lg = (n as f64).log2();
        for s in [(8.0 * lg * lg * lg) as u64, n as u64 / 4, n as u64] {
            let m = WorkspaceMeter::unlimited();
            let r = select_general(&a, n / 2, s, &m).unwrap();
            assert!(
                r.stats.peak_workspace_bits <= c * s,
                "peak {} above {c}·{s}",
                r.stats.peak_workspace_bits
            );
        }
    }
}
