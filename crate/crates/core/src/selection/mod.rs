//! The selection algorithms.
//!
//! Four entry points share one contract: given an instrumented
//! read-only array and a rank k, return the 1-based input index of the
//! k-th smallest element under the tie-broken order, charging all
//! workspace to the caller's meter.
//!
//! * [`baseline_select`] — classic linear-time selection over a full
//!   index array (Θ(N·lg N) bits of workspace).
//! * [`select_log_squared`] — zone-based recursion in O(lg²N) bits.
//! * [`select_linear_bits`] — linear time in Θ(N) bits, tracking the
//!   active set with a wavelet stack.
//! * [`select_general`] — Θ(S) bits for lg³N ≤ S, pruning down to S
//!   candidates and finishing through a bucket count vector.
//!
//! The `passes` statistic counts traversals that touch a constant
//! fraction of the input or of the current active set: input scans,
//! group/median sweeps, classification sweeps, and endgame copies.

pub mod baseline;
mod count_vector;
mod general;
mod linear_bits;
mod logsq;

pub use count_vector::{BucketPosition, CountVector};

use std::time::{Duration, Instant};

use crate::constants::LINEAR_BITS_PEAK_FACTOR;
use crate::error::{Error, Result};
use crate::input::ReadOnlyArray;
use crate::packed::{index_bits, IndexVec};
use crate::pruning::FilterSnapshot;
use crate::workspace::WorkspaceMeter;

/// Counters of one selection run.
#[derive(Debug, Clone, Default)]
pub struct SelectionStats {
    pub comparisons: u64,
    pub reads: u64,
    pub passes: u64,
    pub peak_workspace_bits: u64,
    pub elapsed: Duration,
}

/// Active count before and after one pruning round.
#[derive(Debug, Clone, Copy)]
pub struct RoundRecord {
    pub active_before: usize,
    pub survivors: usize,
}

/// Instrumentation beyond the headline stats; not part of the metered
/// workspace (observer state, like the stats themselves).
#[derive(Debug, Clone, Default)]
pub struct RunDiagnostics {
    pub rounds: Vec<RoundRecord>,
    pub filter_trace: Vec<FilterSnapshot>,
    /// Element reads spent scanning buckets (budgeted algorithm only).
    pub bucket_scan_reads: u64,
}

#[derive(Debug)]
pub struct SelectionResult {
    /// 1-based input index of the k-th smallest element.
    pub answer_index: usize,
    pub answer_value: i64,
    pub stats: SelectionStats,
    pub diag: RunDiagnostics,
}

pub(crate) struct RunCtx<'a> {
    pub a: &'a ReadOnlyArray,
    pub meter: &'a WorkspaceMeter,
    pub passes: u64,
    pub diag: RunDiagnostics,
}

fn instrumented<F>(a: &ReadOnlyArray, meter: &WorkspaceMeter, run: F) -> Result<SelectionResult>
where
    F: FnOnce(&mut RunCtx) -> Result<usize>,
{
    let reads_before = a.reads();
    let cmps_before = a.comparisons();
    let start = Instant::now();
    let mut ctx = RunCtx {
        a,
        meter,
        passes: 0,
        diag: RunDiagnostics::default(),
    };
    let answer_index = run(&mut ctx)?;
    let elapsed = start.elapsed();
    // Reporting read, outside the instrumented run.
    let answer_value = a.values()[answer_index - 1];
    Ok(SelectionResult {
        answer_index,
        answer_value,
        stats: SelectionStats {
            comparisons: a.comparisons() - cmps_before,
            reads: a.reads() - reads_before,
            passes: ctx.passes,
            peak_workspace_bits: meter.peak_bits(),
            elapsed,
        },
        diag: ctx.diag,
    })
}

fn check_rank(a: &ReadOnlyArray, k: usize) -> Result<()> {
    if k < 1 || k > a.len() {
        return Err(Error::Parameter(format!(
            "k={k} outside [1, {}]",
            a.len()
        )));
    }
    Ok(())
}

/// Classic linear-time selection holding every index in workspace.
pub fn baseline_select(
    a: &ReadOnlyArray,
    k: usize,
    meter: &WorkspaceMeter,
) -> Result<SelectionResult> {
    check_rank(a, k)?;
    instrumented(a, meter, |ctx| {
        let n = ctx.a.len();
        let mut indices =
            IndexVec::with_capacity(n, index_bits(n), ctx.meter, "baseline-indices")?;
        for i in 1..=n {
            indices.push(i as u64);
        }
        ctx.passes += 1;
        let answer = baseline::select_among(&mut indices, ctx.a, k, ctx.meter)?;
        ctx.passes += 1;
        Ok(answer)
    })
}

/// Zone-based selection in O(lg²N) bits of workspace.
pub fn select_log_squared(
    a: &ReadOnlyArray,
    k: usize,
    meter: &WorkspaceMeter,
) -> Result<SelectionResult> {
    check_rank(a, k)?;
    instrumented(a, meter, |ctx| logsq::run(ctx, k))
}

/// Linear-time selection in Θ(N) bits of workspace.
pub fn select_linear_bits(
    a: &ReadOnlyArray,
    k: usize,
    meter: &WorkspaceMeter,
) -> Result<SelectionResult> {
    check_rank(a, k)?;
    instrumented(a, meter, |ctx| linear_bits::run(ctx, k))
}

/// Selection sized to a workspace of Θ(S) bits, lg³N ≤ S.
///
/// `s_bits` sizes the internal structures; the metered peak stays
/// within [`crate::constants::GENERAL_PEAK_FACTOR`] · S. Values above N
/// are accepted (the structures cap at input size).
pub fn select_general(
    a: &ReadOnlyArray,
    k: usize,
    s_bits: u64,
    meter: &WorkspaceMeter,
) -> Result<SelectionResult> {
    check_rank(a, k)?;
    let lg = (a.len().max(2) as f64).log2();
    if (s_bits as f64) < lg.powi(3) {
        return Err(Error::Parameter(format!(
            "budget {s_bits} bits is below lg\u{b3}N \u{2248} {:.0}; supported range is lg\u{b3}N \u{2264} S",
            lg.powi(3)
        )));
    }
    instrumented(a, meter, |ctx| general::run(ctx, k, s_bits))
}

/// Dispatches on the budget: none or at least
/// [`LINEAR_BITS_PEAK_FACTOR`]·N bits runs the linear-time algorithm,
/// anything down to lg³N runs the budgeted one, below that is an error.
pub fn select_auto(
    a: &ReadOnlyArray,
    k: usize,
    budget_bits: Option<u64>,
    meter: &WorkspaceMeter,
) -> Result<SelectionResult> {
    check_rank(a, k)?;
    match budget_bits {
        None => select_linear_bits(a, k, meter),
        Some(s) if s >= LINEAR_BITS_PEAK_FACTOR * a.len() as u64 => {
            select_linear_bits(a, k, meter)
        }
        Some(s) => select_general(a, k, s, meter),
    }
}
