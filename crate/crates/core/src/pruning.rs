//! Filter-producing pruning passes.
//!
//! The engine shrinks the set of candidate answers ("active" elements:
//! those strictly between two filter elements) without storing it, by
//! sequential sampling passes. A pass gathers sorted s-samples of the
//! active elements, combines them bottom-up, and picks two elements of
//! the final sample as the new filters, adjusting the running rank `k`
//! by the number of active elements at or below the new low filter.
//!
//! Two pass kinds share the machinery: full-sort sampling with
//! thin-and-merge combining, and quantile sampling (only the d
//! evenly-spaced order statistics of each gathered set), which merges
//! plainly while samples are smaller than s and thins above that.
//!
//! Every sample entry carries exact lower/upper bounds on its rank
//! within the population it represents, maintained through every merge
//! and thinning. Filter positions chosen by the closed-form rank
//! formula are verified against these bounds before use, and when the
//! formula yields no usable position (extreme `k` with a coarse
//! sample), the bounds pick the tightest sound positions instead. If
//! even that fails, a counting pass against the sample median tightens
//! one side exactly; progress is guaranteed either way.

use crate::error::{Error, Result};
use crate::input::{OrderedKey, ReadOnlyArray};
use crate::packed::{index_bits, IndexVec, PackedBits};
use crate::selection::baseline;
use crate::workspace::{Region, WorkspaceMeter};

/// Pair of elements bracketing the answer; `None` is the ∓∞ sentinel.
/// Elements strictly between the filters are active.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterPair {
    pub low: Option<OrderedKey>,
    pub high: Option<OrderedKey>,
}

impl FilterPair {
    pub fn open() -> Self {
        FilterPair::default()
    }

    /// Strict inside test, counting one comparison per non-sentinel side.
    #[inline]
    pub fn admits(&self, a: &ReadOnlyArray, key: &OrderedKey) -> bool {
        if let Some(low) = &self.low {
            if !a.key_less(low, key) {
                return false;
            }
        }
        if let Some(high) = &self.high {
            if !a.key_less(key, high) {
                return false;
            }
        }
        true
    }
}

/// Result of one pruning pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PassOutcome {
    /// Filters tightened; `k` is the answer's rank among the `active`
    /// elements now inside them.
    Pruned { k: usize, active: usize },
    /// The answer turned out to be a filter element itself.
    Answer(usize),
    /// The active elements already fit in one sample; nothing gained by
    /// sampling. Filters unchanged.
    Endgame { active: usize },
}

/// Filter state after each pass, for soundness checks.
#[derive(Debug, Clone)]
pub struct FilterSnapshot {
    pub low: Option<OrderedKey>,
    pub high: Option<OrderedKey>,
    pub k: usize,
    pub active: usize,
}

/// Pass counter and per-pass filter history.
#[derive(Debug, Default)]
pub struct PruneTrace {
    /// Full or partial input scans performed.
    pub passes: u64,
    pub snapshots: Vec<FilterSnapshot>,
}

impl PruneTrace {
    fn snapshot(&mut self, f: &FilterPair, k: usize, active: usize) {
        self.snapshots.push(FilterSnapshot {
            low: f.low,
            high: f.high,
            k,
            active,
        });
    }
}

/// Sample ranks of the new low/high filters chosen from a final
/// level-r sample of size s for target rank k: max(1, ⌈k/2^r⌉ − r) and
/// min(s, ⌈k/2^r⌉).
pub fn mp_filter_ranks(k: usize, r: u32, s: usize) -> (usize, usize) {
    let hi = (k as u64).div_ceil(1u64 << r) as usize;
    let lo = hi.saturating_sub(r as usize);
    (lo.clamp(1, s), hi.min(s))
}

/// Number of active elements strictly inside the filters. One pass,
/// O(1) words of workspace.
pub fn count_active(a: &ReadOnlyArray, f: &FilterPair) -> usize {
    let mut count = 0;
    for i in 1..=a.len() {
        let key = a.get(i);
        if f.admits(a, &key) {
            count += 1;
        }
    }
    count
}

/// One sorted sample: packed input indices ascending in the tie-broken
/// order, with exact rank bounds of each entry within the `real_pop`
/// elements this sample represents.
struct SampleSlot {
    idx: PackedBits,
    lo: PackedBits,
    hi: PackedBits,
    level: u32,
    real_pop: u64,
    _region: Region,
}

impl SampleSlot {
    fn new(cap: usize, width: u32, meter: &WorkspaceMeter) -> Result<Self> {
        let idx = PackedBits::new(cap, width);
        let lo = PackedBits::new(cap, width);
        let hi = PackedBits::new(cap, width);
        let bits = idx.bit_size() + lo.bit_size() + hi.bit_size();
        let region = meter.allocate(bits, "sample-buffer")?;
        Ok(SampleSlot {
            idx,
            lo,
            hi,
            level: 0,
            real_pop: 0,
            _region: region,
        })
    }

    #[inline]
    fn len(&self) -> usize {
        self.idx.len()
    }

    fn clear(&mut self) {
        self.idx.clear();
        self.lo.clear();
        self.hi.clear();
        self.level = 0;
        self.real_pop = 0;
    }

    #[inline]
    fn push(&mut self, idx: u64, lo: u64, hi: u64) {
        self.idx.push(idx);
        self.lo.push(lo);
        self.hi.push(hi);
    }

    /// Keeps every other entry (the 2nd, 4th, ... in 1-based terms).
    fn thin_in_place(&mut self) {
        let keep = self.len() / 2;
        for t in 0..keep {
            let src = 2 * t + 1;
            self.idx.set(t, self.idx.get(src));
            self.lo.set(t, self.lo.get(src));
            self.hi.set(t, self.hi.get(src));
        }
        self.idx.truncate(keep);
        self.lo.truncate(keep);
        self.hi.truncate(keep);
    }

    /// Absorbs a conceptual same-level sample with no real elements,
    /// lifting this sample one level.
    fn promote(&mut self, thin: bool) {
        if thin {
            self.thin_in_place();
        }
        self.level += 1;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CombineMode {
    /// Thin both sides before merging (full-sort sampling).
    AlwaysThin,
    /// Merge plainly while samples are smaller than s, thin once they
    /// reach it (quantile sampling).
    BySize,
}

struct SamplePool {
    s: usize,
    width: u32,
    mode: CombineMode,
    slots: Vec<Option<SampleSlot>>,
    free: Vec<SampleSlot>,
    meter: WorkspaceMeter,
}

impl SamplePool {
    fn new(s: usize, width: u32, mode: CombineMode, meter: &WorkspaceMeter) -> Self {
        SamplePool {
            s,
            width,
            mode,
            slots: Vec::new(),
            free: Vec::new(),
            meter: meter.clone(),
        }
    }

    fn grab(&mut self) -> Result<SampleSlot> {
        match self.free.pop() {
            Some(mut slot) => {
                slot.clear();
                Ok(slot)
            }
            None => SampleSlot::new(2 * self.s, self.width, &self.meter),
        }
    }

    fn recycle(&mut self, slot: SampleSlot) {
        self.free.push(slot);
    }

    /// Merges `x` (older) and `y`, thinning according to the mode.
    /// The output sits one level above its inputs.
    fn combine(
        &mut self,
        a: &ReadOnlyArray,
        mut x: SampleSlot,
        mut y: SampleSlot,
    ) -> Result<SampleSlot> {
        debug_assert_eq!(x.level, y.level);
        let thin = match self.mode {
            CombineMode::AlwaysThin => true,
            // Quantile samples merge plainly while small; thinning
            // resumes at size s, and ragged sizes (deduplicated ranks,
            // partial sets) must never push past the 2s slot capacity.
            CombineMode::BySize => {
                x.len().min(y.len()) >= self.s || x.len() + y.len() > 2 * self.s
            }
        };
        if thin {
            x.thin_in_place();
            y.thin_in_place();
        }
        let mut out = self.grab()?;
        merge_entries(a, &x, &y, &mut out);
        out.level = x.level + 1;
        out.real_pop = x.real_pop + y.real_pop;
        self.recycle(x);
        self.recycle(y);
        Ok(out)
    }

    /// Binary-counter insertion of a fresh level-0 sample: combine
    /// upward while a sample already sits at the same level, so at most
    /// one sample per level remains.
    fn insert(&mut self, a: &ReadOnlyArray, mut slot: SampleSlot) -> Result<()> {
        let mut lvl = slot.level as usize;
        loop {
            if self.slots.len() <= lvl {
                self.slots.push(None);
            }
            match self.slots[lvl].take() {
                None => {
                    self.slots[lvl] = Some(slot);
                    return Ok(());
                }
                Some(stored) => {
                    slot = self.combine(a, stored, slot)?;
                    lvl += 1;
                }
            }
        }
    }

    /// Combines the leftover samples bottom-up into one final sample,
    /// promoting the carry through empty levels.
    fn fold(&mut self, a: &ReadOnlyArray) -> Result<Option<SampleSlot>> {
        let mut carry: Option<SampleSlot> = None;
        for lvl in 0..self.slots.len() {
            if let Some(stored) = self.slots[lvl].take() {
                carry = Some(match carry {
                    None => stored,
                    Some(mut c) => {
                        while c.level < stored.level {
                            let thin = match self.mode {
                                CombineMode::AlwaysThin => true,
                                CombineMode::BySize => c.len() >= self.s,
                            };
                            c.promote(thin);
                        }
                        self.combine(a, stored, c)?
                    }
                });
            }
        }
        Ok(carry)
    }
}

/// Two-pointer merge carrying exact rank bounds.
///
/// Taking an entry from one side, the count of the other side's
/// elements at or below it is bounded below by the bound of the last
/// entry already taken there, and above by one less than the bound of
/// the next entry there (or that side's whole population when it is
/// exhausted).
fn merge_entries(a: &ReadOnlyArray, x: &SampleSlot, y: &SampleSlot, out: &mut SampleSlot) {
    let (mut u, mut v) = (0usize, 0usize);
    while u < x.len() || v < y.len() {
        let take_x = if v == y.len() {
            true
        } else if u == x.len() {
            false
        } else {
            let kx = a.get(x.idx.get(u) as usize);
            let ky = a.get(y.idx.get(v) as usize);
            a.key_less(&kx, &ky)
        };
        if take_x {
            let lo = x.lo.get(u) + if v > 0 { y.lo.get(v - 1) } else { 0 };
            let hi = x.hi.get(u)
                + if v < y.len() {
                    y.hi.get(v) - 1
                } else {
                    y.real_pop
                };
            out.push(x.idx.get(u), lo, hi);
            u += 1;
        } else {
            let lo = y.lo.get(v) + if u > 0 { x.lo.get(u - 1) } else { 0 };
            let hi = y.hi.get(v)
                + if u < x.len() {
                    x.hi.get(u) - 1
                } else {
                    x.real_pop
                };
            out.push(y.idx.get(v), lo, hi);
            v += 1;
        }
    }
}

/// Candidate filter elements picked from a final sample.
struct Candidates {
    low: Option<usize>,
    high: Option<usize>,
}

/// Positions from the closed-form ranks when the exact bounds confirm
/// them, otherwise the tightest bound-sound positions.
fn choose_positions(final_slot: &SampleSlot, k: usize, use_formula: bool) -> Candidates {
    let len = final_slot.len();
    if len == 0 {
        return Candidates {
            low: None,
            high: None,
        };
    }
    let mut low_pos: Option<usize> = None;
    let mut high_pos: Option<usize> = None;

    if use_formula {
        let (p_lo, p_hi) = mp_filter_ranks(k, final_slot.level, len);
        if p_lo <= len && final_slot.hi.get(p_lo - 1) <= k as u64 {
            low_pos = Some(p_lo);
        }
        if p_hi <= len && final_slot.lo.get(p_hi - 1) >= k as u64 {
            high_pos = Some(p_hi);
        }
    }
    if low_pos.is_none() {
        for p in (1..=len).rev() {
            if final_slot.hi.get(p - 1) <= k as u64 {
                low_pos = Some(p);
                break;
            }
        }
    }
    if high_pos.is_none() {
        let start = low_pos.map_or(1, |p| p + 1);
        for p in start..=len {
            if final_slot.lo.get(p - 1) >= k as u64 {
                high_pos = Some(p);
                break;
            }
        }
    }
    if let (Some(l), Some(h)) = (low_pos, high_pos) {
        debug_assert!(l < h);
    }
    Candidates {
        low: low_pos.map(|p| final_slot.idx.get(p - 1) as usize),
        high: high_pos.map(|p| final_slot.idx.get(p - 1) as usize),
    }
}

/// Tightens the filters to the candidate elements and adjusts `k` by
/// the number of active elements at or below the new low filter, in one
/// scan. Detects the answer landing on a filter.
fn apply_candidates(
    a: &ReadOnlyArray,
    f: &mut FilterPair,
    k: usize,
    cand: Candidates,
    trace: &mut PruneTrace,
) -> Result<PassOutcome> {
    let new_low = cand.low.map(|i| a.get(i));
    let new_high = cand.high.map(|i| a.get(i));
    debug_assert!(new_low.is_some() || new_high.is_some());
    let low = new_low.or(f.low);
    let high = new_high.or(f.high);

    let mut alpha = 0usize; // active elements ≤ new low filter
    let mut inside = 0usize; // active elements strictly inside new filters
    for i in 1..=a.len() {
        let key = a.get(i);
        let above_low = match &low {
            None => true,
            Some(l) => a.key_less(l, &key),
        };
        if above_low {
            let below_high = match &high {
                None => true,
                Some(h) => a.key_less(&key, h),
            };
            if below_high {
                inside += 1;
            }
        } else if new_low.is_some() {
            let above_old = match &f.low {
                None => true,
                Some(l) => a.key_less(l, &key),
            };
            if above_old {
                alpha += 1;
            }
        }
    }
    trace.passes += 1;

    if k < alpha {
        return Err(Error::InvariantViolation(format!(
            "filter rank bound broken: k={k} < alpha={alpha}"
        )));
    }
    let k_new = k - alpha;
    f.low = low;
    f.high = high;
    if k_new == 0 {
        let low = f.low.expect("alpha > 0 implies a low filter");
        trace.snapshot(f, k_new, inside);
        return Ok(PassOutcome::Answer(low.index));
    }
    if k_new == inside + 1 {
        if let Some(high) = new_high {
            trace.snapshot(f, k_new, inside);
            return Ok(PassOutcome::Answer(high.index));
        }
    }
    if k_new > inside {
        return Err(Error::InvariantViolation(format!(
            "filter rank bound broken: k={k_new} > inside={inside}"
        )));
    }
    trace.snapshot(f, k_new, inside);
    Ok(PassOutcome::Pruned {
        k: k_new,
        active: inside,
    })
}

/// Guaranteed-progress fallback: ranks one sample element (or the first
/// active element) exactly with a counting pass, then tightens the
/// matching side.
fn recovery_pass(
    a: &ReadOnlyArray,
    f: &mut FilterPair,
    k: usize,
    pivot: Option<usize>,
    trace: &mut PruneTrace,
) -> Result<PassOutcome> {
    let mut pivot = pivot;
    let mut pivot_key = pivot.map(|i| a.get(i));
    let mut count = 0usize;
    for i in 1..=a.len() {
        let key = a.get(i);
        if !f.admits(a, &key) {
            continue;
        }
        match &pivot_key {
            None => {
                pivot = Some(i);
                pivot_key = Some(key);
                count += 1;
            }
            Some(p) => {
                if !a.key_less(p, &key) {
                    count += 1;
                }
            }
        }
    }
    trace.passes += 1;
    let pivot = pivot.ok_or_else(|| {
        Error::InvariantViolation("recovery pass found no active elements".to_string())
    })?;
    let cand = if count >= k {
        Candidates {
            low: None,
            high: Some(pivot),
        }
    } else {
        Candidates {
            low: Some(pivot),
            high: None,
        }
    };
    apply_candidates(a, f, k, cand, trace)
}

fn run_pass(
    a: &ReadOnlyArray,
    f: &mut FilterPair,
    k: usize,
    s: usize,
    quantile_d: Option<usize>,
    meter: &WorkspaceMeter,
    trace: &mut PruneTrace,
) -> Result<PassOutcome> {
    if s < 4 || s % 2 != 0 {
        return Err(Error::Parameter(format!(
            "sample size s={s} must be even and at least 4"
        )));
    }
    let n_input = a.len();
    let width = index_bits(n_input);
    let mode = match quantile_d {
        Some(_) => CombineMode::BySize,
        None => CombineMode::AlwaysThin,
    };
    let mut pool = SamplePool::new(s, width, mode, meter);
    let mut gather = IndexVec::with_capacity(s, width, meter, "sample-gather")?;

    let mut active = 0usize;
    for i in 1..=n_input {
        let key = a.get(i);
        if f.admits(a, &key) {
            active += 1;
            gather.push(i as u64);
            if gather.len() == s {
                let slot = flush_gather(a, &mut gather, &mut pool, quantile_d, meter)?;
                pool.insert(a, slot)?;
            }
        }
    }
    trace.passes += 1;

    if active <= s {
        return Ok(PassOutcome::Endgame { active });
    }
    if !gather.is_empty() {
        let slot = flush_gather(a, &mut gather, &mut pool, quantile_d, meter)?;
        pool.insert(a, slot)?;
    }
    let final_slot = pool
        .fold(a)?
        .ok_or_else(|| Error::InvariantViolation("no samples after a full pass".to_string()))?;

    let cand = choose_positions(&final_slot, k, quantile_d.is_none());
    if cand.low.is_none() && cand.high.is_none() {
        let mid = final_slot.len().div_ceil(2);
        let pivot = (mid > 0).then(|| final_slot.idx.get(mid - 1) as usize);
        return recovery_pass(a, f, k, pivot, trace);
    }
    apply_candidates(a, f, k, cand, trace)
}

/// Sorts the gathered set (full-sort sampling) or extracts its d
/// evenly-spaced order statistics (quantile sampling) into a fresh
/// level-0 sample.
fn flush_gather(
    a: &ReadOnlyArray,
    gather: &mut IndexVec,
    pool: &mut SamplePool,
    quantile_d: Option<usize>,
    meter: &WorkspaceMeter,
) -> Result<SampleSlot> {
    let len = gather.len();
    let mut slot = pool.grab()?;
    match quantile_d {
        None => {
            baseline::sort_by_rank(gather, a, meter)?;
            for p in 0..len {
                slot.push(gather.get(p), p as u64 + 1, p as u64 + 1);
            }
        }
        Some(d) => {
            // Ranks ⌈j·len/d⌉ for j = 1..d, deduplicated.
            let mut prev_rank = 0usize;
            for j in 1..=d {
                let rank = (j * len).div_ceil(d);
                if rank == prev_rank || rank == 0 {
                    continue;
                }
                prev_rank = rank;
                let idx = baseline::select_among(gather, a, rank, meter)?;
                slot.push(idx as u64, rank as u64, rank as u64);
            }
        }
    }
    slot.level = 0;
    slot.real_pop = len as u64;
    gather.clear();
    Ok(slot)
}

/// One full-sort sampling pass: sorted s-samples of the active
/// elements, thinned and merged bottom-up; new filters at the formula
/// ranks of the final sample; `k` reduced by the count of active
/// elements at or below the new low filter.
pub fn mp_pass(
    a: &ReadOnlyArray,
    f: &mut FilterPair,
    k: usize,
    s: usize,
    meter: &WorkspaceMeter,
    trace: &mut PruneTrace,
) -> Result<PassOutcome> {
    run_pass(a, f, k, s, None, meter, trace)
}

/// One quantile sampling pass with parameter `d`: each gathered size-s
/// set contributes its d evenly-spaced order statistics; samples merge
/// plainly below size s and thin-and-merge above. At `d = s` the
/// quantiles are the full sorted order and the pass coincides with
/// [`mp_pass`].
pub fn fred_phase(
    a: &ReadOnlyArray,
    f: &mut FilterPair,
    k: usize,
    s: usize,
    d: usize,
    meter: &WorkspaceMeter,
    trace: &mut PruneTrace,
) -> Result<PassOutcome> {
    if d < 2 {
        return Err(Error::Parameter(format!("quantile parameter d={d} must be at least 2")));
    }
    if d >= s {
        return mp_pass(a, f, k, s, meter, trace);
    }
    run_pass(a, f, k, s, Some(d), meter, trace)
}

/// Result of a completed reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReduceOutcome {
    /// At most `active` elements remain between the filters and the
    /// answer is the `k`-th among them.
    Reduced {
        filters: FilterPair,
        k: usize,
        active: usize,
    },
    /// The answer surfaced during the reduction.
    Answer(usize),
}

/// Iterated base-2 logarithm: applications of lg until the value is ≤ 1.
pub fn lg_star(x: usize) -> u32 {
    let mut v = x as f64;
    let mut count = 0;
    while v > 1.0 {
        v = v.log2();
        count += 1;
    }
    count
}

/// lg applied `p` times; lg^(0) s = s.
fn iter_lg(s: usize, p: u32) -> f64 {
    let mut v = s as f64;
    for _ in 0..p {
        if v <= 1.0 {
            return 1.0;
        }
        v = v.log2();
    }
    v
}

/// Shrinks the active count to at most `target_active` with quantile
/// phases of exponentially growing d, switching to full-sort passes
/// once d reaches min(s, n/s). The sample size follows
/// s = 2⌈s_w/(2·lg N)⌉ with s_w = workspace_bits/lg N words.
///
/// `reduce_to_s(a, k, S, S as target)` realizes the reduction from N to
/// S active elements.
pub fn reduce_to_s(
    a: &ReadOnlyArray,
    k: usize,
    workspace_bits: u64,
    target_active: usize,
    meter: &WorkspaceMeter,
    trace: &mut PruneTrace,
) -> Result<ReduceOutcome> {
    let n_input = a.len();
    assert!(k >= 1 && k <= n_input, "k={k} out of range");
    let mut filters = FilterPair::open();
    let mut k_run = k;
    let mut active = n_input;
    if target_active >= n_input {
        return Ok(ReduceOutcome::Reduced {
            filters,
            k: k_run,
            active,
        });
    }

    let lg = index_bits(n_input) as u64;
    let s_w = (workspace_bits / lg).max(1);
    let s = (2 * s_w.div_ceil(2 * lg)).max(4) as usize;

    let mut phase = lg_star(s).saturating_sub(2);
    loop {
        if active <= target_active {
            return Ok(ReduceOutcome::Reduced {
                filters,
                k: k_run,
                active,
            });
        }
        if active <= s {
            // The whole active set fits in one sample: resolve exactly.
            let width = index_bits(n_input);
            let mut all = IndexVec::with_capacity(active, width, meter, "sample-gather")?;
            for i in 1..=n_input {
                let key = a.get(i);
                if filters.admits(a, &key) {
                    all.push(i as u64);
                }
            }
            trace.passes += 1;
            debug_assert_eq!(all.len(), active);
            let answer = baseline::select_among(&mut all, a, k_run, meter)?;
            return Ok(ReduceOutcome::Answer(answer));
        }

        let d = (iter_lg(s, phase).floor() as usize).clamp(2, s);
        let chan_switch = d >= usize::min(s, active / s);
        let outcome = if chan_switch {
            mp_pass(a, &mut filters, k_run, s, meter, trace)?
        } else {
            fred_phase(a, &mut filters, k_run, s, d, meter, trace)?
        };
        match outcome {
            PassOutcome::Answer(idx) => return Ok(ReduceOutcome::Answer(idx)),
            PassOutcome::Endgame { active: n } => {
                active = n;
            }
            PassOutcome::Pruned { k: k2, active: n } => {
                if n >= active {
                    return Err(Error::InvariantViolation(format!(
                        "pass made no progress: {n} of {active} active"
                    )));
                }
                k_run = k2;
                active = n;
            }
        }
        if !chan_switch && phase > 0 && (active as f64) <= n_input as f64 / iter_lg(s, phase).max(1.0)
        {
            phase -= 1;
        }
    }
}
