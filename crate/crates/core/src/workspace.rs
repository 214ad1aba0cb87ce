//! Bit-granular workspace accounting.
//!
//! Every data structure the algorithms build charges its storage to a
//! [`WorkspaceMeter`], so "uses S bits of workspace" becomes a measured,
//! optionally enforced budget. Charges are rounded up to whole 64-bit
//! words, the way a real machine hands out memory. Constant-size scratch
//! (loop counters, a held pivot key, up to 32 words per operation) is
//! exempt and not charged.

use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};

pub const BITS_PER_WORD: u64 = 64;

#[inline]
fn round_to_words(bits: u64) -> u64 {
    bits.div_ceil(BITS_PER_WORD) * BITS_PER_WORD
}

#[derive(Default)]
struct LabelUse {
    current: u64,
    peak: u64,
}

struct MeterInner {
    budget: Option<u64>,
    current: Cell<u64>,
    peak: Cell<u64>,
    next_id: Cell<u64>,
    live: RefCell<HashMap<u64, u64>>,
    labels: RefCell<BTreeMap<String, LabelUse>>,
}

/// Meter handle. Cheap to clone; all clones share the same counters.
/// One meter per selection run, mutated from a single thread.
#[derive(Clone)]
pub struct WorkspaceMeter {
    inner: Rc<MeterInner>,
}

/// Receipt for a live allocation. Dropping it returns the charged bits
/// to the meter, so structures that own a `Region` release their charge
/// when they go out of scope. Double release is unrepresentable: release
/// consumes the receipt.
pub struct Region {
    meter: WorkspaceMeter,
    id: u64,
    bits: u64,
    label: String,
}

impl std::fmt::Debug for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Region")
            .field("id", &self.id)
            .field("bits", &self.bits)
            .field("label", &self.label)
            .finish()
    }
}

impl Region {
    /// Charged size in bits (word-rounded).
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl Drop for Region {
    fn drop(&mut self) {
        self.meter.settle(self.id, self.bits, &self.label);
    }
}

/// Snapshot of the meter's counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkspaceReport {
    pub current_bits: u64,
    pub peak_bits: u64,
    /// Peak live bits ever held under each label, sorted by label.
    pub label_peaks: Vec<(String, u64)>,
}

impl WorkspaceMeter {
    pub fn unlimited() -> Self {
        Self::new(None)
    }

    pub fn with_budget(bits: u64) -> Self {
        Self::new(Some(bits))
    }

    fn new(budget: Option<u64>) -> Self {
        WorkspaceMeter {
            inner: Rc::new(MeterInner {
                budget,
                current: Cell::new(0),
                peak: Cell::new(0),
                next_id: Cell::new(1),
                live: RefCell::new(HashMap::new()),
                labels: RefCell::new(BTreeMap::new()),
            }),
        }
    }

    pub fn budget_bits(&self) -> Option<u64> {
        self.inner.budget
    }

    /// Charges `bits` (rounded up to a whole word) under `label`.
    pub fn allocate(&self, bits: u64, label: &str) -> Result<Region> {
        let rounded = round_to_words(bits);
        let current = self.inner.current.get();
        if let Some(budget) = self.inner.budget {
            if current + rounded > budget {
                return Err(Error::BudgetExceeded {
                    label: label.to_string(),
                    requested_bits: rounded,
                    budget_bits: budget,
                });
            }
        }
        let now = current + rounded;
        self.inner.current.set(now);
        if now > self.inner.peak.get() {
            self.inner.peak.set(now);
        }
        let id = self.inner.next_id.get();
        self.inner.next_id.set(id + 1);
        self.inner.live.borrow_mut().insert(id, rounded);
        {
            let mut labels = self.inner.labels.borrow_mut();
            let entry = labels.entry(label.to_string()).or_default();
            entry.current += rounded;
            if entry.current > entry.peak {
                entry.peak = entry.current;
            }
        }
        Ok(Region {
            meter: self.clone(),
            id,
            bits: rounded,
            label: label.to_string(),
        })
    }

    /// Explicit release. Fails if the region was allocated from a
    /// different meter (the receipt is still settled against its true
    /// owner when dropped).
    pub fn release(&self, region: Region) -> Result<()> {
        if !Rc::ptr_eq(&self.inner, &region.meter.inner) {
            return Err(Error::UnknownRegion);
        }
        drop(region);
        Ok(())
    }

    fn settle(&self, id: u64, bits: u64, label: &str) {
        if self.inner.live.borrow_mut().remove(&id).is_none() {
            return;
        }
        self.inner.current.set(self.inner.current.get() - bits);
        let mut labels = self.inner.labels.borrow_mut();
        if let Some(entry) = labels.get_mut(label) {
            entry.current -= bits;
        }
    }

    pub fn current_bits(&self) -> u64 {
        self.inner.current.get()
    }

    pub fn peak_bits(&self) -> u64 {
        self.inner.peak.get()
    }

    pub fn report(&self) -> WorkspaceReport {
        WorkspaceReport {
            current_bits: self.inner.current.get(),
            peak_bits: self.inner.peak.get(),
            label_peaks: self
                .inner
                .labels
                .borrow()
                .iter()
                .map(|(k, v)| (k.clone(), v.peak))
                .collect(),
        }
    }
}
