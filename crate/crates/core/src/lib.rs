//! Selection from read-only memory under a measured workspace budget.
//!
//! The k-th smallest of N elements, where the elements live in an
//! immutable array and every byte of mutable state is charged, in bits,
//! to a workspace meter. Ships four algorithms spanning the time/space
//! trade-off — Θ(N·lg N) bits (classic), Θ(N) bits in linear time,
//! Θ(S) bits for any lg³N ≤ S, and O(lg²N) bits — together with the
//! structures behind them: rank/select bit vectors, the wavelet stack
//! that tracks pruning survivors at a constant number of bits per
//! element, and the sampling passes that shrink the candidate set
//! between two filter elements.
//!
//! Inputs are instrumented: element accesses and order tests are
//! counted exactly, so the time bounds are testable as counter ratios,
//! and the meter makes the space bounds testable as peak bits.

pub mod bits;
pub mod constants;
pub mod error;
pub mod input;
pub mod oracle;
pub mod packed;
pub mod pruning;
pub mod selection;
pub mod wavelet;
pub mod workspace;

pub use error::{Error, Result};
pub use input::{Distribution, GeneratorSpec, InputSource, OrderedKey, ReadOnlyArray};
pub use selection::{
    baseline_select, select_auto, select_general, select_linear_bits, select_log_squared,
    SelectionResult, SelectionStats,
};
pub use workspace::{Region, WorkspaceMeter, WorkspaceReport};
