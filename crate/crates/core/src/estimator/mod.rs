//! Pauli decomposition of POVM effects, per-outcome estimator weights, shot
//! averaging and error bars.

mod decompose;
mod estimate;
mod io;
mod omega;
mod outcome;

pub use decompose::{decompose_operator, decompose_pauli, BMatrix};
pub(crate) use decompose::pseudo_inverse;
pub(crate) use estimate::CompensatedSum;
pub use estimate::{
    count_outcomes, estimate, estimate_counts, estimate_weighted, exact_expectation, merge_estimates,
    EstimateResult, OutcomeCounts, MAX_EXACT_OUTCOMES,
};
pub use io::{append_trace, estimate_json, trace_csv, TraceRow, TRACE_HEADER};
pub use omega::OmegaTable;
pub use outcome::OutcomeSpace;
