//! Adaptive POVM optimisation: detector models of the noisy hardware,
//! the reweighted second-moment objective, the per-qubit optimiser and
//! the measure / estimate / update loop.

mod model;
mod moment;
mod optimize;
mod run;

pub use model::DetectorModel;
pub use moment::{
    build_d_matrix, empirical_second_moment, second_moment_estimate, second_moment_exact, second_moment_with_error, Acquisition, DTable,
    QubitMoment, D_MATRIX_TOLERANCE,
};
pub use optimize::{minimize, optimize_step, OptimizerConfig, QubitObjective, QubitUpdate};
pub use run::{
    adaptive_run, adaptive_trace_csv, combine_estimates, doubling_schedule, params_history_text, params_version,
    parse_params_history, AdaptiveConfig, AdaptiveOutcome, AdaptiveTraceRow, FamilyChoice, Mitigation, QdtMode,
    ADAPTIVE_TRACE_HEADER, CONVERGENCE_THRESHOLD, MAX_ADAPTIVE_ITERATIONS, DEFAULT_QDT_SHOTS,
};
