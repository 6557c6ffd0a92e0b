//! Detector, process and state tomography on simulated data: linear
//! least-squares fits followed by projection onto the physical set.

mod project;
mod qdt;
mod qpt;
mod qst;
mod report;
mod source;

pub use project::{project_cptp, project_povm, Projected, PROJECTION_MAX_ITER, PROJECTION_TOLERANCE};
pub use qdt::{
    acquire, max_effect_error, mitigated_b_matrix, pauli_input_states, reconstruct_effects, run_native_qdt, run_qdt,
    TomographyRun,
};
pub use qpt::{choi_trace_distance, run_qpt, MAX_RELATIVE_CORRECTION};
pub use qst::{run_ancilla_qst, run_qst};
pub use report::{TargetKind, TomographyReport, TomographyTarget, REPORT_SCHEMA};
pub use source::{
    DilationPipelineSource, IdealSource, MeasurementSource, NativeReadoutSource, PmPipelineSource, ShotMode, MIN_SHOTS,
};
