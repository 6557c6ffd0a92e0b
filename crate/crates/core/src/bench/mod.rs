//! Seeded convergence experiments: energy error against cumulative shots
//! for the {PM-simulable, dilation} x {fixed, adaptive} x {raw, mitigated}
//! strategy cells, repeated and aggregated into curves and reports.

mod config;
mod curve;
mod report;

pub use config::{default_shot_grid, BenchFile, ExperimentConfig, NoiseSource, Strategy, DEFAULT_REPETITIONS};
pub use curve::{
    chemical_accuracy_crossing, loglog_slope, run_experiment, run_experiment_with, ConvergenceCurve, ExperimentResult,
    CHEMICAL_ACCURACY,
};
pub use report::{curve_csv, emit_report, BenchSummary, CurveSummary, CURVE_CSV_HEADER, SUMMARY_SCHEMA};
