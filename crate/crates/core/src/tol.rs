//! Shared numerical tolerances.

/// Exact-arithmetic checks: traces, completeness, PSD, unitarity.
pub const EXACT: f64 = 1e-9;

/// Objects that went through a tomographic reconstruction and projection.
pub const TOMOGRAPHY: f64 = 1e-6;

/// Probability vectors built from closed-form expressions.
pub const DISTRIBUTION: f64 = 1e-12;

/// Singular-value cutoff for informational completeness and spans.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Residual allowed when expressing an operator in a set of effects.
pub const DECOMPOSITION: f64 = 1e-8;

/// Eigenpair residual bound for the ground-state solver.
pub const EIGEN_RESIDUAL: f64 = 1e-8;
