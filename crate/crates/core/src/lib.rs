//! Simulated informationally complete generalised measurements.
//!
//! `povmforge` builds single-qubit POVMs that can be run either without
//! ancillas (randomised projective measurements with classical relabelling)
//! or through a one-ancilla dilation, samples their outcomes on exact
//! density matrices under injectable detector noise, reconstructs the real
//! detector with tomography, and drives an adaptive loop that tunes the
//! POVM parameters to reduce the variance of energy estimators.
//!
//! Module map:
//!
//! - [`qcore`]: dense complex operators, states, Pauli algebra, channels.
//! - [`povm`]: POVM construction, angle parameterisations, IC checks.
//! - [`estimator`]: Pauli decomposition into effects and Monte-Carlo estimators.
//! - [`sampler`]: shot simulation, circuit batching and dilation sampling.
//! - [`noise`]: synthetic noisy detectors and their exact effects.
//! - [`tomography`]: detector, process and state tomography.
//! - [`adaptive`]: detector models, d-matrix reuse and POVM optimisation.
//! - [`bench`]: seeded convergence experiments and reports.
//!
//! The runnable programs under `examples/` walk through each of these.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod bench;
pub mod error;
pub mod estimator;
pub mod noise;
pub mod povm;
pub mod qcore;
pub mod sampler;
pub mod tol;
pub mod tomography;

pub use error::{Error, Result};
