//! Single-qubit POVMs: PM-simulable constructions, ancilla dilations, their
//! angle parameterisations and validity checks.

mod dilation;
mod effects;
mod hypersphere;
mod io;
mod pm;
mod unitary;

pub use dilation::{default_dilation_angles, dilation_unitary, DilationPovm, DILATION_PARAMS};
pub use effects::Povm;
pub use hypersphere::{angles_to_distribution, clamp_angle, distribution_to_angles};
pub use io::{PovmFile, PovmSpec, POVM_SCHEMA};
pub use pm::{PmFamily, PmSimulablePovm};
pub use unitary::{angles_from_unitary, unitary_from_angles};

use crate::error::Result;

/// A parameterised family of single-qubit POVMs, as seen by the optimiser.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PovmFamily {
    Pm(PmFamily),
    Dilation,
}

impl Default for PovmFamily {
    fn default() -> Self {
        PovmFamily::Pm(PmFamily::default())
    }
}

impl PovmFamily {
    pub fn num_params(&self) -> usize {
        match self {
            PovmFamily::Pm(f) => f.num_params(),
            PovmFamily::Dilation => DILATION_PARAMS,
        }
    }

    pub fn num_outcomes(&self) -> usize {
        match self {
            PovmFamily::Pm(f) => f.m,
            PovmFamily::Dilation => 4,
        }
    }

    /// Ideal effects for one qubit's parameters.
    pub fn effects(&self, params: &[f64]) -> Result<Povm> {
        match self {
            PovmFamily::Pm(f) => Ok(f.povm_from_params(params)?.effects()),
            PovmFamily::Dilation => Ok(DilationPovm::from_angles(params)?.effects()),
        }
    }

    pub fn clamp(&self, params: &mut [f64]) {
        if let PovmFamily::Pm(f) = self {
            f.clamp(params);
        }
    }

    /// Informationally complete starting point: the tetrahedral POVM for
    /// `K = M = 4`, otherwise a fixed generic parameter vector.
    pub fn initial_params(&self) -> Vec<f64> {
        match self {
            PovmFamily::Pm(f) if f.k == 4 && f.m == 4 => f
                .params_from_povm(&PmSimulablePovm::tetrahedral())
                .expect("tetrahedral POVM is in the default family"),
            PovmFamily::Pm(f) => (0..f.num_params())
                .map(|i| {
                    let x = 0.35 + 0.61 * ((i * 7919) % 13) as f64 / 13.0;
                    if f.is_hypersphere_angle(i) {
                        x
                    } else {
                        3.0 * x
                    }
                })
                .collect(),
            PovmFamily::Dilation => default_dilation_angles().to_vec(),
        }
    }
}
