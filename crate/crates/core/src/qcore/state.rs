use serde::{Deserialize, Serialize};

use super::operator::{Operator, C64};
use super::pauli::Pauli;
use crate::error::{Error, Result};
use crate::tol;

/// A validated n-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    rho: Operator,
}

impl QuantumState {
    /// Validates trace one, Hermiticity and positivity at [`tol::EXACT`].
    pub fn new(rho: Operator) -> Result<Self> {
        Self::with_tolerance(rho, tol::EXACT)
    }

    pub fn with_tolerance(rho: Operator, tolerance: f64) -> Result<Self> {
        let dim = rho.dim();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!("state dimension {dim} is not 2^n")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tolerance || tr.im.abs() > tolerance {
            return Err(Error::invalid("state", format!("trace {tr}")));
        }
        if !rho.is_hermitian(tolerance) {
            return Err(Error::invalid("state", "not Hermitian"));
        }
        let min = rho.min_eigenvalue();
        if min < -tolerance {
            return Err(Error::invalid("state", format!("min eigenvalue {min:e}")));
        }
        Ok(QuantumState {
            num_qubits: dim.trailing_zeros() as usize,
            rho,
        })
    }

    /// Pure state from (not necessarily normalised) amplitudes.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("state", "zero vector"));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        Self::new(Operator::projector(&psi))
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index out of range");
        QuantumState {
            num_qubits,
            rho: Operator::basis_projector(dim, index),
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        QuantumState {
            num_qubits,
            rho: Operator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Single-qubit state `(I + r.sigma)/2`; `r` must lie in the unit ball.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + tol::EXACT {
            return Err(Error::invalid("Bloch vector", format!("length {len}")));
        }
        let mut rho = Operator::identity(2);
        for (c, p) in r.iter().zip([Pauli::X, Pauli::Y, Pauli::Z]) {
            rho += &p.matrix().scale(*c);
        }
        Self::new(rho.scale(0.5))
    }

    /// Eigenstate of a single-qubit Pauli: `positive` selects eigenvalue +1.
    pub fn pauli_eigenstate(axis: Pauli, positive: bool) -> Self {
        let s = if positive { 1.0 } else { -1.0 };
        let r = match axis {
            Pauli::X => [s, 0.0, 0.0],
            Pauli::Y => [0.0, s, 0.0],
            Pauli::Z => [0.0, 0.0, s],
            Pauli::I => return Self::maximally_mixed(1),
        };
        Self::from_bloch(r).expect("unit Bloch vector")
    }

    /// The six single-qubit Pauli eigenstates in the order
    /// `+Z, -Z, +X, -X, +Y, -Y`.
    pub fn pauli_eigenstates() -> Vec<QuantumState> {
        [Pauli::Z, Pauli::X, Pauli::Y]
            .iter()
            .flat_map(|&a| [Self::pauli_eigenstate(a, true), Self::pauli_eigenstate(a, false)])
            .collect()
    }

    pub fn tensor(states: &[QuantumState]) -> Result<Self> {
        let ops: Vec<Operator> = states.iter().map(|s| s.rho.clone()).collect();
        let rho = super::operator::tensor(&ops)?;
        Ok(QuantumState {
            num_qubits: states.iter().map(|s| s.num_qubits).sum(),
            rho,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    /// `Tr[rho * op]`, real part.
    pub fn expectation(&self, op: &Operator) -> f64 {
        self.rho.trace_product(op).re
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> [f64; 3] {
        assert_eq!(self.num_qubits, 1, "Bloch vector of a multi-qubit state");
        [Pauli::X, Pauli::Y, Pauli::Z].map(|p| self.expectation(&p.matrix()))
    }

    /// `0.5 * ||a - b||_1`.
    pub fn trace_distance(&self, other: &QuantumState) -> f64 {
        0.5 * (&self.rho - &other.rho)
            .eigenvalues()
            .iter()
            .map(|v| v.abs())
            .sum::<f64>()
    }
}

/// Serialised form used by state files: either amplitudes or a density
/// matrix, as row-major `(re, im)` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn into_state(self) -> Result<QuantumState> {
        if self.schema != 1 {
            return Err(Error::VersionMismatch(format!("state schema {}", self.schema)));
        }
        match (self.amplitudes, self.rho) {
            (Some(a), None) => {
                QuantumState::pure(&a.iter().map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>())
            }
            (None, Some(r)) => QuantumState::new(Operator::from_row_major_pairs(&r)?),
            _ => Err(Error::invalid("state file", "exactly one of `amplitudes` or `rho` required")),
        }
    }

    pub fn from_state(state: &QuantumState) -> Self {
        StateFile {
            schema: 1,
            amplitudes: None,
            rho: Some(state.rho.to_row_major_pairs()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_states() {
        assert!(QuantumState::new(Operator::diag(&[0.5, 0.6])).is_err());
        assert!(QuantumState::new(Operator::diag(&[1.5, -0.5])).is_err());
        assert!(QuantumState::new(Operator::identity(3).scale(1.0 / 3.0)).is_err());
        assert!(QuantumState::from_bloch([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn eigenstates_have_expected_bloch_vectors() {
        let states = QuantumState::pauli_eigenstates();
        let expected = [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
        ];
        for (s, e) in states.iter().zip(expected) {
            let b = s.bloch();
            for i in 0..3 {
                assert!((b[i] - e[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn state_file_roundtrip() {
        let s = QuantumState::pauli_eigenstate(Pauli::Y, false);
        let text = serde_json::to_string(&StateFile::from_state(&s)).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_state().unwrap(), s);
    }
}
