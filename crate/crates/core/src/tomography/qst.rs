use super::source::ShotMode;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::qcore::{Pauli, QuantumState};

/// Single-qubit state tomography: `Z`, `X` and `Y` are each measured with
/// `mode` shots and the estimated Bloch vector is pulled back into the unit
/// ball if shot noise pushed it outside.
pub fn run_qst(prep: &QuantumState, mode: ShotMode, seed: u64) -> Result<QuantumState> {
    mode.check()?;
    if prep.num_qubits() != 1 {
        return Err(Error::invalid("state tomography", format!("{} qubits, expected 1", prep.num_qubits())));
    }
    let truth = prep.bloch();
    let mut r = [0.0; 3];
    for (i, axis) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
        let p_plus = ((1.0 + truth[i]) / 2.0).clamp(0.0, 1.0);
        let (f, _) = mode.frequencies(&[p_plus, 1.0 - p_plus], seed, axis.index() as u64)?;
        r[i] = f[0] - f[1];
    }
    let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len > 1.0 {
        r = r.map(|x| x / len);
    }
    QuantumState::from_bloch(r)
}

/// Tomography of the ancilla after its reset and perturbation.
pub fn run_ancilla_qst(noise: &NoiseModel, mode: ShotMode, seed: u64) -> Result<QuantumState> {
    run_qst(&noise.ancilla_state(), mode, seed)
}
