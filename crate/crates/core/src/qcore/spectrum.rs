use super::operator::{Operator, C64};
use super::pauli::PauliObservable;
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::tol;

/// Largest register handled by the dense ground-state solver.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Lowest eigenvalue of the observable and the projector onto a matching
/// eigenvector, from a dense Hermitian eigendecomposition.
pub fn ground_state(obs: &PauliObservable) -> Result<(f64, QuantumState)> {
    if obs.num_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!(
            "{} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}",
            obs.num_qubits()
        )));
    }
    let h = obs.matrix();
    let (vals, vecs) = h.eigh();
    let energy = vals[0];
    let v: Vec<C64> = vecs.column(0).iter().copied().collect();

    let hv = h.matrix() * vecs.column(0);
    let residual = hv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > tol::EIGEN_RESIDUAL {
        return Err(Error::invalid(
            "eigensolver result",
            format!("residual {residual:e} above {:e}", tol::EIGEN_RESIDUAL),
        ));
    }
    let state = QuantumState::new(Operator::projector(&v))?;
    Ok((energy, state))
}
