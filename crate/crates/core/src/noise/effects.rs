//! Exact effects implemented by a noisy measurement pipeline, computed in
//! the Heisenberg picture.

use super::model::NoiseModel;
use crate::error::Result;
use crate::povm::{PmSimulablePovm, Povm, DILATION_PARAMS};
use crate::qcore::{cnot, compose, Channel, Operator};
use crate::tol;

/// `Pi_real,m = sum_{k,b} P(m|k,b) alpha_k E_k^dagger(M_real,b)` where `E_k`
/// is `U_k` followed by the single-qubit gate noise.
pub fn real_effects_pm(spec: &PmSimulablePovm, noise: &NoiseModel, qubit: usize) -> Result<Povm> {
    let readout = noise.readout(qubit)?;
    let mut effects = vec![Operator::zeros(2); spec.num_outcomes()];
    for (k, u) in spec.unitaries().iter().enumerate() {
        let channel = noise.noisy_single(u)?;
        for (b, m_b) in readout.iter().enumerate() {
            let heis = channel.apply_adjoint(m_b)?;
            for (m, &p) in spec.relabel_row(k, b).iter().enumerate() {
                let w = p * spec.alphas()[k];
                if w != 0.0 {
                    effects[m] += &heis.scale(w);
                }
            }
        }
    }
    Povm::new(effects.into_iter().map(|e| e.hermitian_part()).collect())
}

/// Channel on `system (x) ancilla` implemented by the dilation circuit
/// `(U_a (x) U_b) . CNOT . (U_c (x) U_d)` with every gate followed by its
/// noise channel.
pub fn dilation_channel(angles: &[f64], noise: &NoiseModel) -> Result<Channel> {
    let u = crate::povm::dilation_unitary(angles)?;
    debug_assert!(u.is_unitary(tol::EXACT));
    let blocks: Vec<Operator> = angles[..DILATION_PARAMS]
        .chunks(3)
        .map(|c| crate::povm::unitary_from_angles(c[0], c[1], c[2]))
        .collect();
    let layer = |a: &Operator, b: &Operator| -> Result<Channel> {
        Ok(noise.noisy_single(a)?.tensor(&noise.noisy_single(b)?))
    };
    compose(&[
        layer(&blocks[2], &blocks[3])?,
        noise.noisy_two(&cnot())?,
        layer(&blocks[0], &blocks[1])?,
    ])
}

/// Two-bit readout effects `M_s (x) M_a` indexed `2 s + a`; the ancilla
/// shares its system qubit's readout model.
pub fn dilation_readout(noise: &NoiseModel, qubit: usize) -> Result<Vec<Operator>> {
    let r = noise.readout(qubit)?;
    Ok((0..4).map(|i| r[i >> 1].kron(&r[i & 1])).collect())
}

/// Single-qubit effects of the noisy dilation pipeline: perturbed ancilla,
/// noisy gates, noisy two-bit readout.
pub fn real_effects_dilation(angles: &[f64], noise: &NoiseModel, qubit: usize) -> Result<Povm> {
    let channel = dilation_channel(angles, noise)?;
    let anc = Operator::identity(2).kron(noise.ancilla_state().rho());
    let effects = dilation_readout(noise, qubit)?
        .iter()
        .map(|m| {
            let h = channel.apply_adjoint(m)?;
            Ok((&anc * &h).partial_trace_second(2, 2)?.hermitian_part())
        })
        .collect::<Result<Vec<_>>>()?;
    Povm::new(effects)
}
