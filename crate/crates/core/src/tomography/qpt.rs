use nalgebra::DMatrix;

use super::project::{project_cptp, PROJECTION_MAX_ITER, PROJECTION_TOLERANCE};
use super::qdt::pauli_input_states;
use super::source::ShotMode;
use crate::error::{Error, Result};
use crate::estimator::pseudo_inverse;
use crate::qcore::{tensor, Channel, Operator, OperatorBasis, Pauli};

/// Raw estimates whose projection moves them by more than this fraction of
/// their own Frobenius norm are rejected as non-physical.
pub const MAX_RELATIVE_CORRECTION: f64 = 0.5;

const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Projectors of the Pauli measurement `setting` (one axis per qubit),
/// indexed by outcome bits, qubit 0 most significant.
fn setting_projectors(setting: &[Pauli]) -> Vec<Operator> {
    let n = setting.len();
    (0..1usize << n)
        .map(|bits| {
            let parts: Vec<Operator> = setting
                .iter()
                .enumerate()
                .map(|(q, p)| {
                    let s = if (bits >> (n - 1 - q)) & 1 == 0 { 0.5 } else { -0.5 };
                    &Operator::identity(2).scale(0.5) + &p.matrix().scale(s)
                })
                .collect();
            tensor(&parts).expect("non-empty")
        })
        .collect()
}

fn settings(n: usize) -> Vec<Vec<Pauli>> {
    (0..3usize.pow(n as u32))
        .map(|idx| (0..n).map(|q| AXES[(idx / 3usize.pow((n - 1 - q) as u32)) % 3]).collect())
        .collect()
}

/// Pauli expectation values of an unknown state, estimated from Pauli
/// measurement frequencies. Each value averages every compatible setting.
fn pauli_expectations(n: usize, sets: &[Vec<Pauli>], freqs: &[Vec<f64>], basis: &OperatorBasis) -> Vec<f64> {
    basis
        .labels()
        .iter()
        .map(|label| {
            let (mut acc, mut count) = (0.0, 0usize);
            for (s, f) in sets.iter().zip(freqs) {
                let compatible = label.0.iter().zip(s).all(|(p, a)| *p == Pauli::I || p == a);
                if !compatible {
                    continue;
                }
                count += 1;
                for (bits, &fr) in f.iter().enumerate() {
                    let parity = (0..n)
                        .filter(|&q| label.0[q] != Pauli::I && (bits >> (n - 1 - q)) & 1 == 1)
                        .count();
                    acc += if parity % 2 == 0 { fr } else { -fr };
                }
            }
            acc / count as f64
        })
        .collect()
}

/// Process tomography of a gate on one or two qubits: every product of Pauli
/// eigenstates is sent through `gate` and its output measured in every
/// Pauli setting with `mode` shots each. The linear estimate is projected
/// onto the CPTP maps and returned in Kraus form.
pub fn run_qpt(gate: &Channel, mode: ShotMode, seed: u64) -> Result<Channel> {
    mode.check()?;
    let d = gate.input_dim();
    if gate.output_dim() != d || !(d == 2 || d == 4) {
        return Err(Error::invalid(
            "process tomography",
            format!("{}->{} channel, expected 1 or 2 qubits", d, gate.output_dim()),
        ));
    }
    let n = d.trailing_zeros() as usize;
    let basis = OperatorBasis::normalized_pauli(n);
    let inputs = pauli_input_states(n);
    let sets = settings(n);
    let projectors: Vec<Vec<Operator>> = sets.iter().map(|s| setting_projectors(s)).collect();
    let norm = 1.0 / (d as f64).sqrt();

    // Columns: input coefficients R and output coefficients Y in the basis.
    let mut r = DMatrix::zeros(basis.len(), inputs.len());
    let mut y = DMatrix::zeros(basis.len(), inputs.len());
    for (j, rho) in inputs.iter().enumerate() {
        let out = gate.apply(rho.rho())?;
        let mut freqs = Vec::with_capacity(sets.len());
        for (s, proj) in projectors.iter().enumerate() {
            let probs: Vec<f64> = proj.iter().map(|p| out.trace_product(p).re.max(0.0)).collect();
            let index = (j * sets.len() + s) as u64;
            freqs.push(mode.frequencies(&probs, seed, index)?.0);
        }
        let ev = pauli_expectations(n, &sets, &freqs, &basis);
        for (a, b) in basis.elements().iter().enumerate() {
            r[(a, j)] = rho.expectation(b);
            y[(a, j)] = ev[a] * norm;
        }
    }
    let s = &y * pseudo_inverse(&r);

    let mut choi = Operator::zeros(d * d);
    for (a, ba) in basis.elements().iter().enumerate() {
        for (b, bb) in basis.elements().iter().enumerate() {
            let w = s[(a, b)];
            if w != 0.0 {
                let bt = Operator::from_matrix(bb.matrix().transpose())?;
                choi += &bt.kron(ba).scale(w);
            }
        }
    }
    let projected = project_cptp(&choi, d, d, PROJECTION_TOLERANCE, PROJECTION_MAX_ITER);
    let relative = projected.correction / choi.frobenius_norm();
    if relative > MAX_RELATIVE_CORRECTION {
        return Err(Error::Tomography(format!(
            "raw process estimate needs a relative correction of {relative:.3}"
        )));
    }
    Ok(Channel::from_choi_with_tolerance(&projected.operators[0], d, d, PROJECTION_TOLERANCE)?.renormalized())
}

/// Trace distance between normalised Choi states, `0.5 ||J_a - J_b||_1 / d`.
pub fn choi_trace_distance(a: &Channel, b: &Channel) -> f64 {
    let diff = &a.choi() - &b.choi();
    0.5 * diff.eigenvalues().iter().map(|v| v.abs()).sum::<f64>() / a.input_dim() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseModel;
    use crate::qcore::{cnot, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_gate_exact() {
        let ch = run_qpt(&Channel::identity(2), ShotMode::Exact, 0).unwrap();
        // maximally entangled projector (unnormalised): |00><00| + |00><11| + ...
        let mut phi = Operator::zeros(4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            phi += &Operator::outer(
                &(0..4).map(|k| crate::qcore::C64::new((k == i) as u8 as f64, 0.0)).collect::<Vec<_>>(),
                &(0..4).map(|k| crate::qcore::C64::new((k == j) as u8 as f64, 0.0)).collect::<Vec<_>>(),
            );
        }
        assert!(ch.choi().distance(&phi) < 1e-9);
    }

    #[test]
    fn cnot_exact() {
        let truth = Channel::unitary(&cnot()).unwrap();
        let ch = run_qpt(&truth, ShotMode::Exact, 0).unwrap();
        assert!(ch.choi().distance(&truth.choi()) < 1e-9);
    }

    #[test]
    fn random_channel_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let truth = random::channel(2, 3, &mut rng);
        let ch = run_qpt(&truth, ShotMode::Exact, 0).unwrap();
        assert!(ch.choi().distance(&truth.choi()) < 1e-8);
    }

    #[test]
    fn noisy_cnot_sampled() {
        let noise = NoiseModel::parametric(0.0, 0.0, 0.0, 0.03, 0.0).unwrap();
        let truth = noise.noisy_two(&cnot()).unwrap();
        let ch = run_qpt(&truth, ShotMode::Shots(250_000), 2).unwrap();
        assert!(ch.is_trace_preserving(1e-9));
        let dist = choi_trace_distance(&ch, &truth);
        assert!(dist <= 0.03, "distance {dist}");
    }

    #[test]
    fn three_qubit_gate_rejected() {
        assert!(run_qpt(&Channel::identity(8), ShotMode::Exact, 0).is_err());
    }
}
