//! Seeded random quantum objects for tests, benchmarks and examples.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::channel::Channel;
use super::operator::{Operator, C64};
use super::pauli::{Pauli, PauliObservable, PauliString};
use super::state::QuantumState;

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary (QR of a Ginibre matrix with phase-fixed R).
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let qr = ginibre(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    Operator::from_matrix(q).expect("square")
}

/// Hilbert-Schmidt random mixed state.
pub fn density_matrix<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> QuantumState {
    let d = 1usize << num_qubits;
    let g = ginibre(d, d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    QuantumState::new(Operator::from_matrix(m.unscale(tr)).expect("square")).expect("valid")
}

pub fn pure_state<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> QuantumState {
    let d = 1usize << num_qubits;
    let g = ginibre(d, 1, rng);
    QuantumState::pure(g.as_slice()).expect("nonzero")
}

/// Random channel with `num_kraus` Kraus operators from a Haar isometry.
pub fn channel<R: Rng + ?Sized>(dim: usize, num_kraus: usize, rng: &mut R) -> Channel {
    let u = unitary(dim * num_kraus, rng);
    let kraus = (0..num_kraus)
        .map(|a| DMatrix::from_fn(dim, dim, |r, c| u.get(a * dim + r, c)))
        .collect();
    Channel::new(dim, dim, kraus).expect("isometry gives a channel")
}

/// Random observable with `num_terms` distinct Pauli strings and
/// coefficients uniform in `[-1, 1]`.
pub fn observable<R: Rng + ?Sized>(num_qubits: usize, num_terms: usize, rng: &mut R) -> PauliObservable {
    let total = 1usize << (2 * num_qubits);
    let num_terms = num_terms.min(total);
    let picks = rand::seq::index::sample(rng, total, num_terms);
    let terms = picks
        .iter()
        .map(|idx| {
            let word = (0..num_qubits)
                .map(|q| Pauli::ALL[(idx >> (2 * q)) & 3])
                .collect();
            (rng.random_range(-1.0..=1.0), PauliString(word))
        })
        .collect();
    PauliObservable::new(num_qubits, terms).expect("distinct strings")
}
