use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::povm::Povm;
use crate::qcore::{Operator, OperatorBasis, Pauli};
use crate::tol;

/// Minimal-norm real coefficients `b` with `sum_m b_m Pi_m = target`.
///
/// Fails with [`Error::NotInSpan`] if the reconstruction residual exceeds
/// [`tol::DECOMPOSITION`].
pub fn decompose_operator(povm: &Povm, target: &Operator) -> Result<Vec<f64>> {
    if target.dim() != povm.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target of dimension {} for a POVM of dimension {}",
            target.dim(),
            povm.dim()
        )));
    }
    let v = povm.vectorized();
    let basis = OperatorBasis::normalized_pauli(povm.num_qubits());
    let t = DVector::from_vec(basis.real_coefficients(target));
    let pinv = pseudo_inverse(&v);
    let b = &pinv * &t;
    let residual = (&v * &b - &t).norm();
    if residual > tol::DECOMPOSITION {
        return Err(Error::NotInSpan(residual));
    }
    Ok(b.iter().copied().collect())
}

pub(crate) fn pseudo_inverse(v: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = v.clone().svd(true, true);
    let cutoff = tol::RANK_CUTOFF * svd.singular_values.max().max(1.0);
    svd.pseudo_inverse(cutoff).expect("both factors computed")
}

/// Single-qubit b-matrix: row `k` (I, X, Y, Z) holds the minimal-norm
/// coefficients of the Pauli `sigma_k` in the effects.
pub fn decompose_pauli(povm: &Povm) -> Result<DMatrix<f64>> {
    if povm.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "b-matrix of a {}-dimensional POVM",
            povm.dim()
        )));
    }
    let s = povm.smallest_singular_value();
    if !(s > tol::RANK_CUTOFF) {
        return Err(Error::NotInformationallyComplete(s));
    }
    let mut b = DMatrix::zeros(4, povm.len());
    for p in Pauli::ALL {
        let row = decompose_operator(povm, &p.matrix())?;
        for (m, x) in row.into_iter().enumerate() {
            b[(p.index(), m)] = x;
        }
    }
    Ok(b)
}

/// One 4 x M_i table per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct BMatrix {
    per_qubit: Vec<DMatrix<f64>>,
}

impl BMatrix {
    pub fn from_povms(povms: &[Povm]) -> Result<Self> {
        if povms.is_empty() {
            return Err(Error::Empty("b-matrix for zero qubits"));
        }
        Ok(BMatrix {
            per_qubit: povms.iter().map(decompose_pauli).collect::<Result<_>>()?,
        })
    }

    /// Wraps precomputed tables, checking the shape only.
    pub fn from_tables(per_qubit: Vec<DMatrix<f64>>) -> Result<Self> {
        if per_qubit.is_empty() {
            return Err(Error::Empty("b-matrix for zero qubits"));
        }
        if let Some(bad) = per_qubit.iter().find(|t| t.nrows() != 4 || t.ncols() == 0) {
            return Err(Error::DimensionMismatch(format!(
                "b-matrix table is {}x{}, expected 4 rows",
                bad.nrows(),
                bad.ncols()
            )));
        }
        Ok(BMatrix { per_qubit })
    }

    pub fn num_qubits(&self) -> usize {
        self.per_qubit.len()
    }

    pub fn tables(&self) -> &[DMatrix<f64>] {
        &self.per_qubit
    }

    pub fn table(&self, qubit: usize) -> &DMatrix<f64> {
        &self.per_qubit[qubit]
    }

    pub fn radices(&self) -> Vec<usize> {
        self.per_qubit.iter().map(|t| t.ncols()).collect()
    }

    /// Largest `||sigma_k - sum_m b_km Pi_m||_F` over rows and qubits.
    pub fn reconstruction_residual(&self, povms: &[Povm]) -> f64 {
        let mut worst: f64 = 0.0;
        for (b, povm) in self.per_qubit.iter().zip(povms) {
            for p in Pauli::ALL {
                let mut acc = Operator::zeros(2);
                for (m, e) in povm.effects().iter().enumerate() {
                    acc += &e.scale(b[(p.index(), m)]);
                }
                worst = worst.max(acc.distance(&p.matrix()));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::PmSimulablePovm;
    use crate::qcore::random;
    use rand::SeedableRng;

    #[test]
    fn computational_basis_rows() {
        let p = PmSimulablePovm::computational().effects();
        let z = decompose_operator(&p, &Pauli::Z.matrix()).unwrap();
        let i = decompose_operator(&p, &Pauli::I.matrix()).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] + 1.0).abs() < 1e-12);
        assert!((i[0] - 1.0).abs() < 1e-12 && (i[1] - 1.0).abs() < 1e-12);
        assert!(matches!(decompose_operator(&p, &Pauli::X.matrix()), Err(Error::NotInSpan(_))));
        assert!(matches!(decompose_pauli(&p), Err(Error::NotInformationallyComplete(_))));
    }

    #[test]
    fn random_pauli_z_row_reconstructs() {
        let p = PmSimulablePovm::random_pauli().effects();
        let b = BMatrix::from_povms(std::slice::from_ref(&p)).unwrap();
        assert!(b.reconstruction_residual(&[p]) < 1e-10);
    }

    #[test]
    fn four_outcome_solution_matches_inverse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random::unitary(4, &mut rng);
            let p = crate::povm::DilationPovm::new(u, crate::qcore::QuantumState::basis(1, 0))
                .unwrap()
                .effects();
            // oracle: explicit 4x4 system on the entries (Re/Im of the 2x2 matrices)
            let e = p.effects();
            let a = DMatrix::from_fn(4, 4, |r, c| {
                let z = e[c].get(r / 2, r % 2);
                if r == 2 { z.im } else { z.re }
            });
            let inv = a.try_inverse().unwrap();
            let b = decompose_pauli(&p).unwrap();
            for pl in Pauli::ALL {
                let s = pl.matrix();
                let rhs = DVector::from_fn(4, |r, _| {
                    let z = s.get(r / 2, r % 2);
                    if r == 2 { z.im } else { z.re }
                });
                let want = &inv * rhs;
                for m in 0..4 {
                    assert!((b[(pl.index(), m)] - want[m]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn minimal_norm_against_normal_equations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let fam = crate::povm::PmFamily::new(3, 6).unwrap();
        use rand::Rng;
        let mut checked = 0;
        for _ in 0..20 {
            // zero relabel angles give the identity relabel; bases and weights random
            let params: Vec<f64> = (0..fam.num_params())
                .map(|i| match i {
                    0..2 => rng.random_range(0.5..1.0),
                    2..11 => rng.random_range(0.0..std::f64::consts::TAU),
                    _ => 0.0,
                })
                .collect();
            let p = fam.povm_from_params(&params).unwrap().effects();
            // the normal-equations oracle squares the condition number
            if p.smallest_singular_value() < 0.02 {
                continue;
            }
            checked += 1;
            let b = decompose_pauli(&p).unwrap();
            let v = p.vectorized();
            let gram_inv = (&v * v.transpose()).try_inverse().unwrap();
            let oracle = v.transpose() * gram_inv;
            for pl in Pauli::ALL {
                let mut t = DVector::zeros(4);
                t[pl.index()] = 2f64.sqrt();
                let want = &oracle * t;
                for m in 0..6 {
                    assert!((b[(pl.index(), m)] - want[m]).abs() < 1e-8);
                }
            }
        }
        assert!(checked >= 5, "only {checked} well-conditioned cases");
    }
}
