use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::{Operator, OperatorBasis, QuantumState};
use crate::tol;

/// A validated list of effects on a `2^n`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<Operator>,
}

impl Povm {
    /// Checks positivity and completeness at [`tol::EXACT`].
    pub fn new(effects: Vec<Operator>) -> Result<Self> {
        Self::with_tolerance(effects, tol::EXACT)
    }

    pub fn with_tolerance(effects: Vec<Operator>, tolerance: f64) -> Result<Self> {
        let first = effects.first().ok_or(Error::Empty("POVM with no effects"))?;
        let dim = first.dim();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!("POVM dimension {dim} is not 2^n")));
        }
        let mut total = Operator::zeros(dim);
        for (m, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "effect {m} has dimension {}, expected {dim}",
                    e.dim()
                )));
            }
            if !e.is_hermitian(tolerance) {
                return Err(Error::invalid("POVM", format!("effect {m} is not Hermitian")));
            }
            let min = e.min_eigenvalue();
            if min < -tolerance {
                return Err(Error::invalid("POVM", format!("effect {m} has eigenvalue {min:e}")));
            }
            total += e;
        }
        let defect = total.distance(&Operator::identity(dim));
        if defect > tolerance {
            return Err(Error::invalid("POVM", format!("effects sum to identity only within {defect:e}")));
        }
        Ok(Povm { effects })
    }

    pub(crate) fn new_unchecked(effects: Vec<Operator>) -> Self {
        Povm { effects }
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn into_effects(self) -> Vec<Operator> {
        self.effects
    }

    /// Outcome probabilities `Tr[rho Pi_m]`.
    pub fn probabilities(&self, state: &QuantumState) -> Vec<f64> {
        self.effects.iter().map(|e| state.expectation(e)).collect()
    }

    /// Real `d^2 x M` matrix whose columns are the effects in the normalised
    /// Pauli basis.
    pub fn vectorized(&self) -> DMatrix<f64> {
        let basis = OperatorBasis::normalized_pauli(self.num_qubits());
        let cols: Vec<Vec<f64>> = self.effects.iter().map(|e| basis.real_coefficients(e)).collect();
        DMatrix::from_fn(basis.len(), self.len(), |r, c| cols[c][r])
    }

    /// Smallest of the `d^2` leading singular values of [`Self::vectorized`];
    /// zero when there are fewer than `d^2` effects.
    pub fn smallest_singular_value(&self) -> f64 {
        let d2 = self.dim() * self.dim();
        if self.len() < d2 {
            return 0.0;
        }
        let mut sv: Vec<f64> = self.vectorized().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv[d2 - 1]
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.smallest_singular_value() > tol::RANK_CUTOFF
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_effects() {
        assert!(Povm::new(vec![]).is_err());
        assert!(Povm::new(vec![Operator::diag(&[1.0, 0.0])]).is_err());
        assert!(Povm::new(vec![Operator::diag(&[1.2, 0.0]), Operator::diag(&[-0.2, 1.0])]).is_err());
        assert!(Povm::new(vec![Operator::identity(2), Operator::zeros(4)]).is_err());
    }

    #[test]
    fn computational_basis_is_not_ic() {
        let p = Povm::new(vec![Operator::diag(&[1.0, 0.0]), Operator::diag(&[0.0, 1.0])]).unwrap();
        assert!(!p.is_informationally_complete());
        assert_eq!(p.probabilities(&QuantumState::basis(1, 1)), vec![0.0, 1.0]);
    }
}
