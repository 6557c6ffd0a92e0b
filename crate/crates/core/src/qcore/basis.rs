use super::operator::{Operator, C64};
use super::pauli::{Pauli, PauliString};

/// Trace-orthonormal Hermitian basis of the operators on `num_qubits`
/// qubits: Pauli strings divided by `sqrt(d)`, identity first.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    dim: usize,
    labels: Vec<PauliString>,
    elements: Vec<Operator>,
}

impl OperatorBasis {
    pub fn normalized_pauli(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "basis needs at least one qubit");
        let dim = 1usize << num_qubits;
        let norm = 1.0 / (dim as f64).sqrt();
        let mut labels = Vec::with_capacity(dim * dim);
        let mut elements = Vec::with_capacity(dim * dim);
        for idx in 0..dim * dim {
            let word = PauliString(
                (0..num_qubits)
                    .map(|q| Pauli::ALL[(idx >> (2 * (num_qubits - 1 - q))) & 3])
                    .collect(),
            );
            elements.push(word.matrix().scale(norm));
            labels.push(word);
        }
        OperatorBasis {
            dim,
            labels,
            elements,
        }
    }

    /// Hilbert-space dimension `d` (the basis has `d^2` elements).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn labels(&self) -> &[PauliString] {
        &self.labels
    }

    /// Coefficients `Tr[B_a op]`.
    pub fn coefficients(&self, op: &Operator) -> Vec<C64> {
        self.elements.iter().map(|b| b.trace_product(op)).collect()
    }

    /// Real coefficients of a Hermitian operator (imaginary parts dropped).
    pub fn real_coefficients(&self, op: &Operator) -> Vec<f64> {
        self.coefficients(op).into_iter().map(|z| z.re).collect()
    }

    pub fn reconstruct(&self, coeffs: &[C64]) -> Operator {
        assert_eq!(coeffs.len(), self.len());
        let mut acc = Operator::zeros(self.dim);
        for (c, b) in coeffs.iter().zip(&self.elements) {
            acc += &b.scale_complex(*c);
        }
        acc
    }

    pub fn reconstruct_real(&self, coeffs: &[f64]) -> Operator {
        let c: Vec<C64> = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.reconstruct(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::QuantumState;

    #[test]
    fn orthonormal_one_and_two_qubits() {
        for n in 1..=2 {
            let b = OperatorBasis::normalized_pauli(n);
            assert_eq!(b.len(), 1 << (2 * n));
            for (i, x) in b.elements().iter().enumerate() {
                for (j, y) in b.elements().iter().enumerate() {
                    let t = x.trace_product(y);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((t.re - expected).abs() < 1e-12 && t.im.abs() < 1e-12);
                }
                if i > 0 {
                    assert!(x.trace().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bloch_decomposition_of_zero_state() {
        let b = OperatorBasis::normalized_pauli(1);
        let c = b.real_coefficients(QuantumState::basis(1, 0).rho());
        let s = 1.0 / 2f64.sqrt();
        for (got, want) in c.iter().zip([s, 0.0, 0.0, s]) {
            assert!((got - want).abs() < 1e-12);
        }
    }
}
