use nalgebra::DMatrix;

use super::operator::{Operator, C64};
use super::pauli::{Pauli, PauliString};
use crate::error::{Error, Result};
use crate::tol;

/// A quantum channel in Kraus form. The Kraus list is canonical; the Choi
/// matrix is available as a derived view.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<Operator>,
}

impl Channel {
    /// Validates shapes and trace preservation (`sum K^dagger K = I`).
    pub fn new(input_dim: usize, output_dim: usize, kraus: Vec<DMatrix<C64>>) -> Result<Self> {
        Self::with_tolerance(input_dim, output_dim, kraus, tol::EXACT)
    }

    pub fn with_tolerance(
        input_dim: usize,
        output_dim: usize,
        kraus: Vec<DMatrix<C64>>,
        tolerance: f64,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Empty("channel with no Kraus operators"));
        }
        if let Some(k) = kraus.iter().find(|k| k.nrows() != output_dim || k.ncols() != input_dim) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {}x{} for a {input_dim}->{output_dim} channel",
                k.nrows(),
                k.ncols()
            )));
        }
        let ch = Channel {
            input_dim,
            output_dim,
            kraus: kraus.into_iter().map(Operator::wrap).collect(),
        };
        let defect = ch.trace_preservation_defect();
        if defect > tolerance {
            return Err(Error::invalid(
                "channel",
                format!("not trace preserving (defect {defect:e})"),
            ));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Channel {
            input_dim: dim,
            output_dim: dim,
            kraus: vec![Operator::identity(dim)],
        }
    }

    pub fn unitary(u: &Operator) -> Result<Self> {
        if !u.is_unitary(tol::EXACT) {
            return Err(Error::invalid("unitary channel", "operator is not unitary"));
        }
        Ok(Channel {
            input_dim: u.dim(),
            output_dim: u.dim(),
            kraus: vec![u.clone()],
        })
    }

    /// `rho -> (1-p) rho + p Tr[rho] I/d` on `num_qubits` qubits, with Pauli
    /// Kraus operators. `p` in `[0, 1]`.
    pub fn depolarizing(num_qubits: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("depolarizing rate", format!("{p} outside [0, 1]")));
        }
        let dim = 1usize << num_qubits;
        let d2 = (dim * dim) as f64;
        let mut kraus = vec![Operator::identity(dim).scale((1.0 - p + p / d2).sqrt())];
        if p > 0.0 {
            let w = (p / d2).sqrt();
            for idx in 1..dim * dim {
                let word = (0..num_qubits)
                    .map(|q| Pauli::ALL[(idx >> (2 * (num_qubits - 1 - q))) & 3])
                    .collect();
                kraus.push(PauliString(word).matrix().scale(w));
            }
        }
        Ok(Channel {
            input_dim: dim,
            output_dim: dim,
            kraus,
        })
    }

    /// Single-qubit amplitude damping towards `|0>` with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid("damping rate", format!("{gamma} outside [0, 1]")));
        }
        let k0 = Operator::diag(&[1.0, (1.0 - gamma).sqrt()]);
        let k1 = Operator::from_real_rows(2, &[0.0, gamma.sqrt(), 0.0, 0.0])?;
        Ok(Channel {
            input_dim: 2,
            output_dim: 2,
            kraus: vec![k0, k1],
        })
    }

    /// Single-qubit bit flip with probability `p`.
    pub fn bit_flip(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("flip probability", format!("{p} outside [0, 1]")));
        }
        Ok(Channel {
            input_dim: 2,
            output_dim: 2,
            kraus: vec![
                Operator::identity(2).scale((1.0 - p).sqrt()),
                Pauli::X.matrix().scale(p.sqrt()),
            ],
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus(&self) -> &[Operator] {
        &self.kraus
    }

    fn trace_preservation_defect(&self) -> f64 {
        let mut acc = DMatrix::<C64>::zeros(self.input_dim, self.input_dim);
        for k in &self.kraus {
            acc += k.matrix().adjoint() * k.matrix();
        }
        let id = DMatrix::<C64>::identity(self.input_dim, self.input_dim);
        (acc - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tolerance: f64) -> bool {
        self.trace_preservation_defect() <= tolerance
    }

    /// `sum K rho K^dagger`.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "channel input {} applied to dim {}",
                self.input_dim,
                rho.dim()
            )));
        }
        let mut out = DMatrix::<C64>::zeros(self.output_dim, self.output_dim);
        for k in &self.kraus {
            out += k.matrix() * rho.matrix() * k.matrix().adjoint();
        }
        Ok(Operator::from_matrix_unchecked(out))
    }

    /// Heisenberg-picture map `sum K^dagger X K`, so that
    /// `Tr[E(rho) X] = Tr[rho E^dagger(X)]`.
    pub fn apply_adjoint(&self, x: &Operator) -> Result<Operator> {
        if x.dim() != self.output_dim {
            return Err(Error::DimensionMismatch(format!(
                "adjoint of channel with output {} applied to dim {}",
                self.output_dim,
                x.dim()
            )));
        }
        let mut out = DMatrix::<C64>::zeros(self.input_dim, self.input_dim);
        for k in &self.kraus {
            out += k.matrix().adjoint() * x.matrix() * k.matrix();
        }
        Ok(Operator::from_matrix_unchecked(out))
    }

    /// `next` applied after `self`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        compose(&[self.clone(), next.clone()])
    }

    /// Parallel composition `self (x) other`.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        let ch = Channel {
            input_dim: self.input_dim * other.input_dim,
            output_dim: self.output_dim * other.output_dim,
            kraus,
        };
        ch.compressed()
    }

    /// Choi matrix `sum_ij |i><j| (x) E(|i><j|)`, input factor first.
    pub fn choi(&self) -> Operator {
        let (din, dout) = (self.input_dim, self.output_dim);
        let mut j = DMatrix::<C64>::zeros(din * dout, din * dout);
        for k in &self.kraus {
            // |v> = sum_i |i> (x) K|i>
            let v: Vec<C64> = (0..din * dout).map(|idx| k.get(idx % dout, idx / dout)).collect();
            for r in 0..din * dout {
                for c in 0..din * dout {
                    j[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Operator::from_matrix_unchecked(j)
    }

    /// Kraus form of a Choi matrix (input factor first). Negative
    /// eigenvalues below `-tol` are rejected, tiny ones dropped.
    pub fn from_choi(choi: &Operator, input_dim: usize, output_dim: usize) -> Result<Channel> {
        Self::from_choi_with_tolerance(choi, input_dim, output_dim, tol::EXACT)
    }

    pub fn from_choi_with_tolerance(
        choi: &Operator,
        input_dim: usize,
        output_dim: usize,
        tolerance: f64,
    ) -> Result<Channel> {
        if choi.dim() != input_dim * output_dim {
            return Err(Error::DimensionMismatch(format!(
                "Choi dim {} for {input_dim}->{output_dim}",
                choi.dim()
            )));
        }
        let (vals, vecs) = choi.eigh();
        if vals[0] < -tolerance {
            return Err(Error::invalid("Choi matrix", format!("min eigenvalue {:e}", vals[0])));
        }
        let cutoff = 1e-14 * vals.last().copied().unwrap_or(0.0).max(1.0);
        let mut kraus = Vec::new();
        for (idx, &lam) in vals.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let s = lam.sqrt();
            kraus.push(DMatrix::from_fn(output_dim, input_dim, |o, i| {
                vecs[(i * output_dim + o, idx)] * s
            }));
        }
        if kraus.is_empty() {
            kraus.push(DMatrix::zeros(output_dim, input_dim));
        }
        Channel::with_tolerance(input_dim, output_dim, kraus, tolerance.max(tol::EXACT))
    }

    /// Equivalent channel with at most `din * dout` Kraus operators.
    pub fn compressed(&self) -> Channel {
        if self.kraus.len() <= self.input_dim * self.output_dim {
            return self.clone();
        }
        let kraus = Self::from_choi_with_tolerance(
            &self.choi(),
            self.input_dim,
            self.output_dim,
            1e-7,
        )
        .map(|c| c.kraus)
        .unwrap_or_else(|_| self.kraus.clone());
        Channel {
            kraus,
            ..self.clone()
        }
    }

    /// Rebuilds the Kraus list so it is exactly trace preserving up to
    /// rounding, by normalising with `(sum K^dagger K)^{-1/2}`.
    pub(crate) fn renormalized(&self) -> Channel {
        let mut acc = Operator::zeros(self.input_dim);
        for k in &self.kraus {
            acc += &Operator::from_matrix_unchecked(k.matrix().adjoint() * k.matrix());
        }
        let (vals, vecs) = acc.eigh();
        let inv_sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| C64::new(1.0 / v.max(1e-300).sqrt(), 0.0)),
        ));
        let t = &vecs * inv_sqrt * vecs.adjoint();
        Channel {
            kraus: self
                .kraus
                .iter()
                .map(|k| Operator::wrap(k.matrix() * &t))
                .collect(),
            ..self.clone()
        }
    }
}

/// Composition in application order: the first channel acts first.
pub fn compose(channels: &[Channel]) -> Result<Channel> {
    let (first, rest) = channels
        .split_first()
        .ok_or(Error::Empty("composition of no channels"))?;
    let mut acc = first.clone();
    for next in rest {
        if next.input_dim != acc.output_dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot feed a {}-dim output into a {}-dim input",
                acc.output_dim, next.input_dim
            )));
        }
        let mut kraus = Vec::with_capacity(acc.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &acc.kraus {
                kraus.push(Operator::wrap(b.matrix() * a.matrix()));
            }
        }
        acc = Channel {
            input_dim: acc.input_dim,
            output_dim: next.output_dim,
            kraus,
        }
        .compressed();
    }
    Ok(acc)
}
