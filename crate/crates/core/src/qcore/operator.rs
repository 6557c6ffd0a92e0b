use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A dense square complex matrix.
///
/// Hermiticity, positivity and unitarity are predicates checked on demand,
/// never assumed.
#[derive(Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Operator(m))
    }

    /// Kraus operators of dimension-changing channels are rectangular; they
    /// share this wrapper but never reach the square-only methods.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        Operator(m)
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Operator(m)
    }

    /// Row-major construction.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} operator",
                entries.len()
            )));
        }
        Ok(Operator(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(dim, &c)
    }

    pub fn identity(dim: usize) -> Self {
        Operator(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator(DMatrix::zeros(dim, dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Operator(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// `|ket><bra|`.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        assert_eq!(ket.len(), bra.len(), "outer product of unequal lengths");
        let n = ket.len();
        Operator(DMatrix::from_fn(n, n, |i, j| ket[i] * bra[j].conj()))
    }

    /// `|psi><psi|`.
    pub fn projector(psi: &[C64]) -> Self {
        Self::outer(psi, psi)
    }

    /// `|index><index|` in a `dim`-dimensional computational basis.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Operator(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Operator(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `Tr[self * other]` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> C64 {
        let n = self.dim();
        debug_assert_eq!(n, other.dim());
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Operator(self.0.kronecker(&other.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Operator(self.0.scale(s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Operator(&self.0 * s)
    }

    /// `self * x * self^dagger`.
    pub fn conjugate(&self, x: &Operator) -> Self {
        Operator(&self.0 * &x.0 * self.0.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Operator) -> f64 {
        (self - other).frobenius_norm()
    }

    pub fn hermitian_part(&self) -> Self {
        Operator((&self.0 + self.0.adjoint()).scale(0.5))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .hermitian_part()
            .0
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Eigen-decomposition of the Hermitian part: ascending eigenvalues and
    /// matching column eigenvectors.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = self.hermitian_part().0.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), order.len(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        (values, vectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.0.adjoint() * &self.0;
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { ONE } else { ZERO };
                (p[(i, j)] - target).norm() <= tol
            })
        })
    }

    /// Projection onto the PSD cone (negative eigenvalues clipped).
    pub fn psd_projection(&self) -> Self {
        let (vals, vecs) = self.eigh();
        let clipped = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| C64::new(v.max(0.0), 0.0)),
        ));
        Operator(&vecs * clipped * vecs.adjoint())
    }

    /// Trace over the second tensor factor of a `(d_keep * d_drop)`-dimensional operator.
    pub fn partial_trace_second(&self, d_keep: usize, d_drop: usize) -> Result<Self> {
        if d_keep * d_drop != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "partial trace {d_keep}x{d_drop} of dim {}",
                self.dim()
            )));
        }
        Ok(Operator(DMatrix::from_fn(d_keep, d_keep, |i, j| {
            (0..d_drop).map(|a| self.0[(i * d_drop + a, j * d_drop + a)]).sum()
        })))
    }

    /// Trace over the first tensor factor.
    pub fn partial_trace_first(&self, d_drop: usize, d_keep: usize) -> Result<Self> {
        if d_keep * d_drop != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "partial trace {d_drop}x{d_keep} of dim {}",
                self.dim()
            )));
        }
        Ok(Operator(DMatrix::from_fn(d_keep, d_keep, |i, j| {
            (0..d_drop).map(|a| self.0[(a * d_keep + i, a * d_keep + j)]).sum()
        })))
    }

    /// Row-major `(re, im)` pairs.
    pub fn to_row_major_pairs(&self) -> Vec<[f64; 2]> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.0[(i, j)];
                out.push([z.re, z.im]);
            }
        }
        out
    }

    pub fn from_row_major_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        let n = (pairs.len() as f64).sqrt().round() as usize;
        let entries: Vec<C64> = pairs.iter().map(|p| C64::new(p[0], p[1])).collect();
        Self::from_rows(n, &entries)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator{}", self.0)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        self.0 += &rhs.0;
    }
}

/// Kronecker product of a non-empty list, in list order.
pub fn tensor(ops: &[Operator]) -> Result<Operator> {
    let (first, rest) = ops.split_first().ok_or(Error::Empty("tensor of no operators"))?;
    Ok(rest.iter().fold(first.clone(), |acc, op| acc.kron(op)))
}

/// Sum of a non-empty list of equally sized operators.
pub fn sum(ops: &[Operator]) -> Option<Operator> {
    let (first, rest) = ops.split_first()?;
    let mut acc = first.clone();
    for op in rest {
        acc += op;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> Operator {
        Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn empty_tensor_is_an_error() {
        assert!(matches!(tensor(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn partial_traces_of_product() {
        let a = Operator::diag(&[0.25, 0.75]);
        let b = sx();
        let ab = a.kron(&b);
        // Tr(b) = 0, Tr(a) = 1
        assert!(ab.partial_trace_first(2, 2).unwrap().distance(&b) < 1e-15);
        assert!(ab.partial_trace_second(2, 2).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn psd_projection_clips_negative_part() {
        let m = Operator::diag(&[-0.5, 1.5]);
        let p = m.psd_projection();
        assert!(p.distance(&Operator::diag(&[0.0, 1.5])) < 1e-12);
    }

    #[test]
    fn non_square_rejected() {
        assert!(Operator::from_matrix(DMatrix::zeros(2, 3)).is_err());
        assert!(Operator::from_rows(2, &[ONE; 3]).is_err());
    }
}
