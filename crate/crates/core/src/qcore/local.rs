//! Qubit-local linear maps on density matrices.
//!
//! An n-qubit operator is viewed as a tensor with one axis of size 4 per
//! qubit, indexed by the pair `2 * row_bit + col_bit`. Channels and
//! measurements acting on runs of adjacent qubits then become contractions
//! along those axes, which avoids forming `2^n x 2^n` Kronecker products.

use nalgebra::DMatrix;

use super::channel::Channel;
use super::operator::{Operator, C64, ZERO};

#[derive(Clone, Debug)]
pub struct PairTensor {
    /// Size of each axis, most significant first.
    shape: Vec<usize>,
    data: Vec<C64>,
}

impl PairTensor {
    pub fn from_operator(op: &Operator) -> Self {
        let dim = op.dim();
        assert!(dim.is_power_of_two(), "qubit operator expected");
        let n = dim.trailing_zeros() as usize;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[pair_index(i, j, n)] = op.get(i, j);
            }
        }
        PairTensor {
            shape: vec![4; n],
            data,
        }
    }

    pub fn num_axes(&self) -> usize {
        self.shape.len()
    }

    /// Back to a dense operator; only valid while every axis still has size 4.
    pub fn to_operator(&self) -> Operator {
        assert!(self.shape.iter().all(|&s| s == 4), "tensor has been contracted");
        let n = self.shape.len();
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = self.data[pair_index(i, j, n)];
            }
        }
        Operator::from_matrix_unchecked(m)
    }

    /// Applies `map` (rows = new size, cols = product of the old axis sizes)
    /// on the run of `count` consecutive axes starting at `first`, merging
    /// them into a single axis.
    pub fn apply_on_axes(&mut self, first: usize, count: usize, map: &DMatrix<C64>) {
        assert!(count >= 1 && first + count <= self.shape.len());
        let axis: usize = self.shape[first..first + count].iter().product();
        assert_eq!(map.ncols(), axis, "map width does not match axes");
        let outer: usize = self.shape[..first].iter().product();
        let inner: usize = self.shape[first + count..].iter().product();
        let rows = map.nrows();
        let mut out = vec![ZERO; outer * rows * inner];
        for o in 0..outer {
            let src = &self.data[o * axis * inner..(o + 1) * axis * inner];
            let dst = &mut out[o * rows * inner..(o + 1) * rows * inner];
            for r in 0..rows {
                let d = &mut dst[r * inner..(r + 1) * inner];
                for c in 0..axis {
                    let w = map[(r, c)];
                    if w == ZERO {
                        continue;
                    }
                    let s = &src[c * inner..(c + 1) * inner];
                    for (x, y) in d.iter_mut().zip(s) {
                        *x += w * y;
                    }
                }
            }
        }
        self.shape.splice(first..first + count, [rows]);
        self.data = out;
    }

    /// Applies a channel on `k` consecutive qubits starting at `first`.
    pub fn apply_channel(&mut self, first: usize, channel: &Channel) {
        let k = channel.input_dim().trailing_zeros() as usize;
        let sup = pair_superoperator(channel);
        self.apply_on_axes(first, k, &sup);
        // restore one size-4 axis per qubit
        if k > 1 {
            self.shape.splice(first..first + 1, std::iter::repeat_n(4, k));
        }
    }

    /// Real parts of the fully contracted tensor, in mixed-radix order.
    pub fn into_real(self) -> Vec<f64> {
        self.data.into_iter().map(|z| z.re).collect()
    }
}

fn pair_index(i: usize, j: usize, n: usize) -> usize {
    let mut idx = 0;
    for q in 0..n {
        let shift = n - 1 - q;
        let p = 2 * ((i >> shift) & 1) + ((j >> shift) & 1);
        idx = idx * 4 + p;
    }
    idx
}

/// The channel as a `4^k x 4^k` matrix on the pair axes of its `k` qubits.
pub fn pair_superoperator(channel: &Channel) -> DMatrix<C64> {
    let dim = channel.input_dim();
    assert_eq!(dim, channel.output_dim(), "local channels must preserve dimension");
    let k = dim.trailing_zeros() as usize;
    let size = dim * dim;
    let mut s = DMatrix::zeros(size, size);
    for kr in channel.kraus() {
        for ip in 0..dim {
            for jp in 0..dim {
                let row = pair_index(ip, jp, k);
                for i in 0..dim {
                    let a = kr.get(ip, i);
                    if a == ZERO {
                        continue;
                    }
                    for j in 0..dim {
                        s[(row, pair_index(i, j, k))] += a * kr.get(jp, j).conj();
                    }
                }
            }
        }
    }
    s
}

/// Measurement map `R[m][(i,j)] = E_m[j,i]`, so that contracting a state's
/// pair axes with it yields `Tr[rho E_m]`.
pub fn readout_map(effects: &[Operator]) -> DMatrix<C64> {
    let dim = effects[0].dim();
    let k = dim.trailing_zeros() as usize;
    let mut r = DMatrix::zeros(effects.len(), dim * dim);
    for (m, e) in effects.iter().enumerate() {
        for i in 0..dim {
            for j in 0..dim {
                r[(m, pair_index(i, j, k))] = e.get(j, i);
            }
        }
    }
    r
}

/// Joint outcome probabilities `Tr[rho (E^(1)_{m1} (x) ... )]` for groups of
/// consecutive qubits, each measured with its own POVM. Result is indexed in
/// mixed radix with the first group most significant.
pub fn product_distribution(rho: &Operator, groups: &[&[Operator]]) -> Vec<f64> {
    let mut t = PairTensor::from_operator(rho);
    let mut axis = 0;
    for effects in groups {
        let k = effects[0].dim().trailing_zeros() as usize;
        t.apply_on_axes(axis, k, &readout_map(effects));
        axis += 1;
    }
    assert_eq!(axis, t.num_axes(), "measurement groups do not cover the register");
    t.into_real()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{random, tensor, Pauli};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_and_local_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::density_matrix(3, &mut rng);
        let mut t = PairTensor::from_operator(rho.rho());
        assert!(t.to_operator().distance(rho.rho()) < 1e-15);

        let ch = random::channel(2, 3, &mut rng);
        t.apply_channel(1, &ch);
        let full = Channel::identity(2).tensor(&ch).tensor(&Channel::identity(2));
        let want = full.apply(rho.rho()).unwrap();
        assert!(t.to_operator().distance(&want) < 1e-12);
    }

    #[test]
    fn two_qubit_channel_on_middle_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random::density_matrix(4, &mut rng);
        let ch = random::channel(4, 2, &mut rng);
        let mut t = PairTensor::from_operator(rho.rho());
        t.apply_channel(1, &ch);
        let full = Channel::identity(2).tensor(&ch).tensor(&Channel::identity(2));
        assert!(t.to_operator().distance(&full.apply(rho.rho()).unwrap()) < 1e-12);
    }

    #[test]
    fn distribution_matches_dense_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random::density_matrix(2, &mut rng);
        let zs = [
            Operator::basis_projector(2, 0),
            Operator::basis_projector(2, 1),
        ];
        let x = Pauli::X.matrix();
        let xs = [
            (&Operator::identity(2) + &x).scale(0.5),
            (&Operator::identity(2) - &x).scale(0.5),
        ];
        let p = product_distribution(rho.rho(), &[&zs, &xs]);
        for a in 0..2 {
            for b in 0..2 {
                let e = tensor(&[zs[a].clone(), xs[b].clone()]).unwrap();
                assert!((p[2 * a + b] - rho.expectation(&e)).abs() < 1e-13);
            }
        }
    }
}
