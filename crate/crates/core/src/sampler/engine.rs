//! Forward (Schrodinger-picture) evaluation of measurement statistics: each
//! qubit's preparation channel and readout are folded into one small map
//! that contracts that qubit's pair axis of the density matrix.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::qcore::local::{pair_superoperator, readout_map, PairTensor};
use crate::qcore::{Channel, Operator, C64};

/// `outcomes x 4` map: apply `channel`, then measure `readout`.
pub(crate) fn qubit_map(channel: &Channel, readout: &[Operator]) -> DMatrix<C64> {
    readout_map(readout) * pair_superoperator(channel)
}

/// `4 x 4` map for a system qubit coupled to a fresh ancilla: attach
/// `ancilla`, apply the two-qubit `channel` on `system (x) ancilla`, measure
/// the four two-bit `readout` effects.
pub(crate) fn dilated_qubit_map(ancilla: &Operator, channel: &Channel, readout: &[Operator]) -> DMatrix<C64> {
    let mut attach = DMatrix::zeros(16, 4);
    for ps in 0..4 {
        for pa in 0..4 {
            attach[(4 * ps + pa, ps)] = ancilla.get(pa >> 1, pa & 1);
        }
    }
    readout_map(readout) * pair_superoperator(channel) * attach
}

/// Joint distribution over outcome words (qubit 0 most significant) after
/// contracting every pair axis with its map. Rounding negatives are clipped.
pub(crate) fn joint_distribution(rho: &Operator, maps: &[&DMatrix<C64>]) -> Vec<f64> {
    let mut t = PairTensor::from_operator(rho);
    for (q, map) in maps.iter().enumerate() {
        t.apply_on_axes(q, 1, map);
    }
    t.into_real().into_iter().map(|p| p.max(0.0)).collect()
}

/// Cumulative table for inverse-transform sampling.
#[derive(Clone, Debug)]
pub(crate) struct Cdf {
    cum: Vec<f64>,
}

impl Cdf {
    pub(crate) fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cum = probs
            .iter()
            .map(|&p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        Cdf { cum }
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cum.last().expect("non-empty");
        let u = rng.random::<f64>() * total;
        self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1)
    }
}

/// Multinomial counts by sequential binomial draws.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::invalid("probability vector", "negative or non-finite entry"));
    }
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("probability vector", "zero total"));
    }
    let mut counts = vec![0; probs.len()];
    let mut left = shots;
    let mut mass = total;
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() || mass <= p {
            counts[i] = left;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let n = Binomial::new(left, q).expect("valid binomial").sample(rng);
        counts[i] = n;
        left -= n;
        mass -= p;
    }
    Ok(counts)
}
