use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::omega::OmegaTable;
use crate::error::{Error, Result};
use crate::povm::Povm;
use crate::qcore::local::product_distribution;
use crate::qcore::QuantumState;

/// Largest outcome lattice enumerated by [`exact_expectation`].
pub const MAX_EXACT_OUTCOMES: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Outcome index -> number of shots, in ascending index order.
pub type OutcomeCounts = BTreeMap<u64, u64>;

pub fn count_outcomes(outcomes: &[u64]) -> OutcomeCounts {
    let mut counts = OutcomeCounts::new();
    for &o in outcomes {
        *counts.entry(o).or_default() += 1;
    }
    counts
}

/// Sample mean of `omega` over the shots and its standard error
/// `sqrt((mean(omega^2) - mean^2) / (S - 1))`.
///
/// The variance is accumulated around the mean, which is the same quantity
/// but cannot go negative through cancellation.
pub fn estimate(outcomes: &[u64], table: &OmegaTable) -> Result<EstimateResult> {
    estimate_counts(&count_outcomes(outcomes), table)
}

pub fn estimate_counts(counts: &OutcomeCounts, table: &OmegaTable) -> Result<EstimateResult> {
    let weighted = counts
        .iter()
        .map(|(&idx, &n)| Ok((table.omega(idx)?, n)))
        .collect::<Result<Vec<_>>>()?;
    estimate_weighted(&weighted)
}

/// Estimate from `(omega, multiplicity)` pairs.
pub fn estimate_weighted(values: &[(f64, u64)]) -> Result<EstimateResult> {
    let shots: u64 = values.iter().map(|(_, n)| n).sum();
    if shots < 2 {
        return Err(Error::invalid("shot record", format!("{shots} shots; need at least 2")));
    }
    let s = shots as f64;
    let mut total = CompensatedSum::default();
    for &(w, n) in values {
        total.add(w * n as f64);
    }
    let mean = total.value() / s;
    let mut sq = CompensatedSum::default();
    for &(w, n) in values {
        let d = w - mean;
        sq.add(d * d * n as f64);
    }
    let var_of_mean = (sq.value() / s).max(0.0) / (s - 1.0);
    Ok(EstimateResult {
        mean,
        stderr: var_of_mean.sqrt(),
        shots,
    })
}

/// `sum_m omega_m Tr[rho Pi_m]` over the full outcome lattice.
pub fn exact_expectation(rho: &QuantumState, table: &OmegaTable, povms: &[Povm]) -> Result<f64> {
    let space = table.space();
    if povms.len() != rho.num_qubits() || povms.len() != space.num_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{} POVMs, {}-qubit state, {}-qubit table",
            povms.len(),
            rho.num_qubits(),
            space.num_qubits()
        )));
    }
    if let Some((q, p)) = povms.iter().enumerate().find(|(q, p)| p.dim() != 2 || p.len() != space.radices()[*q]) {
        return Err(Error::DimensionMismatch(format!(
            "POVM on qubit {q} has {} effects of dimension {}",
            p.len(),
            p.dim()
        )));
    }
    if space.size() > MAX_EXACT_OUTCOMES {
        return Err(Error::TooLarge(format!(
            "{} outcomes exceeds {MAX_EXACT_OUTCOMES}",
            space.size()
        )));
    }
    let groups: Vec<&[_]> = povms.iter().map(|p| p.effects()).collect();
    let probs = product_distribution(rho.rho(), &groups);
    let mut acc = CompensatedSum::default();
    for (idx, p) in probs.into_iter().enumerate() {
        if p != 0.0 {
            acc.add(p * table.omega(idx as u64)?);
        }
    }
    Ok(acc.value())
}

/// Inverse-variance weighted combination of independent estimates.
pub fn merge_estimates(results: &[EstimateResult]) -> Result<EstimateResult> {
    if results.is_empty() {
        return Err(Error::Empty("no estimates to merge"));
    }
    if let [only] = results {
        return Ok(*only);
    }
    if let Some(bad) = results.iter().find(|r| !(r.stderr > 0.0)) {
        return Err(Error::invalid("estimate", format!("stderr {} cannot be weighted", bad.stderr)));
    }
    let mut wsum = CompensatedSum::default();
    let mut wmean = CompensatedSum::default();
    for r in results {
        let w = 1.0 / (r.stderr * r.stderr);
        wsum.add(w);
        wmean.add(w * r.mean);
    }
    Ok(EstimateResult {
        mean: wmean.value() / wsum.value(),
        stderr: (1.0 / wsum.value()).sqrt(),
        shots: results.iter().map(|r| r.shots).sum(),
    })
}
