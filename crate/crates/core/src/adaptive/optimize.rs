use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::DetectorModel;
use super::moment::{build_d_matrix, Acquisition, QubitMoment};
use crate::error::{Error, Result};
use crate::estimator::{decompose_pauli, BMatrix};
use crate::povm::Povm;
use crate::qcore::PauliObservable;

/// Coordinate-descent settings for one classical update.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Central finite-difference step, radians.
    pub fd_step: f64,
    /// Backtracking factor.
    pub shrink: f64,
    pub max_halvings: usize,
    /// Gradient steps per qubit and update. Together with `initial_move`
    /// this bounds how far one update can move from the data it was fitted
    /// to.
    pub max_steps: usize,
    /// Largest single-parameter move of the first trial step, radians.
    pub initial_move: f64,
    /// Candidates whose model effects have a smaller singular value are
    /// treated as not informationally complete. Keeps the optimiser away
    /// from the boundary where the b-matrix loses precision.
    pub min_singular_value: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            fd_step: 1e-3,
            shrink: 0.5,
            max_halvings: 20,
            max_steps: 5,
            initial_move: 0.1,
            min_singular_value: 0.05,
        }
    }
}

/// The data-driven objective of one qubit: estimated second moment of the
/// estimator if only this qubit's parameters change.
pub struct QubitObjective<'a> {
    model: &'a DetectorModel,
    old_effects: &'a Povm,
    moment: QubitMoment,
    min_singular_value: f64,
}

impl<'a> QubitObjective<'a> {
    pub fn new(
        acq: &Acquisition,
        observable: &PauliObservable,
        old_bmatrix: &BMatrix,
        qubit: usize,
        model: &'a DetectorModel,
        old_effects: &'a Povm,
        min_singular_value: f64,
    ) -> Result<Self> {
        Ok(QubitObjective {
            model,
            old_effects,
            moment: QubitMoment::new(acq, observable, old_bmatrix, qubit)?,
            min_singular_value,
        })
    }

    /// `+inf` for parameters whose model effects are not informationally
    /// complete.
    pub fn value(&self, params: &[f64]) -> f64 {
        let eval = || -> Result<f64> {
            let new = self.model.model_effects(params)?;
            let s = new.smallest_singular_value();
            if !(s >= self.min_singular_value) {
                return Err(Error::NotInformationallyComplete(s));
            }
            let b = decompose_pauli(&new)?;
            let d = build_d_matrix(&new, self.old_effects)?;
            Ok(self.moment.evaluate(&b, &d))
        };
        match eval() {
            Ok(v) if v.is_finite() => v,
            _ => f64::INFINITY,
        }
    }
}

/// Result of minimising one qubit's objective.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitUpdate {
    pub params: Vec<f64>,
    pub before: f64,
    pub after: f64,
}

/// Finite-difference gradient descent with backtracking; never returns a
/// point worse than `start`.
pub fn minimize(objective: &QubitObjective, start: &[f64], cfg: &OptimizerConfig) -> QubitUpdate {
    let family = objective.model.family();
    let mut x = start.to_vec();
    let before = objective.value(&x);
    let mut f = before;
    if !f.is_finite() {
        return QubitUpdate {
            params: x,
            before,
            after: f,
        };
    }
    let h = cfg.fd_step;
    for _ in 0..cfg.max_steps {
        let grad: Vec<f64> = (0..x.len())
            .map(|i| {
                // clamping turns the central difference one-sided at a bound
                let mut hi = x.clone();
                let mut lo = x.clone();
                hi[i] += h;
                lo[i] -= h;
                family.clamp(&mut hi);
                family.clamp(&mut lo);
                let span = hi[i] - lo[i];
                let g = (objective.value(&hi) - objective.value(&lo)) / span;
                if span > 0.0 && g.is_finite() {
                    g
                } else {
                    0.0
                }
            })
            .collect();
        let gmax = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        if !(gmax.is_finite() && gmax > 0.0) {
            break;
        }
        let mut eta = cfg.initial_move / gmax;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let mut cand: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - eta * gi).collect();
            family.clamp(&mut cand);
            let fc = objective.value(&cand);
            if fc < f {
                accepted = Some((cand, fc));
                break;
            }
            eta *= cfg.shrink;
        }
        match accepted {
            Some((cand, fc)) => {
                let gain = f - fc;
                x = cand;
                f = fc;
                if gain <= 1e-12 * f.abs() {
                    break;
                }
            }
            None => break,
        }
    }
    QubitUpdate {
        params: x,
        before,
        after: f,
    }
}

/// One classical update: every qubit is optimised with the others frozen at
/// their current parameters, and the results are concatenated.
pub fn optimize_step(
    params: &[Vec<f64>],
    acq: &Acquisition,
    observable: &PauliObservable,
    old_effects: &[Povm],
    models: &[DetectorModel],
    cfg: &OptimizerConfig,
) -> Result<Vec<QubitUpdate>> {
    let n = params.len();
    if old_effects.len() != n || models.len() != n || acq.space.num_qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} parameter blocks, {} effect sets, {} models, {}-qubit record",
            old_effects.len(),
            models.len(),
            acq.space.num_qubits()
        )));
    }
    let bmatrix = BMatrix::from_povms(old_effects)?;
    (0..n)
        .into_par_iter()
        .map(|q| {
            let obj = QubitObjective::new(acq, observable, &bmatrix, q, &models[q], &old_effects[q], cfg.min_singular_value)?;
            Ok(minimize(&obj, &params[q], cfg))
        })
        .collect()
}
