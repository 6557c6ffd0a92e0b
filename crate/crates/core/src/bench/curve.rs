use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::adaptive::{adaptive_run, AdaptiveOutcome};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::qcore::{ground_state, PauliObservable};
use crate::sampler::derive_seed;

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.59e-3;

const REPETITION_TAG: u64 = 0x5245_5053;

/// Aggregate of all repetitions of one experiment, one entry per grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCurve {
    pub label: String,
    pub exact: f64,
    pub shots: Vec<u64>,
    /// `|mean over repetitions - exact|`.
    pub true_mean_error: Vec<f64>,
    /// Sample standard deviation of the repetitions' estimates.
    pub std_error_reps: Vec<f64>,
    /// Mean of the repetitions' own standard errors.
    pub estimated_std_error: Vec<f64>,
}

impl ConvergenceCurve {
    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub curve: ConvergenceCurve,
    pub runs: Vec<AdaptiveOutcome>,
}

/// Loads the fixture and noise config named by `cfg` and runs it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ConvergenceCurve> {
    cfg.validate()?;
    let obs = PauliObservable::from_file(&cfg.hamiltonian)?;
    let noise = cfg.noise.load()?;
    Ok(run_experiment_with(&obs, noise.as_ref(), cfg)?.curve)
}

/// Runs every repetition on the exact ground state of `obs`, in parallel,
/// and aggregates in repetition order.
pub fn run_experiment_with(
    obs: &PauliObservable,
    noise: Option<&NoiseModel>,
    cfg: &ExperimentConfig,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    let (exact, rho) = ground_state(obs)?;
    let runs = (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| {
            let ac = cfg.adaptive_config(derive_seed(cfg.seed, REPETITION_TAG, r as u64));
            adaptive_run(obs, &rho, noise, None, Some(exact), &ac)
        })
        .collect::<Result<Vec<_>>>()?;
    let reps = runs.len() as f64;
    let mut curve = ConvergenceCurve {
        label: cfg.label(),
        exact,
        shots: cfg.shot_grid.clone(),
        true_mean_error: vec![],
        std_error_reps: vec![],
        estimated_std_error: vec![],
    };
    for i in 0..cfg.shot_grid.len() {
        let means: Vec<f64> = runs.iter().map(|o| o.trace[i].mean).collect();
        let mean = means.iter().sum::<f64>() / reps;
        let sd = if runs.len() > 1 {
            (means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (reps - 1.0)).sqrt()
        } else {
            0.0
        };
        curve.true_mean_error.push((mean - exact).abs());
        curve.std_error_reps.push(sd);
        curve
            .estimated_std_error
            .push(runs.iter().map(|o| o.trace[i].stderr).sum::<f64>() / reps);
    }
    Ok(ExperimentResult { curve, runs })
}

/// First grid point from which the true error stays below chemical
/// accuracy; `None` if it never does.
pub fn chemical_accuracy_crossing(curve: &ConvergenceCurve) -> Option<u64> {
    let mut crossing = None;
    for (&s, &e) in curve.shots.iter().zip(&curve.true_mean_error) {
        if e < CHEMICAL_ACCURACY {
            crossing.get_or_insert(s);
        } else {
            crossing = None;
        }
    }
    crossing
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("regression data", "need two or more paired points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("regression data", "log-log fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("regression data", "all x values equal"));
    }
    Ok(sxy / sxx)
}
