use serde::{Deserialize, Serialize};

use super::model::DetectorModel;
use super::moment::{empirical_second_moment, Acquisition};
use super::optimize::{optimize_step, OptimizerConfig};
use crate::error::{Error, Result};
use crate::estimator::{estimate_counts, merge_estimates, BMatrix, EstimateResult, OmegaTable, OutcomeSpace};
use crate::noise::NoiseModel;
use crate::povm::{PovmFamily, Povm};
use crate::qcore::{PauliObservable, QuantumState};
use crate::sampler::{derive_seed, dilation_version, povm_version, sample_counts_dilation, sample_counts_pm, Stream};
use crate::tomography::{run_qdt, DilationPipelineSource, MeasurementSource, PmPipelineSource, ShotMode};

/// How the effects used to interpret the data are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mitigation {
    /// Ideal effects of the requested parameters.
    #[default]
    None,
    /// Reconstructed or modelled effects of the real detector.
    Qdt,
}

/// With mitigation on: repeat detector tomography after every parameter
/// update, or trust the detector model's effects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QdtMode {
    #[default]
    Repeat,
    ModelOnly,
}

pub const DEFAULT_QDT_SHOTS: u64 = 250_000;
pub const MAX_ADAPTIVE_ITERATIONS: usize = 10;
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptiveConfig {
    pub family: FamilyChoice,
    /// Shots taken in each iteration.
    pub schedule: Vec<u64>,
    /// `false` keeps the initial parameters: the non-adaptive baseline.
    pub adapt: bool,
    pub mitigation: Mitigation,
    pub qdt_mode: QdtMode,
    /// Shots per input state for every tomography experiment; 0 means exact
    /// probabilities.
    pub tomography_shots: u64,
    pub optimizer: OptimizerConfig,
    pub max_updates: usize,
    /// Updates stop once no qubit improves its objective by this fraction.
    pub convergence: f64,
    pub seed: u64,
}

/// Serialisable choice of POVM family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyChoice {
    #[default]
    Pm,
    Dilation,
}

impl FamilyChoice {
    pub fn family(self) -> PovmFamily {
        match self {
            FamilyChoice::Pm => PovmFamily::default(),
            FamilyChoice::Dilation => PovmFamily::Dilation,
        }
    }
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            family: FamilyChoice::Pm,
            schedule: doubling_schedule(1000, 8),
            adapt: true,
            mitigation: Mitigation::None,
            qdt_mode: QdtMode::Repeat,
            tomography_shots: DEFAULT_QDT_SHOTS,
            optimizer: OptimizerConfig::default(),
            max_updates: MAX_ADAPTIVE_ITERATIONS,
            convergence: CONVERGENCE_THRESHOLD,
            seed: 0,
        }
    }
}

/// `first, 2 first, 4 first, ...` with `len` entries.
pub fn doubling_schedule(first: u64, len: usize) -> Vec<u64> {
    (0..len).map(|i| first << i).collect()
}

/// One line of the convergence trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveTraceRow {
    pub iteration: usize,
    pub shots_cum: u64,
    /// Merged estimate over all iterations so far.
    pub mean: f64,
    pub stderr: f64,
    /// `|mean - exact|`, `NaN` when no exact value is known.
    pub true_error: f64,
    /// Empirical second moment of the estimator in this iteration.
    pub objective: f64,
}

pub const ADAPTIVE_TRACE_HEADER: &str = "iteration,shots_cum,mean,stderr,true_error,objective";

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveOutcome {
    pub estimate: EstimateResult,
    pub iterations: Vec<EstimateResult>,
    pub trace: Vec<AdaptiveTraceRow>,
    /// Parameters used in each iteration, one block per qubit.
    pub params_history: Vec<Vec<Vec<f64>>>,
    /// POVM version recorded with each iteration's data.
    pub versions: Vec<String>,
}

/// Inverse-variance merge; falls back to shot-weighted pooling if some
/// iteration reports a zero standard error.
pub fn combine_estimates(results: &[EstimateResult]) -> Result<EstimateResult> {
    if results.iter().all(|r| r.stderr > 0.0) {
        return merge_estimates(results);
    }
    let shots: u64 = results.iter().map(|r| r.shots).sum();
    if shots == 0 {
        return Err(Error::Empty("no estimates to merge"));
    }
    let s = shots as f64;
    let mean = results.iter().map(|r| r.mean * r.shots as f64).sum::<f64>() / s;
    let var = results.iter().map(|r| (r.stderr * r.shots as f64).powi(2)).sum::<f64>() / (s * s);
    Ok(EstimateResult {
        mean,
        stderr: var.sqrt(),
        shots,
    })
}

/// Version string of the POVM a parameter set describes, as recorded by the
/// sampler.
pub fn params_version(family: PovmFamily, params: &[Vec<f64>]) -> Result<String> {
    match family {
        PovmFamily::Pm(f) => {
            let specs = params.iter().map(|x| f.povm_from_params(x)).collect::<Result<Vec<_>>>()?;
            Ok(povm_version(&specs))
        }
        PovmFamily::Dilation => Ok(dilation_version(params)),
    }
}

struct Experiment<'a> {
    rho: &'a QuantumState,
    noise: Option<&'a NoiseModel>,
    family: PovmFamily,
}

impl Experiment<'_> {
    fn acquire(&self, params: &[Vec<f64>], shots: u64, seed: u64) -> Result<Acquisition> {
        let n = params.len();
        let (space, counts) = match self.family {
            PovmFamily::Pm(f) => {
                let specs = params.iter().map(|x| f.povm_from_params(x)).collect::<Result<Vec<_>>>()?;
                (
                    OutcomeSpace::uniform(n, f.m)?,
                    sample_counts_pm(self.rho, &specs, self.noise, shots, seed)?,
                )
            }
            PovmFamily::Dilation => {
                let ideal = NoiseModel::ideal();
                let noise = self.noise.unwrap_or(&ideal);
                (
                    OutcomeSpace::uniform(n, 4)?,
                    sample_counts_dilation(self.rho, params, noise, shots, seed)?,
                )
            }
        };
        Ok(Acquisition {
            space,
            counts,
            povm_version: params_version(self.family, params)?,
        })
    }

    /// Detector tomography of qubit `q`'s full pipeline at parameters `x`.
    fn qdt(&self, x: &[f64], q: usize, mode: ShotMode, seed: u64) -> Result<Povm> {
        let source: Box<dyn MeasurementSource> = match self.family {
            PovmFamily::Pm(f) => Box::new(PmPipelineSource {
                spec: f.povm_from_params(x)?,
                noise: self.noise.cloned(),
                qubit: q,
            }),
            PovmFamily::Dilation => Box::new(DilationPipelineSource {
                angles: x.to_vec(),
                noise: self.noise.cloned().unwrap_or_else(NoiseModel::ideal),
                qubit: q,
            }),
        };
        run_qdt(source.as_ref(), mode, seed)
    }
}

/// The measure / estimate / optimise loop.
///
/// `models` overrides the detector models used by the optimiser (one per
/// qubit); by default they are characterised from `noise` when mitigation
/// is on, and ideal otherwise.
pub fn adaptive_run(
    observable: &PauliObservable,
    rho: &QuantumState,
    noise: Option<&NoiseModel>,
    models: Option<Vec<DetectorModel>>,
    exact: Option<f64>,
    cfg: &AdaptiveConfig,
) -> Result<AdaptiveOutcome> {
    let n = rho.num_qubits();
    if observable.num_qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit observable on a {n}-qubit state",
            observable.num_qubits()
        )));
    }
    if cfg.schedule.is_empty() || cfg.schedule.contains(&0) {
        return Err(Error::invalid("shot schedule", "must be non-empty with positive entries"));
    }
    let family = cfg.family.family();
    let mode = match cfg.tomography_shots {
        0 => ShotMode::Exact,
        s => ShotMode::Shots(s),
    };
    let models = match models {
        Some(m) if m.len() == n && m.iter().all(|d| d.family() == family) => m,
        Some(_) => return Err(Error::invalid("detector models", "one model per qubit of the run's family")),
        None => match (cfg.mitigation, noise) {
            (Mitigation::Qdt, Some(nm)) => (0..n)
                .map(|q| DetectorModel::characterise(family, nm, q, mode, derive_seed(cfg.seed, 11, q as u64)))
                .collect::<Result<_>>()?,
            _ => vec![DetectorModel::ideal(family); n],
        },
    };
    let exp = Experiment { rho, noise, family };

    let mut params: Vec<Vec<f64>> = vec![family.initial_params(); n];
    let mut effects: Option<Vec<Povm>> = None;
    let mut updates = 0usize;
    let mut frozen = !cfg.adapt;
    let mut out = AdaptiveOutcome {
        estimate: EstimateResult {
            mean: 0.0,
            stderr: 0.0,
            shots: 0,
        },
        iterations: vec![],
        trace: vec![],
        params_history: vec![],
        versions: vec![],
    };
    let mut shots_cum = 0u64;
    for (t, &shots) in cfg.schedule.iter().enumerate() {
        if effects.is_none() {
            let e = (0..n)
                .map(|q| match cfg.mitigation {
                    Mitigation::None => family.effects(&params[q]),
                    Mitigation::Qdt => match cfg.qdt_mode {
                        QdtMode::Repeat => {
                            let seed = derive_seed(cfg.seed, 12, ((t as u64) << 16) | q as u64);
                            exp.qdt(&params[q], q, mode, seed)
                        }
                        QdtMode::ModelOnly => models[q].model_effects(&params[q]),
                    },
                })
                .collect::<Result<Vec<_>>>()?;
            effects = Some(e);
        }
        let current = effects.as_ref().expect("computed above");
        let acq = exp.acquire(&params, shots, derive_seed(cfg.seed, Stream::Experiment as u64, t as u64))?;
        let table = OmegaTable::new(observable.clone(), BMatrix::from_povms(current)?)?;
        let est = estimate_counts(&acq.counts, &table)?;
        let objective = empirical_second_moment(&acq, &table)?.mean;
        shots_cum += shots;
        out.iterations.push(est);
        out.estimate = combine_estimates(&out.iterations)?;
        out.trace.push(AdaptiveTraceRow {
            iteration: t,
            shots_cum,
            mean: out.estimate.mean,
            stderr: out.estimate.stderr,
            true_error: exact.map_or(f64::NAN, |e| (out.estimate.mean - e).abs()),
            objective,
        });
        out.params_history.push(params.clone());
        out.versions.push(acq.povm_version.clone());

        let last = t + 1 == cfg.schedule.len();
        if frozen || last || updates >= cfg.max_updates {
            continue;
        }
        let step = optimize_step(&params, &acq, observable, current, &models, &cfg.optimizer)?;
        updates += 1;
        let improvement = step
            .iter()
            .map(|u| if u.before > 0.0 { (u.before - u.after) / u.before } else { 0.0 })
            .fold(0.0f64, f64::max);
        if improvement < cfg.convergence {
            frozen = true;
        }
        let next: Vec<Vec<f64>> = step.into_iter().map(|u| u.params).collect();
        if next != params {
            params = next;
            effects = None;
        }
    }
    Ok(out)
}

/// Trace rows as CSV with [`ADAPTIVE_TRACE_HEADER`].
pub fn adaptive_trace_csv(rows: &[AdaptiveTraceRow]) -> String {
    let mut s = String::from(ADAPTIVE_TRACE_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iteration, r.shots_cum, r.mean, r.stderr, r.true_error, r.objective
        ));
    }
    s
}

/// One parameter vector (all qubits concatenated) per line, comma separated.
pub fn params_history_text(history: &[Vec<Vec<f64>>]) -> String {
    history
        .iter()
        .map(|blocks| {
            let v: Vec<String> = blocks.iter().flatten().map(|x| x.to_string()).collect();
            v.join(",") + "\n"
        })
        .collect()
}

/// Inverse of [`params_history_text`]: one flat vector per line.
pub fn parse_params_history(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: format!("{f:?}: {e}"),
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::ground_state;

    fn h2() -> PauliObservable {
        PauliObservable::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/h2_parity_4q.txt")).unwrap()
    }

    #[test]
    fn single_iteration_is_a_plain_estimate() {
        let obs = PauliObservable::from_terms(&[(0.5, "ZZ"), (-0.3, "XI")]).unwrap();
        let rho = QuantumState::basis(2, 1);
        let cfg = AdaptiveConfig {
            schedule: vec![4000],
            seed: 9,
            ..AdaptiveConfig::default()
        };
        let out = adaptive_run(&obs, &rho, None, None, None, &cfg).unwrap();
        let f = PovmFamily::default();
        let x = f.initial_params();
        let spec = match f {
            PovmFamily::Pm(pf) => pf.povm_from_params(&x).unwrap(),
            _ => unreachable!(),
        };
        let specs = vec![spec.clone(), spec.clone()];
        let counts = sample_counts_pm(&rho, &specs, None, 4000, derive_seed(9, Stream::Experiment as u64, 0)).unwrap();
        let table = OmegaTable::new(obs, BMatrix::from_povms(&[spec.effects(), spec.effects()]).unwrap()).unwrap();
        assert_eq!(out.estimate, estimate_counts(&counts, &table).unwrap());
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.versions, vec![povm_version(&specs)]);
    }

    #[test]
    fn merged_stderr_never_grows_on_h2() {
        let obs = h2();
        let (e0, rho) = ground_state(&obs).unwrap();
        let cfg = AdaptiveConfig {
            schedule: vec![1_000, 1_000, 10_000, 10_000, 100_000],
            seed: 3,
            ..AdaptiveConfig::default()
        };
        let out = adaptive_run(&obs, &rho, None, None, Some(e0), &cfg).unwrap();
        assert_eq!(out.trace.len(), 5);
        for w in out.trace.windows(2) {
            assert!(w[1].stderr <= w[0].stderr, "{:?}", out.trace);
            assert!(w[1].shots_cum > w[0].shots_cum);
        }
        let last = out.trace.last().unwrap();
        assert!(last.true_error < 5.0 * last.stderr);
        assert_eq!(out.params_history.len(), 5);
        assert_eq!(out.versions.len(), 5);
    }

    #[test]
    fn non_adaptive_keeps_parameters() {
        let obs = PauliObservable::from_terms(&[(1.0, "Z")]).unwrap();
        let rho = QuantumState::basis(1, 0);
        let cfg = AdaptiveConfig {
            schedule: vec![1000, 1000, 1000],
            adapt: false,
            ..AdaptiveConfig::default()
        };
        let out = adaptive_run(&obs, &rho, None, None, None, &cfg).unwrap();
        assert!(out.params_history.windows(2).all(|w| w[0] == w[1]));
        assert!(out.versions.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn adaptation_lowers_the_objective_for_z() {
        let obs = PauliObservable::from_terms(&[(1.0, "Z")]).unwrap();
        let rho = QuantumState::basis(1, 0);
        let cfg = AdaptiveConfig {
            schedule: vec![20_000; 4],
            seed: 1,
            ..AdaptiveConfig::default()
        };
        let out = adaptive_run(&obs, &rho, None, None, None, &cfg).unwrap();
        let first = out.trace[0].objective;
        let last = out.trace.last().unwrap().objective;
        assert!(last < 0.8 * first, "{first} -> {last}");
    }

    #[test]
    fn model_only_mitigation_with_ground_truth_model_is_unbiased() {
        let obs = PauliObservable::from_terms(&[(1.0, "Z")]).unwrap();
        let rho = QuantumState::basis(1, 0);
        let noise = NoiseModel::parametric(0.05, 0.08, 0.0, 0.0, 0.0).unwrap();
        let cfg = AdaptiveConfig {
            schedule: vec![200_000],
            mitigation: Mitigation::Qdt,
            qdt_mode: QdtMode::ModelOnly,
            ..AdaptiveConfig::default()
        };
        let models = vec![DetectorModel::from_noise(PovmFamily::default(), &noise, 0).unwrap()];
        let out = adaptive_run(&obs, &rho, Some(&noise), Some(models), Some(1.0), &cfg).unwrap();
        assert!(out.trace[0].true_error < 4.0 * out.estimate.stderr, "{:?}", out.estimate);
        let raw = adaptive_run(&obs, &rho, Some(&noise), None, Some(1.0), &AdaptiveConfig {
            mitigation: Mitigation::None,
            ..cfg
        })
        .unwrap();
        assert!(raw.trace[0].true_error > 10.0 * raw.estimate.stderr);
    }

    #[test]
    fn history_and_trace_text() {
        let h = vec![vec![vec![0.5, -1.25], vec![3.0, 1e-300]]];
        let text = params_history_text(&h);
        assert_eq!(parse_params_history(&text).unwrap(), vec![vec![0.5, -1.25, 3.0, 1e-300]]);
        assert!(parse_params_history("1,x\n").is_err());
        let row = AdaptiveTraceRow {
            iteration: 0,
            shots_cum: 10,
            mean: 1.5,
            stderr: 0.25,
            true_error: f64::NAN,
            objective: 2.0,
        };
        assert_eq!(adaptive_trace_csv(&[row]), format!("{ADAPTIVE_TRACE_HEADER}\n0,10,1.5,0.25,NaN,2\n"));
    }

    #[test]
    fn config_json_defaults() {
        let c: AdaptiveConfig = serde_json::from_str(r#"{"family":"dilation","qdt_mode":"model-only"}"#).unwrap();
        assert_eq!(c.family, FamilyChoice::Dilation);
        assert_eq!(c.qdt_mode, QdtMode::ModelOnly);
        assert_eq!(c.schedule, doubling_schedule(1000, 8));
        assert!(serde_json::from_str::<AdaptiveConfig>(r#"{"bogus":1}"#).is_err());
    }
}
