use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adaptive::{AdaptiveConfig, FamilyChoice, Mitigation, OptimizerConfig, QdtMode, DEFAULT_QDT_SHOTS};
use crate::error::{Error, Result};
use crate::noise::{NoiseConfig, NoiseModel};

pub const DEFAULT_REPETITIONS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    PmNonadaptive,
    PmAdaptive,
    DilationNonadaptive,
    DilationAdaptive,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::PmNonadaptive,
        Strategy::PmAdaptive,
        Strategy::DilationNonadaptive,
        Strategy::DilationAdaptive,
    ];

    pub fn family(self) -> FamilyChoice {
        match self {
            Strategy::PmNonadaptive | Strategy::PmAdaptive => FamilyChoice::Pm,
            Strategy::DilationNonadaptive | Strategy::DilationAdaptive => FamilyChoice::Dilation,
        }
    }

    pub fn adaptive(self) -> bool {
        matches!(self, Strategy::PmAdaptive | Strategy::DilationAdaptive)
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::PmNonadaptive => "pm-nonadaptive",
            Strategy::PmAdaptive => "pm-adaptive",
            Strategy::DilationNonadaptive => "dilation-nonadaptive",
            Strategy::DilationAdaptive => "dilation-adaptive",
        }
    }
}

/// `"none"` or the path of a noise config file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum NoiseSource {
    #[default]
    None,
    File(PathBuf),
}

impl Serialize for NoiseSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NoiseSource::None => s.serialize_str("none"),
            NoiseSource::File(p) => s.serialize_str(&p.to_string_lossy()),
        }
    }
}

impl<'de> Deserialize<'de> for NoiseSource {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(if s == "none" { NoiseSource::None } else { NoiseSource::File(s.into()) })
    }
}

impl NoiseSource {
    pub fn load(&self) -> Result<Option<NoiseModel>> {
        match self {
            NoiseSource::None => Ok(None),
            NoiseSource::File(p) => Ok(Some(NoiseConfig::from_file(p)?.to_model()?)),
        }
    }
}

/// Powers of two from `2^7` to `2^20`.
pub fn default_shot_grid() -> Vec<u64> {
    (7..=20).map(|k| 1u64 << k).collect()
}

fn default_repetitions() -> usize {
    DEFAULT_REPETITIONS
}

fn default_tomography_shots() -> u64 {
    DEFAULT_QDT_SHOTS
}

/// One convergence experiment. Relative paths are resolved against the
/// directory of the file the config was read from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Curve name used for the CSV file; defaults to `strategy-mitigation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub hamiltonian: PathBuf,
    pub strategy: Strategy,
    #[serde(default)]
    pub mitigation: Mitigation,
    #[serde(default)]
    pub noise: NoiseSource,
    /// Cumulative shot counts at which the curve is recorded.
    #[serde(default = "default_shot_grid")]
    pub shot_grid: Vec<u64>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub qdt_mode: QdtMode,
    /// Shots per input state of every tomography experiment; 0 = exact.
    #[serde(default = "default_tomography_shots")]
    pub tomography_shots: u64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

impl ExperimentConfig {
    pub fn new(hamiltonian: impl Into<PathBuf>, strategy: Strategy) -> Self {
        ExperimentConfig {
            label: None,
            hamiltonian: hamiltonian.into(),
            strategy,
            mitigation: Mitigation::None,
            noise: NoiseSource::None,
            shot_grid: default_shot_grid(),
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
            qdt_mode: QdtMode::Repeat,
            tomography_shots: DEFAULT_QDT_SHOTS,
            optimizer: OptimizerConfig::default(),
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            let m = match self.mitigation {
                Mitigation::None => "none",
                Mitigation::Qdt => "qdt",
            };
            format!("{}-{m}", self.strategy.name())
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.shot_grid.is_empty() {
            return Err(Error::Empty("shot grid"));
        }
        if self.shot_grid[0] == 0 || self.shot_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("shot grid", "must be positive and strictly increasing"));
        }
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions", "must be at least 1"));
        }
        if self.mitigation == Mitigation::Qdt && self.noise == NoiseSource::None {
            return Err(Error::invalid(
                "strategy",
                "QDT mitigation needs a noise config describing the detector to characterise",
            ));
        }
        let label = self.label();
        if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(Error::invalid("label", format!("{label:?} is not a plain file name")));
        }
        Ok(())
    }

    /// Shots taken in each iteration: the differences of the grid.
    pub fn schedule(&self) -> Vec<u64> {
        let mut prev = 0;
        self.shot_grid
            .iter()
            .map(|&s| {
                let d = s - prev;
                prev = s;
                d
            })
            .collect()
    }

    pub fn adaptive_config(&self, seed: u64) -> AdaptiveConfig {
        AdaptiveConfig {
            family: self.strategy.family(),
            schedule: self.schedule(),
            adapt: self.strategy.adaptive(),
            mitigation: self.mitigation,
            qdt_mode: self.qdt_mode,
            tomography_shots: self.tomography_shots,
            optimizer: self.optimizer,
            seed,
            ..AdaptiveConfig::default()
        }
    }

    fn resolve(&mut self, base: &Path) {
        if self.hamiltonian.is_relative() {
            self.hamiltonian = base.join(&self.hamiltonian);
        }
        if let NoiseSource::File(p) = &mut self.noise {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

/// A bench config file: one experiment or a list of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BenchFile {
    Suite { experiments: Vec<ExperimentConfig> },
    Single(ExperimentConfig),
}

impl BenchFile {
    pub fn parse(text: &str) -> Result<Vec<ExperimentConfig>> {
        let exps = match serde_json::from_str::<BenchFile>(text)? {
            BenchFile::Suite { experiments } => experiments,
            BenchFile::Single(e) => vec![e],
        };
        if exps.is_empty() {
            return Err(Error::Empty("experiment list"));
        }
        let mut labels: Vec<String> = exps.iter().map(|e| e.label()).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid("experiment list", format!("duplicate label {:?}", w[0])));
        }
        for e in &exps {
            e.validate()?;
        }
        Ok(exps)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Vec<ExperimentConfig>> {
        let path = path.as_ref();
        let mut exps = Self::parse(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for e in &mut exps {
            e.resolve(base);
        }
        Ok(exps)
    }
}
