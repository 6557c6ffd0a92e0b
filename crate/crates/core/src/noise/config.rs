use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{ancilla_relaxation, confusion_readout, NoiseModel, Readout};
use crate::error::{Error, Result};
use crate::qcore::Channel;

pub const NOISE_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipRates {
    pub p10: f64,
    pub p01: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReadoutConfig {
    Global(FlipRates),
    PerQubit(Vec<FlipRates>),
}

/// On-disk noise description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub schema: u32,
    pub readout: ReadoutConfig,
    pub depol_1q: f64,
    pub depol_2q: f64,
    pub ancilla_damping: f64,
}

impl Default for NoiseConfig {
    /// Benchmark defaults.
    fn default() -> Self {
        NoiseConfig {
            schema: NOISE_SCHEMA,
            readout: ReadoutConfig::Global(FlipRates { p10: 0.02, p01: 0.03 }),
            depol_1q: 0.001,
            depol_2q: 0.01,
            ancilla_damping: 0.02,
        }
    }
}

impl NoiseConfig {
    pub fn ideal() -> Self {
        NoiseConfig {
            schema: NOISE_SCHEMA,
            readout: ReadoutConfig::Global(FlipRates { p10: 0.0, p01: 0.0 }),
            depol_1q: 0.0,
            depol_2q: 0.0,
            ancilla_damping: 0.0,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: NoiseConfig = serde_json::from_str(text)?;
        if cfg.schema != NOISE_SCHEMA {
            return Err(Error::VersionMismatch(format!(
                "noise schema {}, supported {NOISE_SCHEMA}",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    pub fn to_model(&self) -> Result<NoiseModel> {
        let readout = match &self.readout {
            ReadoutConfig::Global(r) => Readout::Global(confusion_readout(r.p10, r.p01)?),
            ReadoutConfig::PerQubit(rs) if rs.is_empty() => {
                return Err(Error::Empty("per-qubit readout list"));
            }
            ReadoutConfig::PerQubit(rs) => Readout::PerQubit(
                rs.iter()
                    .map(|r| confusion_readout(r.p10, r.p01))
                    .collect::<Result<_>>()?,
            ),
        };
        NoiseModel::new(
            readout,
            Channel::depolarizing(1, self.depol_1q)?,
            Channel::depolarizing(2, self.depol_2q)?,
            ancilla_relaxation(self.ancilla_damping)?,
        )
    }
}
