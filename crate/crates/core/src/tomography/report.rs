use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::Povm;
use crate::qcore::{Channel, Operator, QuantumState};
use crate::tol;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    /// Effects of a detector, one matrix per outcome.
    Povm,
    /// One Choi matrix, input factor first.
    Channel,
    State,
}

/// One reconstructed object. Matrices are row-major `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyTarget {
    pub name: String,
    pub kind: TargetKind,
    pub input_dim: usize,
    pub output_dim: usize,
    /// `null` for exact-probability runs.
    pub shots: Option<u64>,
    pub seed: u64,
    pub matrices: Vec<Vec<[f64; 2]>>,
}

impl TomographyTarget {
    pub fn from_povm(name: impl Into<String>, povm: &Povm, shots: Option<u64>, seed: u64) -> Self {
        TomographyTarget {
            name: name.into(),
            kind: TargetKind::Povm,
            input_dim: povm.dim(),
            output_dim: povm.len(),
            shots,
            seed,
            matrices: povm.effects().iter().map(Operator::to_row_major_pairs).collect(),
        }
    }

    pub fn from_channel(name: impl Into<String>, channel: &Channel, shots: Option<u64>, seed: u64) -> Self {
        TomographyTarget {
            name: name.into(),
            kind: TargetKind::Channel,
            input_dim: channel.input_dim(),
            output_dim: channel.output_dim(),
            shots,
            seed,
            matrices: vec![channel.choi().to_row_major_pairs()],
        }
    }

    pub fn from_state(name: impl Into<String>, state: &QuantumState, shots: Option<u64>, seed: u64) -> Self {
        TomographyTarget {
            name: name.into(),
            kind: TargetKind::State,
            input_dim: state.dim(),
            output_dim: state.dim(),
            shots,
            seed,
            matrices: vec![state.rho().to_row_major_pairs()],
        }
    }

    fn operators(&self) -> Result<Vec<Operator>> {
        self.matrices.iter().map(|m| Operator::from_row_major_pairs(m)).collect()
    }

    fn expect(&self, kind: TargetKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::invalid(
                "tomography target",
                format!("{} is a {:?}, not a {kind:?}", self.name, self.kind),
            ));
        }
        Ok(())
    }

    pub fn to_povm(&self) -> Result<Povm> {
        self.expect(TargetKind::Povm)?;
        Povm::with_tolerance(self.operators()?, tol::TOMOGRAPHY)
    }

    pub fn to_channel(&self) -> Result<Channel> {
        self.expect(TargetKind::Channel)?;
        let ops = self.operators()?;
        let choi = ops.first().ok_or(Error::Empty("channel target without a Choi matrix"))?;
        Channel::from_choi_with_tolerance(choi, self.input_dim, self.output_dim, tol::TOMOGRAPHY)
    }

    pub fn to_state(&self) -> Result<QuantumState> {
        self.expect(TargetKind::State)?;
        let ops = self.operators()?;
        let rho = ops.into_iter().next().ok_or(Error::Empty("state target without a matrix"))?;
        QuantumState::with_tolerance(rho, tol::TOMOGRAPHY)
    }
}

/// File written by tomography runs and read back by the adaptive loop and
/// the benchmarks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyReport {
    pub schema: u32,
    pub targets: Vec<TomographyTarget>,
}

impl Default for TomographyReport {
    fn default() -> Self {
        TomographyReport {
            schema: REPORT_SCHEMA,
            targets: vec![],
        }
    }
}

impl TomographyReport {
    pub fn push(&mut self, target: TomographyTarget) {
        self.targets.push(target);
    }

    pub fn get(&self, name: &str) -> Option<&TomographyTarget> {
        self.targets.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serialisable")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let r: TomographyReport = serde_json::from_str(text)?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::VersionMismatch(format!("tomography report schema {}", r.schema)));
        }
        Ok(r)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
