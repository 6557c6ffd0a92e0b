//! JSON form of PM-simulable POVM specifications.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pm::PmSimulablePovm;
use crate::error::{Error, Result};

pub const POVM_SCHEMA: u32 = 1;

/// One qubit's POVM as stored on disk. Floats are written with shortest
/// round-trip formatting so a reload is bit-exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmSpec {
    pub schema: u32,
    pub alphas: Vec<f64>,
    pub unitary_angles: Vec<[f64; 3]>,
    pub relabel: Vec<Vec<f64>>,
}

impl PovmSpec {
    pub fn from_povm(p: &PmSimulablePovm) -> Self {
        PovmSpec {
            schema: POVM_SCHEMA,
            alphas: p.alphas().to_vec(),
            unitary_angles: p.unitary_angles().to_vec(),
            relabel: p.relabel().to_vec(),
        }
    }

    pub fn into_povm(self) -> Result<PmSimulablePovm> {
        check_schema(self.schema)?;
        PmSimulablePovm::new(self.alphas, self.unitary_angles, self.relabel)
    }
}

fn check_schema(schema: u32) -> Result<()> {
    if schema != POVM_SCHEMA {
        return Err(Error::VersionMismatch(format!(
            "POVM schema {schema}, supported {POVM_SCHEMA}"
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PerQubitFile {
    schema: u32,
    qubits: Vec<PovmSpec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyFile {
    PerQubit(PerQubitFile),
    Single(PovmSpec),
}

/// A POVM file holds either a single spec (used on every qubit) or
/// `{"schema": 1, "qubits": [spec, ...]}`.
#[derive(Clone, Debug, PartialEq)]
pub enum PovmFile {
    Shared(PmSimulablePovm),
    PerQubit(Vec<PmSimulablePovm>),
}

impl PovmFile {
    pub fn parse(text: &str) -> Result<Self> {
        match serde_json::from_str::<AnyFile>(text) {
            Ok(AnyFile::Single(s)) => Ok(PovmFile::Shared(s.into_povm()?)),
            Ok(AnyFile::PerQubit(f)) => {
                check_schema(f.schema)?;
                if f.qubits.is_empty() {
                    return Err(Error::Empty("POVM file lists no qubits"));
                }
                Ok(PovmFile::PerQubit(
                    f.qubits.into_iter().map(PovmSpec::into_povm).collect::<Result<_>>()?,
                ))
            }
            // re-run the plain parser so the error names the offending field
            Err(_) => Err(serde_json::from_str::<PovmSpec>(text).err().map_or_else(
                || Error::invalid("POVM file", "unrecognised layout"),
                Error::from,
            )),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let out = match self {
            PovmFile::Shared(p) => serde_json::to_string_pretty(&PovmSpec::from_povm(p)),
            PovmFile::PerQubit(ps) => serde_json::to_string_pretty(&PerQubitFile {
                schema: POVM_SCHEMA,
                qubits: ps.iter().map(PovmSpec::from_povm).collect(),
            }),
        };
        out.expect("plain data serialises")
    }

    /// One POVM per qubit of an `n`-qubit register.
    pub fn for_qubits(&self, n: usize) -> Result<Vec<PmSimulablePovm>> {
        match self {
            PovmFile::Shared(p) => Ok(vec![p.clone(); n]),
            PovmFile::PerQubit(ps) if ps.len() == n => Ok(ps.clone()),
            PovmFile::PerQubit(ps) => Err(Error::DimensionMismatch(format!(
                "POVM file has {} qubits, register has {n}",
                ps.len()
            ))),
        }
    }
}
