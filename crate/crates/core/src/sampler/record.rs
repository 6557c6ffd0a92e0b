use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::OutcomeSpace;

/// Outcomes of one acquisition run, packed per [`OutcomeSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct ShotRecord {
    pub space: OutcomeSpace,
    pub outcomes: Vec<u64>,
    pub povm_version: String,
    pub seed: u64,
    /// Raw measured bits when each outcome comes from several physical
    /// bits (dilation mode: `2N` bits per shot, system bit then ancilla bit
    /// per qubit, most significant first).
    pub raw_bits: Option<Vec<u64>>,
}

impl ShotRecord {
    pub fn shots(&self) -> usize {
        self.outcomes.len()
    }

    pub fn word(&self, shot: usize) -> Vec<usize> {
        self.space.decode(self.outcomes[shot])
    }

    /// Text export: `# seed=`, `# povm_version=`, `# radices=` headers, then
    /// one outcome word per line.
    pub fn to_text(&self) -> String {
        let radices: Vec<String> = self.space.radices().iter().map(|r| r.to_string()).collect();
        let mut out = format!(
            "# seed={}\n# povm_version={}\n# radices={}\n",
            self.seed,
            self.povm_version,
            radices.join(",")
        );
        for &o in &self.outcomes {
            writeln!(out, "{}", self.space.format(o)).expect("string write");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut seed = None;
        let mut version = None;
        let mut space = None;
        let mut outcomes = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            if let Some(h) = line.strip_prefix('#') {
                let (key, value) = h.trim().split_once('=').ok_or_else(|| perr(format!("header {h:?}")))?;
                match key.trim() {
                    "seed" => seed = Some(value.trim().parse::<u64>().map_err(|e| perr(e.to_string()))?),
                    "povm_version" => version = Some(value.trim().to_string()),
                    "radices" => {
                        let r = value
                            .split(',')
                            .map(|t| t.trim().parse::<usize>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|e| perr(e.to_string()))?;
                        space = Some(OutcomeSpace::new(r)?);
                    }
                    other => return Err(perr(format!("unknown header {other:?}"))),
                }
                continue;
            }
            let s = space.as_ref().ok_or_else(|| perr("outcome before `# radices=` header".into()))?;
            outcomes.push(s.parse(line).map_err(|e| perr(e.to_string()))?);
        }
        Ok(ShotRecord {
            space: space.ok_or(Error::Empty("shot record without radices header"))?,
            outcomes,
            povm_version: version.unwrap_or_default(),
            seed: seed.ok_or(Error::Empty("shot record without seed header"))?,
            raw_bits: None,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
