use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::curve::{chemical_accuracy_crossing, loglog_slope, ConvergenceCurve};
use crate::error::{Error, Result};

pub const CURVE_CSV_HEADER: &str = "shots,true_mean_error,std_error_reps,estimated_std_error";
pub const SUMMARY_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub label: String,
    pub csv: String,
    pub exact: f64,
    /// First grid point that stays below chemical accuracy.
    pub chemical_accuracy_shots: Option<u64>,
    pub final_shots: u64,
    pub final_true_mean_error: f64,
    pub final_std_error_reps: f64,
    pub final_estimated_std_error: f64,
    /// Log-log slope of the estimated standard error against shots.
    pub stderr_slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub schema: u32,
    pub curves: Vec<CurveSummary>,
}

pub fn curve_csv(curve: &ConvergenceCurve) -> String {
    let mut s = String::from(CURVE_CSV_HEADER);
    s.push('\n');
    for i in 0..curve.len() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            curve.shots[i], curve.true_mean_error[i], curve.std_error_reps[i], curve.estimated_std_error[i]
        ));
    }
    s
}

/// Writes `<label>.csv` per curve and `summary.json` into `dir`; returns the
/// written paths, summary last.
pub fn emit_report(curves: &[ConvergenceCurve], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if curves.is_empty() {
        return Err(Error::Empty("report without curves"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = vec![];
    let mut summary = BenchSummary {
        schema: SUMMARY_SCHEMA,
        curves: vec![],
    };
    for c in curves {
        if c.is_empty() {
            return Err(Error::Empty("convergence curve"));
        }
        let name = format!("{}.csv", c.label);
        let path = dir.join(&name);
        std::fs::write(&path, curve_csv(c))?;
        written.push(path);
        let x: Vec<f64> = c.shots.iter().map(|&s| s as f64).collect();
        let last = c.len() - 1;
        summary.curves.push(CurveSummary {
            label: c.label.clone(),
            csv: name,
            exact: c.exact,
            chemical_accuracy_shots: chemical_accuracy_crossing(c),
            final_shots: c.shots[last],
            final_true_mean_error: c.true_mean_error[last],
            final_std_error_reps: c.std_error_reps[last],
            final_estimated_std_error: c.estimated_std_error[last],
            stderr_slope: loglog_slope(&x, &c.estimated_std_error).ok(),
        });
    }
    let path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    std::fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(label: &str) -> ConvergenceCurve {
        ConvergenceCurve {
            label: label.into(),
            exact: -1.1,
            shots: vec![128, 256],
            true_mean_error: vec![0.01, 0.001],
            std_error_reps: vec![0.02, 0.014],
            estimated_std_error: vec![0.02, 0.0141],
        }
    }

    #[test]
    fn one_csv_per_curve_plus_summary() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&[curve("a"), curve("b")], dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let csv = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(csv.lines().next(), Some(CURVE_CSV_HEADER));
        assert_eq!(csv.lines().nth(2), Some("256,0.001,0.014,0.0141"));
        let s: BenchSummary = serde_json::from_str(&std::fs::read_to_string(&files[2]).unwrap()).unwrap();
        assert_eq!(s.curves[1].label, "b");
        assert_eq!(s.curves[0].chemical_accuracy_shots, Some(256));
        let again = tempfile::tempdir().unwrap();
        let files2 = emit_report(&[curve("a"), curve("b")], again.path()).unwrap();
        for (x, y) in files.iter().zip(&files2) {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
        assert!(emit_report(&[], dir.path()).is_err());
    }
}
