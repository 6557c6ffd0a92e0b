//! A small convergence experiment with the CSV/JSON report. The full-size
//! runs live in fixtures/bench_h2*.json and are driven by
//! `povmforge bench --config ...`.

use povmforge::bench::{emit_report, loglog_slope, run_experiment, ExperimentConfig, Strategy};

fn main() -> povmforge::Result<()> {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/h2_parity_4q.txt");
    let mut curves = vec![];
    for strategy in [Strategy::PmNonadaptive, Strategy::PmAdaptive] {
        let mut cfg = ExperimentConfig::new(fixture, strategy);
        cfg.shot_grid = (7..=16).map(|k| 1u64 << k).collect();
        cfg.repetitions = 10;
        cfg.seed = 1;
        let curve = run_experiment(&cfg)?;
        let x: Vec<f64> = curve.shots.iter().map(|&s| s as f64).collect();
        println!("{}: final error {:.2e}, stderr slope {:.3}", curve.label,
            curve.true_mean_error.last().unwrap(), loglog_slope(&x, &curve.estimated_std_error)?);
        curves.push(curve);
    }
    let dir = std::env::temp_dir().join("povmforge-bench-example");
    for p in emit_report(&curves, &dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
