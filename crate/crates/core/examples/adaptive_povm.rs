//! The adaptive loop on noiseless H2: measure, estimate, re-optimise the
//! POVM from the same data, repeat.

use povmforge::adaptive::{adaptive_run, adaptive_trace_csv, AdaptiveConfig};
use povmforge::qcore::{ground_state, PauliObservable};

fn main() -> povmforge::Result<()> {
    let h2 = PauliObservable::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/h2_parity_4q.txt"))?;
    let (e0, psi) = ground_state(&h2)?;
    let schedule: Vec<u64> = (0..8).map(|i| 2_000 << i).collect();

    for adapt in [false, true] {
        let cfg = AdaptiveConfig { schedule: schedule.clone(), adapt, seed: 11, ..AdaptiveConfig::default() };
        let out = adaptive_run(&h2, &psi, None, None, Some(e0), &cfg)?;
        println!("adapt = {adapt}");
        print!("{}", adaptive_trace_csv(&out.trace));
        let per_shot: Vec<String> = out
            .iterations
            .iter()
            .map(|r| format!("{:.2}", r.stderr * (r.shots as f64).sqrt()))
            .collect();
        println!("per-shot standard deviation by iteration: {}\n", per_shot.join(" "));
    }
    Ok(())
}
