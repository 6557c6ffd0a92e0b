//! A faulty detector: confusion readout and gate noise bias the raw energy
//! estimate, and the true effects of the noisy pipeline remove the bias.

use povmforge::estimator::{estimate_counts, BMatrix, OmegaTable};
use povmforge::noise::{real_effects_pm, NoiseConfig};
use povmforge::povm::PmSimulablePovm;
use povmforge::qcore::{ground_state, PauliObservable};
use povmforge::sampler::sample_counts_pm;

fn main() -> povmforge::Result<()> {
    let noise = NoiseConfig::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/noise_default.json"))?.to_model()?;
    let h2 = PauliObservable::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/h2_parity_4q.txt"))?;
    let (e0, psi) = ground_state(&h2)?;
    let specs = vec![PmSimulablePovm::tetrahedral(); 4];
    let counts = sample_counts_pm(&psi, &specs, Some(&noise), 1_000_000, 5)?;

    let ideal: Vec<_> = specs.iter().map(|s| s.effects()).collect();
    let real = (0..4).map(|q| real_effects_pm(&specs[q], &noise, q)).collect::<povmforge::Result<Vec<_>>>()?;
    let raw = estimate_counts(&counts, &OmegaTable::new(h2.clone(), BMatrix::from_povms(&ideal)?)?)?;
    let fixed = estimate_counts(&counts, &OmegaTable::new(h2, BMatrix::from_povms(&real)?)?)?;
    println!("exact      {e0:.5}");
    println!("raw        {:.5} +- {:.5}", raw.mean, raw.stderr);
    println!("true model {:.5} +- {:.5}", fixed.mean, fixed.stderr);
    Ok(())
}
