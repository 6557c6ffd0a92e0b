//! Estimating the H2 ground energy from simulated IC-POVM shots.

use povmforge::estimator::{estimate, exact_expectation, BMatrix, OmegaTable};
use povmforge::povm::PmSimulablePovm;
use povmforge::qcore::{ground_state, PauliObservable};
use povmforge::sampler::sample_shots;

fn main() -> povmforge::Result<()> {
    let h2 = PauliObservable::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/h2_parity_4q.txt"))?;
    let (e0, psi) = ground_state(&h2)?;
    let specs = vec![PmSimulablePovm::tetrahedral(); 4];
    let effects: Vec<_> = specs.iter().map(|s| s.effects()).collect();
    let table = OmegaTable::new(h2, BMatrix::from_povms(&effects)?)?;

    println!("exact ground energy      {e0:.6}");
    println!("sum_m omega_m p_m        {:.6}", exact_expectation(&psi, &table, &effects)?);
    for shots in [1_000u64, 10_000, 100_000] {
        let rec = sample_shots(&psi, &specs, shots, 42)?;
        let r = estimate(&rec.outcomes, &table)?;
        println!("S = {shots:>7}: {:.5} +- {:.5} (error {:.5})", r.mean, r.stderr, (r.mean - e0).abs());
    }
    Ok(())
}
