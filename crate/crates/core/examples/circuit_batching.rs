//! Grouping randomised basis choices into a few circuits with shot counts,
//! as a cloud backend would run them.

use povmforge::estimator::{count_outcomes, estimate, BMatrix, OmegaTable};
use povmforge::povm::PmSimulablePovm;
use povmforge::qcore::{PauliObservable, QuantumState};
use povmforge::sampler::{make_batch, run_batch, sample_shots};

fn main() -> povmforge::Result<()> {
    let specs = vec![PmSimulablePovm::tetrahedral(); 2];
    let rho = QuantumState::basis(2, 1);
    let batch = make_batch(&specs, 20_000, 3)?;
    println!("{} shots in {} circuits", batch.total_shots, batch.circuits.len());
    for (ks, n) in batch.circuits.iter().take(4) {
        println!("  bases {ks:?}: {n} shots");
    }

    let batched = run_batch(&rho, &batch, &specs, None, 3)?;
    let direct = sample_shots(&rho, &specs, 20_000, 3)?;
    let obs = PauliObservable::from_terms(&[(1.0, "ZZ"), (0.5, "XI")])?;
    let table = OmegaTable::new(obs, BMatrix::from_povms(&[specs[0].effects(), specs[1].effects()])?)?;
    let a = estimate(&batched.outcomes, &table)?;
    let b = estimate(&direct.outcomes, &table)?;
    println!("batched  {:.4} +- {:.4}", a.mean, a.stderr);
    println!("per-shot {:.4} +- {:.4}   (exact -1)", b.mean, b.stderr);
    println!("distinct outcome words: {} vs {}", count_outcomes(&batched.outcomes).len(), count_outcomes(&direct.outcomes).len());
    Ok(())
}
