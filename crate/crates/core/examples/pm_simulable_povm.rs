//! Building PM-simulable POVMs from basis weights, rotations and relabelling,
//! and moving between POVMs and the optimiser's flat angle vector.

use povmforge::povm::{PmFamily, PmSimulablePovm, PovmFamily, PovmFile};

fn main() -> povmforge::Result<()> {
    let tet = PmSimulablePovm::tetrahedral();
    let effects = tet.effects();
    println!("tetrahedral: K={} bases, M={} outcomes", tet.num_bases(), tet.num_outcomes());
    for (m, e) in effects.effects().iter().enumerate() {
        println!("  Pi_{m}: trace {:.4}, eigenvalues {:?}", e.trace().re, e.eigenvalues());
    }
    println!("informationally complete: {} (smallest singular value {:.4})",
        effects.is_informationally_complete(), effects.smallest_singular_value());

    let family = PmFamily::default();
    let x = family.params_from_povm(&tet)?;
    println!("{} angles per qubit; round trip max error {:.2e}", x.len(), {
        let back = family.povm_from_params(&x)?.effects();
        back.effects().iter().zip(effects.effects()).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    });

    // the random-Pauli measurement is not IC once outcomes are merged
    let merged = PmSimulablePovm::random_pauli().merge_outcomes(0, 1)?;
    println!("random Pauli with Z outcomes merged is IC: {}", merged.effects().is_informationally_complete());

    let generic = PovmFamily::Pm(PmFamily::new(3, 6)?).initial_params();
    println!("generic K=3, M=6 start has {} parameters", generic.len());
    println!("{}", PovmFile::Shared(PmSimulablePovm::random_pauli()).to_json());
    Ok(())
}
