//! The one-ancilla dilation: a two-qubit unitary on system and ancilla,
//! then a computational-basis readout of both.

use povmforge::noise::{real_effects_dilation, NoiseModel};
use povmforge::povm::{default_dilation_angles, DilationPovm};
use povmforge::qcore::QuantumState;
use povmforge::sampler::sample_dilation;

fn main() -> povmforge::Result<()> {
    let angles = default_dilation_angles();
    let povm = DilationPovm::from_angles(&angles)?;
    let effects = povm.effects();
    println!("dilation POVM, {} effects, smallest singular value {:.4}",
        effects.len(), effects.smallest_singular_value());

    let rho = QuantumState::from_bloch([0.3, -0.2, 0.8])?;
    let probs = effects.probabilities(&rho);
    println!("outcome probabilities {probs:.4?}");

    let rec = sample_dilation(&rho, &[angles.to_vec()], &NoiseModel::ideal(), 10, 7)?;
    println!("raw bits per shot: 2 per system qubit, e.g. {:?}", rec.raw_bits.as_ref().map(|b| &b[..5]));

    let noisy = NoiseModel::parametric(0.02, 0.03, 0.001, 0.01, 0.02)?;
    let real = real_effects_dilation(&angles, &noisy, 0)?;
    for (m, (a, b)) in real.effects().iter().zip(effects.effects()).enumerate() {
        println!("  effect {m}: noisy vs ideal distance {:.4}", a.distance(b));
    }
    Ok(())
}
