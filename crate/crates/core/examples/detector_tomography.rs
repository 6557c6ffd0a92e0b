//! Detector, process and state tomography of the simulated hardware, and
//! the tomography report file.

use povmforge::noise::{real_effects_pm, NoiseModel};
use povmforge::povm::PmSimulablePovm;
use povmforge::qcore::{cnot, Channel};
use povmforge::tomography::{
    choi_trace_distance, max_effect_error, run_ancilla_qst, run_qdt, run_qpt, PmPipelineSource, ShotMode,
    TomographyReport, TomographyTarget,
};

fn main() -> povmforge::Result<()> {
    let noise = NoiseModel::parametric(0.02, 0.03, 0.001, 0.01, 0.02)?;
    let spec = PmSimulablePovm::tetrahedral();
    let truth = real_effects_pm(&spec, &noise, 0)?;
    let source = PmPipelineSource { spec, noise: Some(noise.clone()), qubit: 0 };

    let exact = run_qdt(&source, ShotMode::Exact, 0)?;
    println!("QDT, exact probabilities: max effect error {:.2e}", max_effect_error(&exact, &truth));
    for shots in [10_000u64, 250_000] {
        let e = run_qdt(&source, ShotMode::Shots(shots), 1)?;
        println!("QDT, {shots:>6} shots/state: max effect error {:.2e}", max_effect_error(&e, &truth));
    }

    let gate = noise.noisy_two(&cnot())?;
    let qpt = run_qpt(&gate, ShotMode::Shots(250_000), 2)?;
    println!("QPT of noisy CNOT: normalised Choi trace distance {:.2e}", choi_trace_distance(&qpt, &gate));
    println!("  ideal CNOT is {:.2e} away", choi_trace_distance(&Channel::unitary(&cnot())?, &gate));

    let anc = run_ancilla_qst(&noise, ShotMode::Shots(250_000), 3)?;
    println!("ancilla state Bloch vector {:.4?}", anc.bloch());

    let mut report = TomographyReport::default();
    report.push(TomographyTarget::from_povm("pm0", &exact, None, 0));
    report.push(TomographyTarget::from_channel("cnot", &qpt, Some(250_000), 2));
    report.push(TomographyTarget::from_state("ancilla", &anc, Some(250_000), 3));
    let back = TomographyReport::parse(&report.to_json())?;
    println!("report round trip identical: {}", back == report);
    Ok(())
}
