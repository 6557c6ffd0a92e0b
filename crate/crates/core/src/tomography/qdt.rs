use nalgebra::DMatrix;

use super::project::{project_povm, PROJECTION_MAX_ITER, PROJECTION_TOLERANCE};
use super::source::{MeasurementSource, NativeReadoutSource, ShotMode};
use crate::error::{Error, Result};
use crate::estimator::{decompose_pauli, pseudo_inverse};
use crate::noise::NoiseModel;
use crate::povm::Povm;
use crate::qcore::{OperatorBasis, QuantumState};
use crate::tol;

/// Preparations and observed outcome frequencies of one detector.
#[derive(Clone, Debug)]
pub struct TomographyRun {
    pub input_states: Vec<QuantumState>,
    /// One frequency vector per input; exact probabilities in exact mode.
    pub frequencies: Vec<Vec<f64>>,
    /// Raw histograms, present when shots were sampled.
    pub counts: Option<Vec<Vec<u64>>>,
    pub shots_per_state: Option<u64>,
}

impl TomographyRun {
    /// Builds a run from externally recorded histograms.
    pub fn from_counts(input_states: Vec<QuantumState>, counts: Vec<Vec<u64>>) -> Result<Self> {
        if input_states.len() != counts.len() || counts.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} input states with {} histograms",
                input_states.len(),
                counts.len()
            )));
        }
        let shots: u64 = counts[0].iter().sum();
        if shots == 0 || counts.iter().any(|c| c.iter().sum::<u64>() != shots || c.len() != counts[0].len()) {
            return Err(Error::invalid("tomography histograms", "totals or lengths differ between inputs"));
        }
        let frequencies = counts
            .iter()
            .map(|c| c.iter().map(|&n| n as f64 / shots as f64).collect())
            .collect();
        Ok(TomographyRun {
            input_states,
            frequencies,
            counts: Some(counts),
            shots_per_state: Some(shots),
        })
    }
}

/// Products of the six single-qubit Pauli eigenstates, `6^n` states with
/// qubit 0 varying slowest.
pub fn pauli_input_states(num_qubits: usize) -> Vec<QuantumState> {
    let single = QuantumState::pauli_eigenstates();
    let mut out = vec![];
    let total = 6usize.pow(num_qubits as u32);
    for idx in 0..total {
        let parts: Vec<QuantumState> = (0..num_qubits)
            .map(|q| single[(idx / 6usize.pow((num_qubits - 1 - q) as u32)) % 6].clone())
            .collect();
        out.push(QuantumState::tensor(&parts).expect("non-empty"));
    }
    out
}

/// Prepares every Pauli input state and records outcome frequencies.
pub fn acquire(source: &dyn MeasurementSource, mode: ShotMode, seed: u64) -> Result<TomographyRun> {
    mode.check()?;
    let input_states = pauli_input_states(source.num_qubits());
    let mut frequencies = Vec::with_capacity(input_states.len());
    let mut counts = Vec::with_capacity(input_states.len());
    for (j, rho) in input_states.iter().enumerate() {
        let probs = source.probabilities(rho)?;
        let (f, c) = mode.frequencies(&probs, seed, j as u64)?;
        frequencies.push(f);
        counts.extend(c);
    }
    Ok(TomographyRun {
        input_states,
        frequencies,
        counts: (!counts.is_empty()).then_some(counts),
        shots_per_state: mode.shots(),
    })
}

/// Least-squares effects fitted to the frequencies, then projected onto the
/// set of valid POVMs.
pub fn reconstruct_effects(run: &TomographyRun) -> Result<Povm> {
    let first = run.input_states.first().ok_or(Error::Empty("tomography run with no inputs"))?;
    let basis = OperatorBasis::normalized_pauli(first.num_qubits());
    let a = DMatrix::from_fn(run.input_states.len(), basis.len(), |j, k| {
        run.input_states[j].expectation(&basis.elements()[k])
    });
    let smallest = a.singular_values().min();
    if !(smallest > tol::RANK_CUTOFF) {
        return Err(Error::Tomography(format!(
            "input states are not informationally complete (smallest singular value {smallest:e})"
        )));
    }
    let m = run.frequencies[0].len();
    let f = DMatrix::from_fn(run.frequencies.len(), m, |j, o| run.frequencies[j][o]);
    let x = pseudo_inverse(&a) * f;
    let raw: Vec<_> = (0..m)
        .map(|o| basis.reconstruct_real(&x.column(o).iter().copied().collect::<Vec<_>>()))
        .collect();
    let projected = project_povm(&raw, PROJECTION_TOLERANCE, PROJECTION_MAX_ITER);
    Povm::with_tolerance(projected.operators, PROJECTION_TOLERANCE)
}

/// Detector tomography of a measurement pipeline.
pub fn run_qdt(source: &dyn MeasurementSource, mode: ShotMode, seed: u64) -> Result<Povm> {
    reconstruct_effects(&acquire(source, mode, seed)?)
}

/// Detector tomography of the native readout of one qubit (2 outcomes) or of
/// a qubit with its ancilla (4 outcomes).
pub fn run_native_qdt(noise: &NoiseModel, qubits: usize, qubit: usize, mode: ShotMode, seed: u64) -> Result<Povm> {
    run_qdt(&NativeReadoutSource::new(noise, qubits, qubit)?, mode, seed)
}

/// b-matrix of the reconstructed effects: the mitigation step.
pub fn mitigated_b_matrix(qdt_effects: &Povm) -> Result<DMatrix<f64>> {
    decompose_pauli(qdt_effects)
}

/// Largest per-effect Frobenius distance.
pub fn max_effect_error(a: &Povm, b: &Povm) -> f64 {
    a.effects()
        .iter()
        .zip(b.effects())
        .map(|(x, y)| x.distance(y))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{confusion_readout, real_effects_pm, NoiseConfig, Readout};
    use crate::povm::PmSimulablePovm;
    use crate::qcore::{Operator, Pauli};
    use crate::tomography::source::{IdealSource, PmPipelineSource};

    #[test]
    fn computational_projectors_recovered_exactly() {
        let povm = PmSimulablePovm::computational().effects();
        let q = run_qdt(&IdealSource(povm.clone()), ShotMode::Exact, 0).unwrap();
        assert!(max_effect_error(&q, &povm) < 1e-9);
    }

    #[test]
    fn random_pauli_recovered_exactly() {
        let povm = PmSimulablePovm::random_pauli().effects();
        let q = run_qdt(&IdealSource(povm.clone()), ShotMode::Exact, 0).unwrap();
        assert_eq!(q.len(), 6);
        assert!(max_effect_error(&q, &povm) < 1e-9);
    }

    #[test]
    fn noisy_pm_pipeline_within_tolerance() {
        let noise = NoiseConfig::default().to_model().unwrap();
        let spec = PmSimulablePovm::tetrahedral();
        let truth = real_effects_pm(&spec, &noise, 0).unwrap();
        let source = PmPipelineSource {
            spec,
            noise: Some(noise),
            qubit: 0,
        };
        let exact = run_qdt(&source, ShotMode::Exact, 0).unwrap();
        assert!(max_effect_error(&exact, &truth) < 1e-8);
        let q = run_qdt(&source, ShotMode::Shots(250_000), 11).unwrap();
        let err = max_effect_error(&q, &truth);
        assert!(err <= 0.02, "error {err}");
    }

    #[test]
    fn native_confusion_exact() {
        let noise = NoiseModel::parametric(0.1, 0.0, 0.0, 0.0, 0.0).unwrap();
        let q = run_native_qdt(&noise, 1, 0, ShotMode::Exact, 0).unwrap();
        assert!(q.effects()[0].distance(&Operator::diag(&[0.9, 0.0])) < 1e-9);
        assert!(q.effects()[1].distance(&Operator::diag(&[0.1, 1.0])) < 1e-9);
    }

    #[test]
    fn ideal_native_readout() {
        let q = run_native_qdt(&NoiseModel::ideal(), 2, 0, ShotMode::Exact, 0).unwrap();
        for i in 0..4 {
            assert!(q.effects()[i].distance(&Operator::basis_projector(4, i)) < 1e-9);
        }
    }

    #[test]
    fn two_qubit_confusion_product_sampled() {
        let noise = NoiseModel::new(
            Readout::Global(confusion_readout(0.04, 0.07).unwrap()),
            crate::qcore::Channel::identity(2),
            crate::qcore::Channel::identity(4),
            crate::qcore::Channel::identity(2),
        )
        .unwrap();
        let r = confusion_readout(0.04, 0.07).unwrap();
        let q = run_native_qdt(&noise, 2, 0, ShotMode::Shots(250_000), 3).unwrap();
        for i in 0..4 {
            let truth = r[i >> 1].kron(&r[i & 1]);
            let err = q.effects()[i].distance(&truth);
            assert!(err <= 0.02, "effect {i}: {err}");
        }
    }

    #[test]
    fn too_few_shots_rejected() {
        let povm = PmSimulablePovm::computational().effects();
        let err = run_qdt(&IdealSource(povm), ShotMode::Shots(999), 0).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn mitigated_b_matrix_of_ideal_qdt() {
        let spec = PmSimulablePovm::tetrahedral();
        let q = run_qdt(&IdealSource(spec.effects()), ShotMode::Exact, 0).unwrap();
        let ideal = decompose_pauli(&spec.effects()).unwrap();
        let b = mitigated_b_matrix(&q).unwrap();
        assert!((&b - &ideal).abs().max() < 1e-6);
    }

    #[test]
    fn mitigated_b_matrix_reproduces_paulis() {
        let noise = NoiseModel::parametric(0.05, 0.08, 0.0, 0.0, 0.0).unwrap();
        let source = PmPipelineSource {
            spec: PmSimulablePovm::tetrahedral(),
            noise: Some(noise),
            qubit: 0,
        };
        let q = run_qdt(&source, ShotMode::Shots(20_000), 5).unwrap();
        let b = mitigated_b_matrix(&q).unwrap();
        for p in Pauli::ALL {
            let mut acc = Operator::zeros(2);
            for (m, e) in q.effects().iter().enumerate() {
                acc += &e.scale(b[(p.index(), m)]);
            }
            assert!(acc.distance(&p.matrix()) < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn error_shrinks_with_shots() {
        let noise = NoiseConfig::default().to_model().unwrap();
        let spec = PmSimulablePovm::tetrahedral();
        let truth = real_effects_pm(&spec, &noise, 0).unwrap();
        let source = PmPipelineSource {
            spec,
            noise: Some(noise),
            qubit: 0,
        };
        let median = |shots| {
            let mut e: Vec<f64> = (0..20)
                .map(|s| max_effect_error(&run_qdt(&source, ShotMode::Shots(shots), s).unwrap(), &truth))
                .collect();
            e.sort_by(f64::total_cmp);
            (e[9] + e[10]) / 2.0
        };
        assert!(median(1_000_000) < median(10_000));
    }

    #[test]
    fn histogram_totals_checked() {
        let states = pauli_input_states(1);
        let mut counts = vec![vec![500, 500]; 6];
        assert!(TomographyRun::from_counts(states.clone(), counts.clone()).is_ok());
        counts[2] = vec![500, 501];
        assert!(TomographyRun::from_counts(states, counts).is_err());
    }
}
