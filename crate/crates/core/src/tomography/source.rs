use crate::error::{Error, Result};
use crate::noise::{dilation_readout, NoiseModel};
use crate::povm::{PmSimulablePovm, Povm};
use crate::qcore::{Operator, QuantumState};
use crate::sampler::{dilation_qubit_distribution, pm_qubit_distribution, sample_counts, stream_rng, Stream};

/// Minimum shots per input state for a sampled reconstruction.
pub const MIN_SHOTS: u64 = 1_000;

/// How outcome frequencies are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShotMode {
    /// Frequencies replaced by the true probabilities.
    Exact,
    /// Multinomial sampling with this many shots per input (or per setting).
    Shots(u64),
}

impl ShotMode {
    pub(crate) fn check(self) -> Result<()> {
        match self {
            ShotMode::Shots(s) if s < MIN_SHOTS => Err(Error::invalid(
                "tomography shots",
                format!("{s} shots per state, at least {MIN_SHOTS} required"),
            )),
            _ => Ok(()),
        }
    }

    pub fn shots(self) -> Option<u64> {
        match self {
            ShotMode::Exact => None,
            ShotMode::Shots(s) => Some(s),
        }
    }

    /// Frequencies for one input, drawn from stream `index` of `seed`.
    pub(crate) fn frequencies(self, probs: &[f64], seed: u64, index: u64) -> Result<(Vec<f64>, Option<Vec<u64>>)> {
        match self {
            ShotMode::Exact => Ok((probs.to_vec(), None)),
            ShotMode::Shots(s) => {
                let mut rng = stream_rng(seed, Stream::Tomography, index);
                let counts = sample_counts(probs, s, &mut rng)?;
                let f = counts.iter().map(|&c| c as f64 / s as f64).collect();
                Ok((f, Some(counts)))
            }
        }
    }
}

/// A detector under test: anything that turns a known input state into an
/// outcome distribution.
pub trait MeasurementSource {
    /// Qubits of the input register (1, or 2 for a native qubit+ancilla readout).
    fn num_qubits(&self) -> usize;
    fn num_outcomes(&self) -> usize;
    fn probabilities(&self, input: &QuantumState) -> Result<Vec<f64>>;
}

/// A POVM given directly by its effects.
#[derive(Clone, Debug)]
pub struct IdealSource(pub Povm);

impl MeasurementSource for IdealSource {
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn num_outcomes(&self) -> usize {
        self.0.len()
    }

    fn probabilities(&self, input: &QuantumState) -> Result<Vec<f64>> {
        Ok(self.0.probabilities(input).into_iter().map(|p| p.max(0.0)).collect())
    }
}

/// The randomised-basis pipeline of register qubit `qubit`, run through the
/// shot sampler's forward model.
#[derive(Clone, Debug)]
pub struct PmPipelineSource {
    pub spec: PmSimulablePovm,
    pub noise: Option<NoiseModel>,
    pub qubit: usize,
}

impl MeasurementSource for PmPipelineSource {
    fn num_qubits(&self) -> usize {
        1
    }

    fn num_outcomes(&self) -> usize {
        self.spec.num_outcomes()
    }

    fn probabilities(&self, input: &QuantumState) -> Result<Vec<f64>> {
        pm_qubit_distribution(input, &self.spec, self.noise.as_ref(), self.qubit)
    }
}

/// The noisy one-ancilla dilation of register qubit `qubit`, seen as a
/// four-outcome measurement of the system qubit.
#[derive(Clone, Debug)]
pub struct DilationPipelineSource {
    pub angles: Vec<f64>,
    pub noise: NoiseModel,
    pub qubit: usize,
}

impl MeasurementSource for DilationPipelineSource {
    fn num_qubits(&self) -> usize {
        1
    }

    fn num_outcomes(&self) -> usize {
        4
    }

    fn probabilities(&self, input: &QuantumState) -> Result<Vec<f64>> {
        dilation_qubit_distribution(input, &self.angles, &self.noise, self.qubit)
    }
}

/// The hardware's native computational readout: one qubit, or a qubit and
/// its ancilla read together (outcome `2 s + a`).
#[derive(Clone, Debug)]
pub struct NativeReadoutSource {
    effects: Povm,
}

impl NativeReadoutSource {
    pub fn new(noise: &NoiseModel, qubits: usize, qubit: usize) -> Result<Self> {
        let effects: Vec<Operator> = match qubits {
            1 => noise.readout(qubit)?.to_vec(),
            2 => dilation_readout(noise, qubit)?,
            _ => return Err(Error::invalid("native readout", format!("{qubits} qubits, expected 1 or 2"))),
        };
        Ok(NativeReadoutSource {
            effects: Povm::new(effects)?,
        })
    }

    pub fn effects(&self) -> &Povm {
        &self.effects
    }
}

impl MeasurementSource for NativeReadoutSource {
    fn num_qubits(&self) -> usize {
        self.effects.num_qubits()
    }

    fn num_outcomes(&self) -> usize {
        self.effects.len()
    }

    fn probabilities(&self, input: &QuantumState) -> Result<Vec<f64>> {
        Ok(self.effects.probabilities(input).into_iter().map(|p| p.max(0.0)).collect())
    }
}
