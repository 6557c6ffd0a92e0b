use nalgebra::DMatrix;

use super::engine::{dilated_qubit_map, joint_distribution, sample_counts, Cdf};
use super::pm::fingerprint;
use super::record::ShotRecord;
use super::rng::{stream_rng, Stream};
use crate::error::{Error, Result};
use crate::estimator::{OutcomeCounts, OutcomeSpace, MAX_EXACT_OUTCOMES};
use crate::noise::{dilation_channel, dilation_readout, NoiseModel};
use crate::qcore::{QuantumState, C64};

fn dilation_maps(
    rho: &QuantumState,
    angles: &[Vec<f64>],
    noise: &NoiseModel,
    first_qubit: usize,
) -> Result<Vec<DMatrix<C64>>> {
    let n = rho.num_qubits();
    if angles.len() != n {
        return Err(Error::DimensionMismatch(format!("{} dilation circuits for {n} qubits", angles.len())));
    }
    noise.check_covers(n + first_qubit)?;
    let anc = noise.ancilla_state();
    angles
        .iter()
        .enumerate()
        .map(|(q, a)| {
            let ch = dilation_channel(a, noise)?;
            Ok(dilated_qubit_map(anc.rho(), &ch, &dilation_readout(noise, first_qubit + q)?))
        })
        .collect()
}

/// Distribution over the `2N` measured bits, ordered
/// `(s_1, a_1, s_2, a_2, ...)` with `s_1` most significant.
pub fn dilation_bit_distribution(rho: &QuantumState, angles: &[Vec<f64>], noise: &NoiseModel) -> Result<Vec<f64>> {
    let n = rho.num_qubits();
    if 4u64.checked_pow(n as u32).is_none_or(|s| s > MAX_EXACT_OUTCOMES) {
        return Err(Error::TooLarge(format!("{} measured bits", 2 * n)));
    }
    let maps = dilation_maps(rho, angles, noise, 0)?;
    let refs: Vec<&DMatrix<C64>> = maps.iter().collect();
    Ok(joint_distribution(rho.rho(), &refs))
}

/// Four-outcome distribution of register qubit `qubit`'s dilation pipeline
/// for a single-qubit input state.
pub fn dilation_qubit_distribution(
    rho: &QuantumState,
    angles: &[f64],
    noise: &NoiseModel,
    qubit: usize,
) -> Result<Vec<f64>> {
    let maps = dilation_maps(rho, &[angles.to_vec()], noise, qubit)?;
    Ok(joint_distribution(rho.rho(), &[&maps[0]]))
}

/// Pairs `(s_q, a_q)` of a `2N`-bit record into outcomes `2 s_q + a_q`.
pub fn pair_bits(raw: u64, num_qubits: usize) -> Vec<usize> {
    (0..num_qubits)
        .map(|q| {
            let shift = 2 * (num_qubits - 1 - q);
            let s = (raw >> (shift + 1)) & 1;
            let a = (raw >> shift) & 1;
            (2 * s + a) as usize
        })
        .collect()
}

/// Every system qubit gets its own ancilla and dilation circuit; all `2N`
/// qubits are measured and bit pairs are mapped to four outcomes.
pub fn sample_dilation(
    rho: &QuantumState,
    angles: &[Vec<f64>],
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::invalid("shot count", "must be at least 1"));
    }
    let n = rho.num_qubits();
    let cdf = Cdf::new(&dilation_bit_distribution(rho, angles, noise)?);
    let space = OutcomeSpace::uniform(n, 4)?;
    let mut rng = stream_rng(seed, Stream::Measure, 0);
    let raw: Vec<u64> = (0..shots).map(|_| cdf.sample(&mut rng) as u64).collect();
    let outcomes = raw
        .iter()
        .map(|&r| space.encode(&pair_bits(r, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShotRecord {
        space,
        outcomes,
        povm_version: dilation_version(angles),
        seed,
        raw_bits: Some(raw),
    })
}

/// Stable identifier of a set of per-qubit dilation angle vectors.
pub fn dilation_version(angles: &[Vec<f64>]) -> String {
    fingerprint(angles.iter().flatten().copied())
}

/// Multinomial histogram of dilation outcomes.
pub fn sample_counts_dilation(
    rho: &QuantumState,
    angles: &[Vec<f64>],
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    let probs = dilation_bit_distribution(rho, angles, noise)?;
    let mut rng = stream_rng(seed, Stream::Measure, u64::MAX);
    let counts = sample_counts(&probs, shots, &mut rng)?;
    // bit pairs (s, a) in base 4 are already the outcome index 2s + a
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(i, c)| (i as u64, c))
        .collect())
}
