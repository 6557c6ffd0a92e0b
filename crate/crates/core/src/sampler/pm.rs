use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::engine::{joint_distribution, qubit_map, sample_counts, Cdf};
use super::record::ShotRecord;
use super::rng::{stream_rng, Stream};
use crate::error::{Error, Result};
use crate::estimator::{OutcomeCounts, OutcomeSpace, MAX_EXACT_OUTCOMES};
use crate::noise::NoiseModel;
use crate::povm::PmSimulablePovm;
use crate::qcore::{Channel, Operator, QuantumState, C64};

/// Deduplicated list of basis choices with their shot counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitBatch {
    pub circuits: Vec<(Vec<usize>, u64)>,
    pub total_shots: u64,
}

/// Stable identifier of a set of per-qubit POVMs (FNV-1a over the bits of
/// every parameter).
pub fn povm_version(povms: &[PmSimulablePovm]) -> String {
    fingerprint(povms.iter().flat_map(|p| {
        p.alphas()
            .iter()
            .chain(p.unitary_angles().iter().flatten())
            .chain(p.relabel().iter().flatten())
            .copied()
    }))
}

pub(crate) fn fingerprint(values: impl IntoIterator<Item = f64>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in values {
        for byte in x.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Per-qubit, per-basis forward maps plus the classical sampling tables.
struct PmPipeline<'a> {
    rho: &'a QuantumState,
    povms: &'a [PmSimulablePovm],
    /// `[qubit][k]`: `2 x 4` map (rotate, optional noise, native readout).
    maps: Vec<Vec<DMatrix<C64>>>,
    bases: Vec<Cdf>,
    relabel: Vec<Vec<Cdf>>,
    space: OutcomeSpace,
}

impl<'a> PmPipeline<'a> {
    /// `first_qubit` is the register index of `rho`'s qubit 0, used to pick
    /// per-qubit readout models.
    fn new(
        rho: &'a QuantumState,
        povms: &'a [PmSimulablePovm],
        noise: Option<&NoiseModel>,
        first_qubit: usize,
    ) -> Result<Self> {
        let n = rho.num_qubits();
        if povms.len() != n {
            return Err(Error::DimensionMismatch(format!("{} POVMs for {n} qubits", povms.len())));
        }
        if let Some(noise) = noise {
            noise.check_covers(n + first_qubit)?;
        }
        let ideal_readout = [Operator::basis_projector(2, 0), Operator::basis_projector(2, 1)];
        let mut maps = Vec::with_capacity(n);
        for (q, p) in povms.iter().enumerate() {
            let readout = match noise {
                Some(nm) => nm.readout(first_qubit + q)?.clone(),
                None => ideal_readout.clone(),
            };
            let per_k = p
                .unitaries()
                .iter()
                .map(|u| {
                    let ch = match noise {
                        Some(nm) => nm.noisy_single(u)?,
                        None => Channel::unitary(u)?,
                    };
                    Ok(qubit_map(&ch, &readout))
                })
                .collect::<Result<Vec<_>>>()?;
            maps.push(per_k);
        }
        Ok(PmPipeline {
            rho,
            povms,
            maps,
            bases: povms.iter().map(|p| Cdf::new(p.alphas())).collect(),
            relabel: povms
                .iter()
                .map(|p| p.relabel().iter().map(|row| Cdf::new(row)).collect())
                .collect(),
            space: OutcomeSpace::new(povms.iter().map(|p| p.num_outcomes()).collect())?,
        })
    }

    fn n(&self) -> usize {
        self.povms.len()
    }

    fn bit_distribution(&self, ks: &[usize]) -> Cdf {
        let maps: Vec<&DMatrix<C64>> = ks.iter().enumerate().map(|(q, &k)| &self.maps[q][k]).collect();
        Cdf::new(&joint_distribution(self.rho.rho(), &maps))
    }

    fn draw_bases<R: rand::Rng>(&self, rng: &mut R) -> Vec<usize> {
        self.bases.iter().map(|c| c.sample(rng)).collect()
    }

    fn relabel_word<R: rand::Rng>(&self, ks: &[usize], bits: usize, rng: &mut R) -> u64 {
        let n = self.n();
        let mut idx = 0u64;
        for (q, &k) in ks.iter().enumerate() {
            let b = (bits >> (n - 1 - q)) & 1;
            let m = self.relabel[q][2 * k + b].sample(rng);
            idx = idx * self.space.radices()[q] as u64 + m as u64;
        }
        idx
    }

    /// Shot-by-shot protocol: basis choice, measurement, relabelling.
    fn sample(&self, shots: u64, seed: u64) -> Vec<u64> {
        let mut basis_rng = stream_rng(seed, Stream::Basis, 0);
        let mut meas_rng = stream_rng(seed, Stream::Measure, 0);
        let mut relabel_rng = stream_rng(seed, Stream::Relabel, 0);
        let mut cache: HashMap<Vec<usize>, Cdf> = HashMap::new();
        (0..shots)
            .map(|_| {
                let ks = self.draw_bases(&mut basis_rng);
                let cdf = cache.entry(ks.clone()).or_insert_with(|| self.bit_distribution(&ks));
                let bits = cdf.sample(&mut meas_rng);
                self.relabel_word(&ks, bits, &mut relabel_rng)
            })
            .collect()
    }

    fn record(&self, outcomes: Vec<u64>, seed: u64) -> ShotRecord {
        ShotRecord {
            space: self.space.clone(),
            outcomes,
            povm_version: povm_version(self.povms),
            seed,
            raw_bits: None,
        }
    }

    /// Per-qubit `M x 4` map of the whole randomised measurement.
    fn outcome_maps(&self) -> Vec<DMatrix<C64>> {
        self.povms
            .iter()
            .zip(&self.maps)
            .map(|(p, per_k)| {
                let mut out = DMatrix::zeros(p.num_outcomes(), 4);
                for (k, map) in per_k.iter().enumerate() {
                    for b in 0..2 {
                        for (m, &w) in p.relabel_row(k, b).iter().enumerate() {
                            let w = w * p.alphas()[k];
                            if w != 0.0 {
                                for c in 0..4 {
                                    out[(m, c)] += map[(b, c)] * w;
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect()
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::invalid("shot count", "must be at least 1"));
    }
    Ok(())
}

/// Simulates `shots` runs of the randomised protocol on `rho` with ideal
/// gates and readout.
pub fn sample_shots(rho: &QuantumState, povms: &[PmSimulablePovm], shots: u64, seed: u64) -> Result<ShotRecord> {
    check_shots(shots)?;
    let p = PmPipeline::new(rho, povms, None, 0)?;
    Ok(p.record(p.sample(shots, seed), seed))
}

/// Same protocol with every rotation followed by gate noise and the native
/// readout replaced by the model's noisy effects.
pub fn sample_shots_noisy(
    rho: &QuantumState,
    povms: &[PmSimulablePovm],
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<ShotRecord> {
    check_shots(shots)?;
    let p = PmPipeline::new(rho, povms, Some(noise), 0)?;
    Ok(p.record(p.sample(shots, seed), seed))
}

/// Draws the per-shot basis lists (same stream as [`sample_shots`]) and
/// groups identical lists into circuits, ordered by basis list.
pub fn make_batch(povms: &[PmSimulablePovm], shots: u64, seed: u64) -> Result<CircuitBatch> {
    check_shots(shots)?;
    if povms.is_empty() {
        return Err(Error::Empty("batch for zero qubits"));
    }
    let bases: Vec<Cdf> = povms.iter().map(|p| Cdf::new(p.alphas())).collect();
    let mut rng = stream_rng(seed, Stream::Basis, 0);
    let mut groups: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for _ in 0..shots {
        let ks: Vec<usize> = bases.iter().map(|c| c.sample(&mut rng)).collect();
        *groups.entry(ks).or_default() += 1;
    }
    Ok(CircuitBatch {
        circuits: groups.into_iter().collect(),
        total_shots: shots,
    })
}

/// Runs every circuit of the batch for its shot count and relabels the
/// downloaded bits. Circuit `i` uses its own measurement and relabel
/// streams; output is ordered by circuit then shot.
pub fn run_batch(
    rho: &QuantumState,
    batch: &CircuitBatch,
    povms: &[PmSimulablePovm],
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<ShotRecord> {
    let p = PmPipeline::new(rho, povms, noise, 0)?;
    let sum: u64 = batch.circuits.iter().map(|(_, c)| c).sum();
    if sum != batch.total_shots || batch.circuits.len() as u64 > batch.total_shots {
        return Err(Error::invalid("circuit batch", format!("counts sum to {sum}, total {}", batch.total_shots)));
    }
    for (ks, _) in &batch.circuits {
        if ks.len() != p.n() || ks.iter().zip(povms).any(|(&k, pv)| k >= pv.num_bases()) {
            return Err(Error::invalid("circuit batch", format!("basis list {ks:?}")));
        }
    }
    let parts: Vec<Vec<u64>> = batch
        .circuits
        .par_iter()
        .enumerate()
        .map(|(i, (ks, count))| {
            let cdf = p.bit_distribution(ks);
            let mut meas = stream_rng(seed, Stream::Measure, i as u64);
            let mut rel = stream_rng(seed, Stream::Relabel, i as u64);
            (0..*count)
                .map(|_| {
                    let bits = cdf.sample(&mut meas);
                    p.relabel_word(ks, bits, &mut rel)
                })
                .collect()
        })
        .collect();
    Ok(p.record(parts.concat(), seed))
}

/// Exact distribution over all `prod M_i` outcome words of the (optionally
/// noisy) protocol.
pub fn pm_outcome_distribution(
    rho: &QuantumState,
    povms: &[PmSimulablePovm],
    noise: Option<&NoiseModel>,
) -> Result<Vec<f64>> {
    let p = PmPipeline::new(rho, povms, noise, 0)?;
    if p.space.size() > MAX_EXACT_OUTCOMES {
        return Err(Error::TooLarge(format!("{} outcomes", p.space.size())));
    }
    let maps = p.outcome_maps();
    let refs: Vec<&DMatrix<C64>> = maps.iter().collect();
    Ok(joint_distribution(rho.rho(), &refs))
}

/// Exact outcome distribution of register qubit `qubit`'s pipeline for a
/// single-qubit input state.
pub fn pm_qubit_distribution(
    rho: &QuantumState,
    spec: &PmSimulablePovm,
    noise: Option<&NoiseModel>,
    qubit: usize,
) -> Result<Vec<f64>> {
    let povms = std::slice::from_ref(spec);
    let p = PmPipeline::new(rho, povms, noise, qubit)?;
    let maps = p.outcome_maps();
    Ok(joint_distribution(rho.rho(), &[&maps[0]]))
}

/// Histogram of `shots` outcomes drawn as one multinomial sample from the
/// exact protocol distribution; statistically equivalent to
/// [`sample_shots_noisy`] and much cheaper for large shot counts.
pub fn sample_counts_pm(
    rho: &QuantumState,
    povms: &[PmSimulablePovm],
    noise: Option<&NoiseModel>,
    shots: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    check_shots(shots)?;
    let probs = pm_outcome_distribution(rho, povms, noise)?;
    let mut rng = stream_rng(seed, Stream::Measure, u64::MAX);
    let counts = sample_counts(&probs, shots, &mut rng)?;
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(i, c)| (i as u64, c))
        .collect())
}
