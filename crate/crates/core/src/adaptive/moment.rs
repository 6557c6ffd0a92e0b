use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::estimator::{
    decompose_operator, estimate_weighted, BMatrix, CompensatedSum, EstimateResult, OmegaTable, OutcomeCounts,
    OutcomeSpace,
};
use crate::povm::Povm;
use crate::qcore::PauliObservable;
use crate::sampler::ShotRecord;
use crate::tol;

/// Residual allowed when expressing new model effects in old effects.
pub const D_MATRIX_TOLERANCE: f64 = 1e-6;

/// Histogram of one acquisition run, tagged with the POVM it was taken with.
#[derive(Clone, Debug, PartialEq)]
pub struct Acquisition {
    pub space: OutcomeSpace,
    pub counts: OutcomeCounts,
    pub povm_version: String,
}

impl Acquisition {
    pub fn from_record(record: &ShotRecord) -> Self {
        Acquisition {
            space: record.space.clone(),
            counts: crate::estimator::count_outcomes(&record.outcomes),
            povm_version: record.povm_version.clone(),
        }
    }

    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// `d_rm` of one qubit: row `r` expresses new effect `r` in the old effects
/// the acquisition was interpreted with.
#[derive(Clone, Debug, PartialEq)]
pub struct DTable {
    pub qubit: usize,
    pub table: DMatrix<f64>,
    pub povm_version: String,
}

/// Minimal-norm `d` with `new_r = sum_m d_rm old_m`.
pub fn build_d_matrix(new_effects: &Povm, old_effects: &Povm) -> Result<DMatrix<f64>> {
    if new_effects.dim() != old_effects.dim() {
        return Err(Error::DimensionMismatch("new and old effects act on different spaces".into()));
    }
    let s = old_effects.smallest_singular_value();
    if !(s > tol::RANK_CUTOFF) {
        return Err(Error::NotInformationallyComplete(s));
    }
    let mut d = DMatrix::zeros(new_effects.len(), old_effects.len());
    for (r, e) in new_effects.effects().iter().enumerate() {
        let row = decompose_operator(old_effects, e)?;
        let mut recon = crate::qcore::Operator::zeros(e.dim());
        for (m, (&x, old)) in row.iter().zip(old_effects.effects()).enumerate() {
            d[(r, m)] = x;
            recon += &old.scale(x);
        }
        let residual = recon.distance(e);
        if residual > D_MATRIX_TOLERANCE {
            return Err(Error::NotInSpan(residual));
        }
    }
    Ok(d)
}

/// `(1/S) sum_shots sum_r d_{r m_q} omega_{(m_1..r..m_N)}(x')^2`: the second
/// moment at parameters `x'` (qubit `q` changed) estimated from data taken
/// at `x`.
pub fn second_moment_estimate(acq: &Acquisition, d: &DTable, new_omega: &OmegaTable) -> Result<f64> {
    let values = second_moment_terms(acq, d, new_omega)?;
    let shots: u64 = values.iter().map(|(_, n)| n).sum();
    let mut acc = CompensatedSum::default();
    for (g, n) in values {
        acc.add(g * n as f64);
    }
    Ok(acc.value() / shots as f64)
}

/// [`second_moment_estimate`] with the standard error of the shot average.
pub fn second_moment_with_error(acq: &Acquisition, d: &DTable, new_omega: &OmegaTable) -> Result<EstimateResult> {
    estimate_weighted(&second_moment_terms(acq, d, new_omega)?)
}

fn check_d(space: &OutcomeSpace, version: &str, d: &DTable, new_omega: &OmegaTable) -> Result<()> {
    if version != d.povm_version {
        return Err(Error::VersionMismatch(format!(
            "acquisition taken with POVM {version} but d-matrix built for {}",
            d.povm_version
        )));
    }
    let q = d.qubit;
    let old = space.radices();
    let new = new_omega.space().radices();
    let others_match = old.len() == new.len() && (0..old.len()).all(|i| i == q || old[i] == new[i]);
    if q >= old.len() || !others_match || d.table.ncols() != old[q] || d.table.nrows() != new[q] {
        return Err(Error::DimensionMismatch(format!(
            "d-matrix {}x{} on qubit {q} between radices {old:?} and {new:?}",
            d.table.nrows(),
            d.table.ncols()
        )));
    }
    Ok(())
}

/// `sum_r d_{r m_q} omega_{(.., r, ..)}(x')^2` for one old outcome.
fn reweighted_square(space: &OutcomeSpace, idx: u64, d: &DTable, new_omega: &OmegaTable) -> Result<f64> {
    let mut word = space.decode(idx);
    let m_q = word[d.qubit];
    let mut inner = 0.0;
    for r in 0..d.table.nrows() {
        word[d.qubit] = r;
        let w = new_omega.omega_word(&word)?;
        inner += d.table[(r, m_q)] * w * w;
    }
    Ok(inner)
}

/// Per-outcome summands `sum_r d_{r m_q} omega^2` with their multiplicities.
fn second_moment_terms(acq: &Acquisition, d: &DTable, new_omega: &OmegaTable) -> Result<Vec<(f64, u64)>> {
    check_d(&acq.space, &acq.povm_version, d, new_omega)?;
    if acq.shots() == 0 {
        return Err(Error::Empty("acquisition with no shots"));
    }
    acq.counts
        .iter()
        .map(|(&idx, &n)| Ok((reweighted_square(&acq.space, idx, d, new_omega)?, n)))
        .collect()
}

/// [`second_moment_estimate`] with the shot average replaced by the exact
/// outcome distribution `probs` (indexed like `space`) of the POVM
/// identified by `povm_version`.
pub fn second_moment_exact(
    space: &OutcomeSpace,
    probs: &[f64],
    povm_version: &str,
    d: &DTable,
    new_omega: &OmegaTable,
) -> Result<f64> {
    check_d(space, povm_version, d, new_omega)?;
    if probs.len() as u64 != space.size() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} outcomes",
            probs.len(),
            space.size()
        )));
    }
    let mut acc = CompensatedSum::default();
    for (idx, &p) in probs.iter().enumerate() {
        if p != 0.0 {
            acc.add(p * reweighted_square(space, idx as u64, d, new_omega)?);
        }
    }
    Ok(acc.value())
}

/// Precomputed form of [`second_moment_estimate`] for one modified qubit.
///
/// Writing `omega_m = sum_p b'_{p m_q} A_p(m_rest)` with the other qubits'
/// b-matrices folded into `A`, the estimate becomes
/// `sum_{m_q} sum_r d_{r m_q} b'_r^T G_{m_q} b'_r` with
/// `G_{m_q} = (1/S) sum_{shots with m_q} A A^T`, so a candidate costs
/// `O(M M')` regardless of the record size.
#[derive(Clone, Debug)]
pub struct QubitMoment {
    qubit: usize,
    gram: Vec<Matrix4<f64>>,
}

impl QubitMoment {
    /// `bmatrix` holds the tables the record was interpreted with; only the
    /// other qubits' tables are used.
    pub fn new(acq: &Acquisition, observable: &PauliObservable, bmatrix: &BMatrix, qubit: usize) -> Result<Self> {
        let n = acq.space.num_qubits();
        if observable.num_qubits() != n || bmatrix.num_qubits() != n || qubit >= n {
            return Err(Error::DimensionMismatch(format!(
                "moment for qubit {qubit} of {n} with a {}-qubit observable",
                observable.num_qubits()
            )));
        }
        let shots = acq.shots();
        if shots == 0 {
            return Err(Error::Empty("acquisition with no shots"));
        }
        let terms: Vec<(f64, Vec<usize>)> = observable
            .terms()
            .iter()
            .map(|(c, s)| (*c, s.0.iter().map(|p| p.index()).collect()))
            .collect();
        let tables = bmatrix.tables();
        let mut gram = vec![Matrix4::zeros(); acq.space.radices()[qubit]];
        for (&idx, &count) in &acq.counts {
            let word = acq.space.decode(idx);
            let mut a = nalgebra::Vector4::zeros();
            for (c, ks) in &terms {
                let mut prod = *c;
                for (i, (&k, &m)) in ks.iter().zip(&word).enumerate() {
                    if i != qubit {
                        prod *= tables[i][(k, m)];
                    }
                }
                a[ks[qubit]] += prod;
            }
            gram[word[qubit]] += a * a.transpose() * (count as f64 / shots as f64);
        }
        Ok(QubitMoment { qubit, gram })
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    /// Estimate for new b-table `b_new` (4 x M') and d-matrix `d` (M' x M).
    pub fn evaluate(&self, b_new: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        for (m, g) in self.gram.iter().enumerate() {
            for r in 0..d.nrows() {
                let w = d[(r, m)];
                if w == 0.0 {
                    continue;
                }
                let col = nalgebra::Vector4::new(b_new[(0, r)], b_new[(1, r)], b_new[(2, r)], b_new[(3, r)]);
                total += w * (col.transpose() * g * col)[0];
            }
        }
        total
    }
}

/// Empirical `mean(omega^2)` of an acquisition, with its standard error.
pub fn empirical_second_moment(acq: &Acquisition, table: &OmegaTable) -> Result<EstimateResult> {
    let values = acq
        .counts
        .iter()
        .map(|(&idx, &n)| table.omega(idx).map(|w| (w * w, n)))
        .collect::<Result<Vec<_>>>()?;
    estimate_weighted(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::model::tests::{random_model, random_params};
    use crate::adaptive::DetectorModel;
    use crate::estimator::decompose_pauli;
    use crate::povm::{PmFamily, PmSimulablePovm, PovmFamily};
    use crate::qcore::{random, Operator, QuantumState};
    use crate::sampler::{pm_outcome_distribution, povm_version, sample_counts_pm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pinv_oracle(new: &Povm, old: &Povm) -> DMatrix<f64> {
        // normal equations on the real vectorisation: d^T = V_old^+ V_new
        let vo = old.vectorized();
        let vn = new.vectorized();
        let gram = vo.transpose() * &vo;
        let pinv = gram.pseudo_inverse(1e-12).unwrap() * vo.transpose();
        (pinv * vn).transpose()
    }

    #[test]
    fn identical_effects_give_identity() {
        let p = PmSimulablePovm::tetrahedral().effects();
        let d = build_d_matrix(&p, &p).unwrap();
        assert!((d - DMatrix::identity(4, 4)).abs().max() < 1e-10);
    }

    #[test]
    fn average_of_two_effects() {
        let old = PmSimulablePovm::random_pauli().effects();
        let e = old.effects();
        let avg = &e[0].scale(0.5) + &e[1].scale(0.5);
        let rest = &Operator::identity(2) - &avg;
        let new = Povm::new(vec![avg, rest]).unwrap();
        let d = build_d_matrix(&new, &old).unwrap();
        let row: Vec<f64> = d.row(0).iter().copied().collect();
        let expected = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0];
        // minimal norm spreads over linearly dependent effects; check the span instead
        let mut recon = Operator::zeros(2);
        for (x, o) in row.iter().zip(e) {
            recon += &o.scale(*x);
        }
        let mut direct = Operator::zeros(2);
        for (x, o) in expected.iter().zip(e) {
            direct += &o.scale(*x);
        }
        assert!(recon.distance(&direct) < 1e-12);
        // for a basis (no redundancy) the row is exactly (0.5, 0.5, 0, 0)
        let tet = PmSimulablePovm::tetrahedral().effects();
        let t = tet.effects();
        let avg = &t[0].scale(0.5) + &t[1].scale(0.5);
        let new = Povm::new(vec![avg.clone(), &Operator::identity(2) - &avg]).unwrap();
        let d = build_d_matrix(&new, &tet).unwrap();
        for (m, want) in [0.5, 0.5, 0.0, 0.0].iter().enumerate() {
            assert!((d[(0, m)] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn random_pairs_match_least_squares_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let family = PovmFamily::Pm(PmFamily::default());
        let mut checked = 0;
        for _ in 0..40 {
            let old = family.effects(&random_params(family, &mut rng)).unwrap();
            let new = family.effects(&random_params(family, &mut rng)).unwrap();
            // random relabellings blur the effects towards I/M
            if old.smallest_singular_value() < 1e-3 {
                continue;
            }
            checked += 1;
            let d = build_d_matrix(&new, &old).unwrap();
            let oracle = pinv_oracle(&new, &old);
            assert!((&d - &oracle).abs().max() < 1e-6 * d.abs().max().max(1.0));
            for (r, e) in new.effects().iter().enumerate() {
                let mut recon = Operator::zeros(2);
                for (m, o) in old.effects().iter().enumerate() {
                    recon += &o.scale(d[(r, m)]);
                }
                assert!(recon.distance(e) < 1e-10);
            }
        }
        assert!(checked >= 10);
    }

    #[test]
    fn non_ic_old_effects_rejected() {
        let old = PmSimulablePovm::computational().effects();
        let new = PmSimulablePovm::tetrahedral().effects();
        assert!(matches!(build_d_matrix(&new, &old), Err(Error::NotInformationallyComplete(_))));
    }

    fn setup(seed: u64) -> (QuantumState, PauliObservable, Vec<PmSimulablePovm>, Vec<Povm>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::density_matrix(2, &mut rng);
        let obs = random::observable(2, 5, &mut rng);
        let family = PmFamily::default();
        let specs: Vec<PmSimulablePovm> = (0..2)
            .map(|_| loop {
                let x = random_params(PovmFamily::Pm(family), &mut rng);
                let s = family.povm_from_params(&x).unwrap();
                if s.effects().smallest_singular_value() > 0.05 {
                    break s;
                }
            })
            .collect();
        let effects = specs.iter().map(|s| s.effects()).collect();
        (rho, obs, specs, effects)
    }

    #[test]
    fn identity_d_gives_empirical_second_moment() {
        let (rho, obs, specs, effects) = setup(1);
        let counts = sample_counts_pm(&rho, &specs, None, 5000, 3).unwrap();
        let acq = Acquisition {
            space: OutcomeSpace::uniform(2, 4).unwrap(),
            counts,
            povm_version: povm_version(&specs),
        };
        let table = OmegaTable::new(obs.clone(), BMatrix::from_povms(&effects).unwrap()).unwrap();
        let d = DTable {
            qubit: 1,
            table: DMatrix::identity(4, 4),
            povm_version: acq.povm_version.clone(),
        };
        let a = second_moment_estimate(&acq, &d, &table).unwrap();
        let b = empirical_second_moment(&acq, &table).unwrap().mean;
        assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
        let stale = DTable {
            povm_version: "other".into(),
            ..d
        };
        assert!(matches!(second_moment_estimate(&acq, &stale, &table), Err(Error::VersionMismatch(_))));
    }

    #[test]
    fn exact_mode_matches_direct_sum_and_fast_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..5 {
            let (rho, obs, specs, effects) = setup(seed);
            let probs = pm_outcome_distribution(&rho, &specs, None).unwrap();
            // exact mode: counts replaced by probabilities scaled to a large integer-free weight
            let space = OutcomeSpace::uniform(2, 4).unwrap();
            let q = (seed % 2) as usize;
            let family = PovmFamily::Pm(PmFamily::default());
            let model = random_model(family, &mut rng);
            let x_new = random_params(family, &mut rng);
            let new = model.model_effects(&x_new).unwrap();
            if new.smallest_singular_value() < 1e-3 {
                continue;
            }
            let d = build_d_matrix(&new, &effects[q]).unwrap();
            let mut new_povms = effects.clone();
            new_povms[q] = new.clone();
            let new_table = OmegaTable::new(obs.clone(), BMatrix::from_povms(&new_povms).unwrap()).unwrap();
            // direct: sum_m p_m sum_r d_{r m_q} omega_r^2
            let mut direct = 0.0;
            for (idx, p) in probs.iter().enumerate() {
                let mut word = space.decode(idx as u64);
                let mq = word[q];
                for r in 0..4 {
                    word[q] = r;
                    let w = new_table.omega_word(&word).unwrap();
                    direct += p * d[(r, mq)] * w * w;
                }
            }
            // weight outcomes by probabilities through a fine integer histogram
            let scale = 1u64 << 40;
            let counts: OutcomeCounts = probs
                .iter()
                .enumerate()
                .map(|(i, p)| (i as u64, (p * scale as f64).round() as u64))
                .filter(|(_, c)| *c > 0)
                .collect();
            let acq = Acquisition {
                space: space.clone(),
                counts,
                povm_version: "x".into(),
            };
            let dt = DTable {
                qubit: q,
                table: d.clone(),
                povm_version: "x".into(),
            };
            let est = second_moment_estimate(&acq, &dt, &new_table).unwrap();
            assert!((est - direct).abs() < 1e-9 * direct.abs().max(1.0), "{est} vs {direct}");
            let old_b = BMatrix::from_povms(&effects).unwrap();
            let fast = QubitMoment::new(&acq, &obs, &old_b, q).unwrap();
            let b_new = decompose_pauli(&new).unwrap();
            assert!((fast.evaluate(&b_new, &d) - est).abs() < 1e-9 * est.abs().max(1.0));
        }
    }

    #[test]
    fn matched_model_recovers_true_second_moment() {
        // exact model: sum_m p_m(x) sum_r d_rm w_r^2 == sum_r p_r(x') w_r^2
        let (rho, obs, specs, effects) = setup(5);
        let family = PmFamily::default();
        let model = DetectorModel::ideal(PovmFamily::Pm(family));
        let x_new = family.params_from_povm(&PmSimulablePovm::tetrahedral()).unwrap();
        let new = model.model_effects(&x_new).unwrap();
        let d = build_d_matrix(&new, &effects[0]).unwrap();
        let mut new_specs = specs.clone();
        new_specs[0] = PmSimulablePovm::tetrahedral();
        let mut new_povms = effects.clone();
        new_povms[0] = new;
        let table = OmegaTable::new(obs.clone(), BMatrix::from_povms(&new_povms).unwrap()).unwrap();
        let p_old = pm_outcome_distribution(&rho, &specs, None).unwrap();
        let p_new = pm_outcome_distribution(&rho, &new_specs, None).unwrap();
        let space = OutcomeSpace::uniform(2, 4).unwrap();
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for idx in 0..16u64 {
            let mut word = space.decode(idx);
            let w = table.omega(idx).unwrap();
            rhs += p_new[idx as usize] * w * w;
            let m0 = word[0];
            for r in 0..4 {
                word[0] = r;
                let w = table.omega_word(&word).unwrap();
                lhs += p_old[idx as usize] * d[(r, m0)] * w * w;
            }
        }
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }
}
