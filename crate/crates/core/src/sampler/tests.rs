use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::*;
use crate::estimator::count_outcomes;
use crate::noise::{real_effects_pm, NoiseModel};
use crate::povm::{PmFamily, PmSimulablePovm};
use crate::qcore::{tensor, Operator, QuantumState, C64};

/// Pearson goodness of fit; bins with expected count below 5 are pooled.
fn chi2_pvalue(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    let (mut stat, mut dof) = (0.0, 0usize);
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * n as f64;
        if e < 5.0 {
            pool_o += o as f64;
            pool_e += e;
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        dof += 1;
    }
    if pool_e >= 5.0 {
        stat += (pool_o - pool_e).powi(2) / pool_e;
        dof += 1;
    }
    1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat)
}

fn histogram(rec: &ShotRecord) -> Vec<u64> {
    let mut h = vec![0; rec.space.size() as usize];
    for &o in &rec.outcomes {
        h[o as usize] += 1;
    }
    h
}

/// Dense oracle `Tr[rho (Pi_m1 (x) Pi_m2 ...)]`.
fn dense_probs(rho: &QuantumState, effects: &[Vec<Operator>]) -> Vec<f64> {
    let sizes: Vec<usize> = effects.iter().map(|e| e.len()).collect();
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut ops = vec![Operator::identity(1); effects.len()];
            for q in (0..effects.len()).rev() {
                ops[q] = effects[q][idx % sizes[q]].clone();
                idx /= sizes[q];
            }
            rho.expectation(&tensor(&ops).unwrap())
        })
        .collect()
}

#[test]
fn zero_state_computational() {
    let rec = sample_shots(&QuantumState::basis(1, 0), &[PmSimulablePovm::computational()], 100, 1).unwrap();
    assert_eq!(rec.shots(), 100);
    assert!(rec.outcomes.iter().all(|&o| o == 0));
}

#[test]
fn mixed_state_random_pauli_is_uniform() {
    let s = 600_000u64;
    let rec = sample_shots(&QuantumState::maximally_mixed(1), &[PmSimulablePovm::random_pauli()], s, 2).unwrap();
    let sigma = (s as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
    for c in histogram(&rec) {
        assert!((c as f64 - s as f64 / 6.0).abs() < 5.0 * sigma);
    }
}

#[test]
fn bell_state_joint_frequencies() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let bell = QuantumState::pure(&[C64::new(h, 0.0), z, z, C64::new(h, 0.0)]).unwrap();
    let p = PmSimulablePovm::random_pauli();
    let povms = vec![p.clone(), p.clone()];
    let rec = sample_shots(&bell, &povms, 200_000, 3).unwrap();
    let e = p.effects().effects().to_vec();
    let probs = dense_probs(&bell, &[e.clone(), e]);
    assert!(chi2_pvalue(&histogram(&rec), &probs) > 0.01);
}

#[test]
fn deterministic_records() {
    let rho = QuantumState::maximally_mixed(2);
    let povms = vec![PmSimulablePovm::tetrahedral(); 2];
    let a = sample_shots(&rho, &povms, 1000, 77).unwrap();
    let b = sample_shots(&rho, &povms, 1000, 77).unwrap();
    assert_eq!(a, b);
    let c = sample_shots(&rho, &povms, 1000, 78).unwrap();
    assert_ne!(a.outcomes, c.outcomes);
    let batch = make_batch(&povms, 1000, 5).unwrap();
    assert_eq!(run_batch(&rho, &batch, &povms, None, 5).unwrap(), run_batch(&rho, &batch, &povms, None, 5).unwrap());
}

#[test]
fn batch_shapes() {
    let comp = vec![PmSimulablePovm::computational(); 2];
    let b = make_batch(&comp, 500, 1).unwrap();
    assert_eq!(b.circuits, vec![(vec![0, 0], 500)]);
    let b = make_batch(&[PmSimulablePovm::random_pauli()], 1, 1).unwrap();
    assert_eq!(b.circuits.len(), 1);
    assert_eq!(b.circuits[0].1, 1);

    let rp = vec![PmSimulablePovm::random_pauli(); 2];
    let s = 10_000u64;
    let b = make_batch(&rp, s, 9).unwrap();
    assert!(b.circuits.len() <= 9);
    assert_eq!(b.circuits.iter().map(|c| c.1).sum::<u64>(), s);
    let sigma = (s as f64 * (1.0 / 9.0) * (8.0 / 9.0)).sqrt();
    for (_, c) in &b.circuits {
        assert!((*c as f64 - s as f64 / 9.0).abs() < 5.0 * sigma);
    }
    assert!(make_batch(&rp, 0, 1).is_err());
}

#[test]
fn batched_runs() {
    let comp = vec![PmSimulablePovm::computational()];
    let zero = QuantumState::basis(1, 0);
    let b = make_batch(&comp, 300, 4).unwrap();
    let rec = run_batch(&zero, &b, &comp, None, 4).unwrap();
    assert_eq!(rec.shots(), 300);
    assert!(rec.outcomes.iter().all(|&o| o == 0));

    let bad = CircuitBatch { circuits: vec![(vec![0], 3)], total_shots: 4 };
    assert!(run_batch(&zero, &bad, &comp, None, 1).is_err());
}

#[test]
fn batched_matches_unbatched_marginals() {
    let rho = QuantumState::maximally_mixed(2);
    let povms = vec![PmSimulablePovm::tetrahedral(); 2];
    let s = 100_000;
    let direct = sample_shots(&rho, &povms, s, 10).unwrap();
    let batch = make_batch(&povms, s, 10).unwrap();
    let batched = run_batch(&rho, &batch, &povms, None, 10).unwrap();
    assert_eq!(batched.shots(), s as usize);
    // two-sample chi-squared on the joint histograms
    let (ha, hb) = (histogram(&direct), histogram(&batched));
    let mut stat = 0.0;
    let mut dof = 0;
    for (a, b) in ha.iter().zip(&hb) {
        let (a, b) = (*a as f64, *b as f64);
        if a + b > 0.0 {
            stat += (a - b).powi(2) / (a + b);
            dof += 1;
        }
    }
    let p = 1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.01, "p = {p}");
}

#[test]
fn zero_noise_equals_ideal() {
    let rho = crate::qcore::random::density_matrix(2, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(6));
    let povms = vec![PmSimulablePovm::tetrahedral(), PmSimulablePovm::random_pauli()];
    let a = pm_outcome_distribution(&rho, &povms, None).unwrap();
    let b = pm_outcome_distribution(&rho, &povms, Some(&NoiseModel::ideal())).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
    let ra = sample_shots(&rho, &povms, 2000, 8).unwrap();
    let rb = sample_shots_noisy(&rho, &povms, &NoiseModel::ideal(), 2000, 8).unwrap();
    assert_eq!(ra.shots(), rb.shots());
}

#[test]
fn readout_flip_rate() {
    let noise = NoiseModel::parametric(0.1, 0.0, 0.0, 0.0, 0.0).unwrap();
    let s = 100_000u64;
    let rec = sample_shots_noisy(&QuantumState::basis(1, 0), &[PmSimulablePovm::computational()], &noise, s, 12).unwrap();
    let ones = rec.outcomes.iter().filter(|&&o| o == 1).count() as f64;
    let sigma = (s as f64 * 0.1 * 0.9).sqrt();
    assert!((ones - 0.1 * s as f64).abs() < 5.0 * sigma);
}

#[test]
fn noisy_frequencies_match_ground_truth_effects() {
    let noise = NoiseModel::parametric(0.02, 0.03, 0.05, 0.0, 0.0).unwrap();
    let fam = PmFamily::default();
    let params: Vec<f64> = (0..fam.num_params()).map(|i| 0.2 + 0.031 * (i % 40) as f64).collect();
    let spec = fam.povm_from_params(&params).unwrap();
    let rho = QuantumState::from_bloch([0.3, -0.5, 0.6]).unwrap();
    let real = real_effects_pm(&spec, &noise, 0).unwrap();
    let probs = real.probabilities(&rho);
    let rec = sample_shots_noisy(&rho, &[spec], &noise, 1_000_000, 13).unwrap();
    assert!(chi2_pvalue(&histogram(&rec), &probs) > 0.01);
}

#[test]
fn multinomial_path_matches_distribution() {
    let rho = QuantumState::from_bloch([0.1, 0.2, -0.7]).unwrap();
    let povms = vec![PmSimulablePovm::tetrahedral()];
    let counts = sample_counts_pm(&rho, &povms, None, 200_000, 4).unwrap();
    assert_eq!(counts.values().sum::<u64>(), 200_000);
    let probs = pm_outcome_distribution(&rho, &povms, None).unwrap();
    let obs: Vec<u64> = (0..4).map(|i| *counts.get(&i).unwrap_or(&0)).collect();
    assert!(chi2_pvalue(&obs, &probs) > 0.01);
    // histograms of per-shot records have the same shape
    let rec = sample_shots(&rho, &povms, 1000, 1).unwrap();
    assert_eq!(count_outcomes(&rec.outcomes).values().sum::<u64>(), 1000);
}

#[test]
fn dimension_errors() {
    let rho = QuantumState::maximally_mixed(2);
    assert!(sample_shots(&rho, &[PmSimulablePovm::computational()], 10, 1).is_err());
    assert!(sample_shots(&QuantumState::maximally_mixed(1), &[PmSimulablePovm::computational()], 0, 1).is_err());
    let per = crate::noise::NoiseConfig::parse(
        r#"{"schema":1,"readout":[{"p10":0.0,"p01":0.0}],"depol_1q":0,"depol_2q":0,"ancilla_damping":0}"#,
    )
    .unwrap()
    .to_model()
    .unwrap();
    let povms = vec![PmSimulablePovm::computational(); 2];
    assert!(matches!(
        sample_shots_noisy(&rho, &povms, &per, 10, 1),
        Err(crate::error::Error::MissingNoise(_))
    ));
}
