//! Frobenius-nearest physical objects by Dykstra's alternating projections
//! between the PSD cone and an affine normalisation constraint.

use crate::qcore::Operator;

pub const PROJECTION_TOLERANCE: f64 = 1e-6;
pub const PROJECTION_MAX_ITER: usize = 1000;

/// Outcome of a projection: the projected operators and how far they moved.
#[derive(Clone, Debug)]
pub struct Projected {
    pub operators: Vec<Operator>,
    pub iterations: usize,
    /// Frobenius distance between input and output, over all operators.
    pub correction: f64,
}

fn total_distance(a: &[Operator], b: &[Operator]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.distance(y).powi(2)).sum::<f64>().sqrt()
}

fn min_eigenvalue(ops: &[Operator]) -> f64 {
    ops.iter().map(Operator::min_eigenvalue).fold(f64::INFINITY, f64::min)
}

fn dykstra(
    start: Vec<Operator>,
    affine: impl Fn(&[Operator]) -> Vec<Operator>,
    tol: f64,
    max_iter: usize,
) -> (Vec<Operator>, usize) {
    let mut x: Vec<Operator> = start.iter().map(Operator::hermitian_part).collect();
    let zero = |ops: &[Operator]| ops.iter().map(|o| Operator::zeros(o.dim())).collect::<Vec<_>>();
    let mut p = zero(&x);
    let mut q = zero(&x);
    let mut iterations = 0;
    x = affine(&x);
    while iterations < max_iter {
        if min_eigenvalue(&x) >= -0.1 * tol {
            break;
        }
        iterations += 1;
        let y: Vec<Operator> = x.iter().zip(&p).map(|(xi, pi)| (xi + pi).psd_projection()).collect();
        p = x.iter().zip(&p).zip(&y).map(|((xi, pi), yi)| &(xi + pi) - yi).collect();
        let shifted: Vec<Operator> = y.iter().zip(&q).map(|(yi, qi)| yi + qi).collect();
        let next = affine(&shifted);
        q = shifted.iter().zip(&next).map(|(s, n)| s - n).collect();
        let step = total_distance(&x, &next);
        x = next;
        if step < 0.1 * tol && min_eigenvalue(&x) >= -tol {
            break;
        }
    }
    (x, iterations)
}

/// Mixes `ops` with `target` (which satisfies both constraints strictly) just
/// enough to remove any remaining negative eigenvalue.
fn polish(ops: Vec<Operator>, target: &[Operator]) -> Vec<Operator> {
    let mut worst = 0.0f64;
    for (o, t) in ops.iter().zip(target) {
        let lo = o.min_eigenvalue();
        if lo < 0.0 {
            let floor = t.min_eigenvalue();
            worst = worst.max(-lo / (floor - lo));
        }
    }
    if worst == 0.0 {
        return ops;
    }
    let t = (worst * (1.0 + 1e-9)).min(1.0);
    ops.iter().zip(target).map(|(o, g)| &o.scale(1.0 - t) + &g.scale(t)).collect()
}

/// Nearest valid POVM to a list of Hermitian effect estimates.
pub fn project_povm(effects: &[Operator], tol: f64, max_iter: usize) -> Projected {
    let dim = effects[0].dim();
    let m = effects.len() as f64;
    let affine = |ops: &[Operator]| -> Vec<Operator> {
        let mut total = Operator::zeros(dim);
        for o in ops {
            total += o;
        }
        let shift = (&Operator::identity(dim) - &total).scale(1.0 / m);
        ops.iter().map(|o| o + &shift).collect()
    };
    let (x, iterations) = dykstra(effects.to_vec(), affine, tol, max_iter);
    let uniform = vec![Operator::identity(dim).scale(1.0 / m); effects.len()];
    let operators = polish(x, &uniform);
    Projected {
        correction: total_distance(effects, &operators),
        operators,
        iterations,
    }
}

/// Nearest Choi matrix (input factor first) of a trace-preserving
/// completely positive map.
pub fn project_cptp(choi: &Operator, din: usize, dout: usize, tol: f64, max_iter: usize) -> Projected {
    let eye_out = Operator::identity(dout);
    let affine = |ops: &[Operator]| -> Vec<Operator> {
        let j = &ops[0];
        let tr = j.partial_trace_second(din, dout).expect("dimensions checked by caller");
        let fix = (&Operator::identity(din) - &tr).scale(1.0 / dout as f64);
        vec![j + &fix.kron(&eye_out)]
    };
    let (x, iterations) = dykstra(vec![choi.clone()], affine, tol, max_iter);
    let depolarizing = vec![Operator::identity(din * dout).scale(1.0 / dout as f64)];
    let operators = polish(x, &depolarizing);
    Projected {
        correction: total_distance(std::slice::from_ref(choi), &operators),
        operators,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perturbed(m: usize, noise: f64, seed: u64) -> Vec<Operator> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let povm = crate::povm::PmSimulablePovm::tetrahedral().effects();
        (0..m)
            .map(|i| {
                let e = &povm.effects()[i % 4].scale(4.0 / m as f64);
                let h = random::density_matrix(1, &mut rng).rho().scale(noise);
                &(e + &h) - &Operator::identity(2).scale(noise / 2.0)
            })
            .collect()
    }

    #[test]
    fn valid_povm_is_a_fixed_point() {
        let e = crate::povm::PmSimulablePovm::random_pauli().effects();
        let p = project_povm(e.effects(), PROJECTION_TOLERANCE, PROJECTION_MAX_ITER);
        assert!(p.correction < 1e-12);
    }

    #[test]
    fn clipping_a_single_negative_effect() {
        // {diag(1.1, 0), diag(-0.1, 1)}: nearest POVM is the computational basis
        let e = vec![Operator::diag(&[1.1, 0.0]), Operator::diag(&[-0.1, 1.0])];
        let p = project_povm(&e, 1e-9, PROJECTION_MAX_ITER);
        assert!(p.operators[0].distance(&Operator::diag(&[1.0, 0.0])) < 1e-6);
        assert!(p.operators[1].distance(&Operator::diag(&[0.0, 1.0])) < 1e-6);
    }

    #[test]
    fn valid_choi_is_a_fixed_point() {
        let j = crate::qcore::Channel::unitary(&crate::qcore::cnot()).unwrap().choi();
        let p = project_cptp(&j, 4, 4, PROJECTION_TOLERANCE, PROJECTION_MAX_ITER);
        assert!(p.correction < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn projected_povm_is_valid(seed in any::<u64>(), m in 2usize..7, noise in 0.0f64..0.3) {
            let e = perturbed(m, noise, seed);
            let p = project_povm(&e, PROJECTION_TOLERANCE, PROJECTION_MAX_ITER);
            prop_assert!(crate::povm::Povm::with_tolerance(p.operators.clone(), PROJECTION_TOLERANCE).is_ok());
        }

        #[test]
        fn projected_choi_is_cptp(seed in any::<u64>(), noise in 0.0f64..0.3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ch = random::channel(2, 2, &mut rng);
            let h = random::density_matrix(2, &mut rng).rho().scale(noise);
            let j = &(&ch.choi() + &h) - &Operator::identity(4).scale(noise / 2.0);
            let p = project_cptp(&j, 2, 2, PROJECTION_TOLERANCE, PROJECTION_MAX_ITER);
            let out = &p.operators[0];
            prop_assert!(out.min_eigenvalue() >= -PROJECTION_TOLERANCE);
            let tr = out.partial_trace_second(2, 2).unwrap();
            prop_assert!(tr.distance(&Operator::identity(2)) < 1e-9);
        }
    }
}
