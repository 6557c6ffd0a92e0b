//! Probability distributions as squared coordinates of points on the
//! positive quadrant of a unit hypersphere.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::tol;

/// Slack allowed on the `[0, pi/2]` range check for externally supplied angles.
const ANGLE_SLACK: f64 = 1e-12;

/// `K-1` angles in `[0, pi/2]` to a `K`-outcome distribution:
/// `x_0 = cos p0`, `x_i = sin p0 ... sin p(i-1) cos p_i`, `x_(K-1) = prod sin`,
/// `alpha_i = x_i^2`.
pub fn angles_to_distribution(phis: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = phis
        .iter()
        .find(|&&p| !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&p))
    {
        return Err(Error::invalid("hypersphere angle", format!("{bad} outside [0, pi/2]")));
    }
    Ok(coordinates(phis).into_iter().map(|x| x * x).collect())
}

fn coordinates(phis: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phis.len() + 1);
    let mut sin_prod = 1.0;
    for &p in phis {
        let p = clamp_angle(p);
        out.push(sin_prod * p.cos());
        sin_prod *= p.sin();
    }
    out.push(sin_prod);
    out
}

/// Inverse of [`angles_to_distribution`].
pub fn distribution_to_angles(alphas: &[f64]) -> Result<Vec<f64>> {
    validate_distribution(alphas)?;
    let k = alphas.len();
    let mut tail = vec![0.0; k + 1];
    for i in (0..k).rev() {
        tail[i] = tail[i + 1] + alphas[i].max(0.0);
    }
    Ok((0..k - 1)
        .map(|i| tail[i + 1].sqrt().atan2(alphas[i].max(0.0).sqrt()))
        .collect())
}

pub fn validate_distribution(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::Empty("probability distribution"));
    }
    if let Some(bad) = alphas.iter().find(|&&a| !(a >= 0.0)) {
        return Err(Error::invalid("probability distribution", format!("entry {bad}")));
    }
    let total: f64 = alphas.iter().sum();
    if (total - 1.0).abs() > tol::DISTRIBUTION {
        return Err(Error::invalid(
            "probability distribution",
            format!("sums to {total}"),
        ));
    }
    Ok(())
}

/// Hypersphere angles are clamped, not wrapped, to the closed quadrant.
pub fn clamp_angle(p: f64) -> f64 {
    p.clamp(0.0, FRAC_PI_2)
}
