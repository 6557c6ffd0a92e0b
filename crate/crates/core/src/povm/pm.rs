use std::f64::consts::FRAC_1_SQRT_2;

use super::effects::Povm;
use super::hypersphere::{angles_to_distribution, clamp_angle, distribution_to_angles, validate_distribution};
use super::unitary::{angles_from_unitary, unitary_from_angles};
use crate::error::{Error, Result};
use crate::qcore::{Operator, C64};
use crate::tol;

/// A single-qubit POVM realised by randomly choosing one of `K` projective
/// bases, measuring, and classically relabelling the bit into one of `M`
/// outcomes.
///
/// `relabel` row `2k + b` holds `P(m | k, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PmSimulablePovm {
    alphas: Vec<f64>,
    unitary_angles: Vec<[f64; 3]>,
    relabel: Vec<Vec<f64>>,
    unitaries: Vec<Operator>,
}

impl PmSimulablePovm {
    pub fn new(alphas: Vec<f64>, unitary_angles: Vec<[f64; 3]>, relabel: Vec<Vec<f64>>) -> Result<Self> {
        validate_distribution(&alphas)
            .map_err(|e| Error::invalid("basis probabilities", e.to_string()))?;
        let k = alphas.len();
        if unitary_angles.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} unitaries for {k} bases",
                unitary_angles.len()
            )));
        }
        if unitary_angles.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::invalid("unitary angles", "non-finite entry"));
        }
        if relabel.len() != 2 * k {
            return Err(Error::DimensionMismatch(format!(
                "relabel table has {} rows, expected {}",
                relabel.len(),
                2 * k
            )));
        }
        let m = relabel[0].len();
        for (row_idx, row) in relabel.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "relabel row {row_idx} has {} entries, expected {m}",
                    row.len()
                )));
            }
            validate_distribution(row)
                .map_err(|e| Error::invalid("relabel row", format!("row {row_idx}: {e}")))?;
        }
        let unitaries = unitary_angles
            .iter()
            .map(|&[a, b, c]| unitary_from_angles(a, b, c))
            .collect();
        Ok(PmSimulablePovm {
            alphas,
            unitary_angles,
            relabel,
            unitaries,
        })
    }

    /// Like [`Self::new`] but from explicit unitaries, which are stored as
    /// angles (global phases are irrelevant to the effects).
    pub fn from_unitaries(alphas: Vec<f64>, unitaries: &[Operator], relabel: Vec<Vec<f64>>) -> Result<Self> {
        for (k, u) in unitaries.iter().enumerate() {
            if u.dim() != 2 || !u.is_unitary(tol::EXACT) {
                return Err(Error::invalid("basis unitary", format!("U_{k} is not a 2x2 unitary")));
            }
        }
        Self::new(alphas, unitaries.iter().map(angles_from_unitary).collect(), relabel)
    }

    /// Plain computational-basis measurement (`K = 1`, `M = 2`).
    pub fn computational() -> Self {
        Self::new(vec![1.0], vec![[0.0; 3]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).expect("valid")
    }

    /// Uniformly random Z, X or Y basis measurement with six outcomes
    /// `m = 2k + b`.
    pub fn random_pauli() -> Self {
        let h = Operator::from_real_rows(2, &[1.0, 1.0, 1.0, -1.0])
            .expect("2x2")
            .scale(FRAC_1_SQRT_2);
        // rows of U are the measured basis vectors: <b|U = <b_axis|
        let i = C64::new(0.0, 1.0);
        let y = Operator::from_rows(2, &[C64::new(1.0, 0.0), -i, C64::new(1.0, 0.0), i])
            .expect("2x2")
            .scale(FRAC_1_SQRT_2);
        let relabel = (0..6)
            .map(|row| (0..6).map(|m| if m == row { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_unitaries(vec![1.0 / 3.0; 3], &[Operator::identity(2), h, y], relabel).expect("valid")
    }

    /// Four bases aligned with the vertices of a regular tetrahedron.
    /// Outcome `m` is the `b = 0` result of basis `m`, and a `b = 1` result of
    /// basis `k` is spread uniformly over the other three outcomes, giving
    /// `Pi_m = I/4 + n_m.sigma/6`.
    pub fn tetrahedral() -> Self {
        let unitaries: Vec<Operator> = tetrahedron()
            .iter()
            .map(|n| {
                // V|0> = |n>, and U = V^dagger so that U^dagger|0> = |n>
                let theta = n[2].clamp(-1.0, 1.0).acos();
                let phi = n[1].atan2(n[0]);
                unitary_from_angles(theta, 0.0, phi).dagger()
            })
            .collect();
        let mut relabel = Vec::with_capacity(8);
        for k in 0..4 {
            relabel.push((0..4).map(|m| if m == k { 1.0 } else { 0.0 }).collect());
            relabel.push((0..4).map(|m| if m == k { 0.0 } else { 1.0 / 3.0 }).collect());
        }
        Self::from_unitaries(vec![0.25; 4], &unitaries, relabel).expect("valid")
    }

    pub fn num_bases(&self) -> usize {
        self.alphas.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.relabel[0].len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn unitary_angles(&self) -> &[[f64; 3]] {
        &self.unitary_angles
    }

    pub fn unitaries(&self) -> &[Operator] {
        &self.unitaries
    }

    pub fn relabel(&self) -> &[Vec<f64>] {
        &self.relabel
    }

    /// `P(. | k, b)`.
    pub fn relabel_row(&self, k: usize, b: usize) -> &[f64] {
        &self.relabel[2 * k + b]
    }

    /// `U_k^dagger |b><b| U_k`.
    pub fn basis_projector(&self, k: usize, b: usize) -> Operator {
        self.unitaries[k]
            .dagger()
            .conjugate(&Operator::basis_projector(2, b))
    }

    /// `Pi_m = sum_{k,b} P(m|k,b) alpha_k U_k^dagger |b><b| U_k`.
    pub fn effects(&self) -> Povm {
        let mut effects = vec![Operator::zeros(2); self.num_outcomes()];
        for k in 0..self.num_bases() {
            for b in 0..2 {
                let pi = self.basis_projector(k, b);
                for (m, &p) in self.relabel_row(k, b).iter().enumerate() {
                    let w = p * self.alphas[k];
                    if w != 0.0 {
                        effects[m] += &pi.scale(w);
                    }
                }
            }
        }
        Povm::new_unchecked(effects)
    }

    /// Same bases and weights, with outcomes `m2` folded into `m1` (`m1 < m2`
    /// keeps its index, later outcomes shift down by one).
    pub fn merge_outcomes(&self, m1: usize, m2: usize) -> Result<Self> {
        let m = self.num_outcomes();
        if m1 == m2 || m1 >= m || m2 >= m {
            return Err(Error::invalid("outcome merge", format!("{m1} and {m2} of {m}")));
        }
        let (keep, drop) = (m1.min(m2), m1.max(m2));
        let relabel = self
            .relabel
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r[keep] += r[drop];
                r.remove(drop);
                r
            })
            .collect();
        Self::new(self.alphas.clone(), self.unitary_angles.clone(), relabel)
    }
}

fn tetrahedron() -> [[f64; 3]; 4] {
    let s2 = 2f64.sqrt();
    let s23 = (2.0f64 / 3.0).sqrt();
    [
        [0.0, 0.0, 1.0],
        [2.0 * s2 / 3.0, 0.0, -1.0 / 3.0],
        [-s2 / 3.0, s23, -1.0 / 3.0],
        [-s2 / 3.0, -s23, -1.0 / 3.0],
    ]
}

/// Shape of a PM-simulable family: `K` bases and `M` outcomes per qubit.
///
/// Per-qubit parameter layout: `K-1` basis-weight angles, then three angles
/// per unitary, then `M-1` angles for each of the `2K` relabel rows (row
/// order `2k + b`). The distribution encoded by row `r`'s angles is
/// rotated by `r` outcomes, so all-zero angles send row `r` deterministically
/// to outcome `r mod M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PmFamily {
    pub k: usize,
    pub m: usize,
}

impl Default for PmFamily {
    fn default() -> Self {
        PmFamily { k: 4, m: 4 }
    }
}

impl PmFamily {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::invalid("POVM family", format!("K={k}, M={m}")));
        }
        Ok(PmFamily { k, m })
    }

    pub fn num_params(&self) -> usize {
        (self.k - 1) + 3 * self.k + 2 * self.k * (self.m - 1)
    }

    fn unitary_offset(&self) -> usize {
        self.k - 1
    }

    fn relabel_offset(&self) -> usize {
        self.unitary_offset() + 3 * self.k
    }

    /// Whether parameter `idx` is a hypersphere angle confined to `[0, pi/2]`.
    pub fn is_hypersphere_angle(&self, idx: usize) -> bool {
        idx < self.unitary_offset() || idx >= self.relabel_offset()
    }

    /// Clamps every hypersphere angle into its quadrant.
    pub fn clamp(&self, params: &mut [f64]) {
        for (i, p) in params.iter_mut().enumerate() {
            if self.is_hypersphere_angle(i) {
                *p = clamp_angle(*p);
            }
        }
    }

    pub fn povm_from_params(&self, params: &[f64]) -> Result<PmSimulablePovm> {
        if params.len() != self.num_params() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for K={}, M={} (expected {})",
                params.len(),
                self.k,
                self.m,
                self.num_params()
            )));
        }
        let (k, m) = (self.k, self.m);
        let alphas = angles_to_distribution(&params[..k - 1])?;
        let unitary_angles = params[self.unitary_offset()..self.relabel_offset()]
            .chunks(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        let relabel = if m == 1 {
            vec![vec![1.0]; 2 * k]
        } else {
            params[self.relabel_offset()..]
                .chunks(m - 1)
                .enumerate()
                .map(|(row, angles)| {
                    let d = angles_to_distribution(angles)?;
                    Ok((0..m).map(|j| d[(j + m - row % m) % m]).collect())
                })
                .collect::<Result<Vec<_>>>()?
        };
        PmSimulablePovm::new(alphas, unitary_angles, relabel)
    }

    pub fn params_from_povm(&self, povm: &PmSimulablePovm) -> Result<Vec<f64>> {
        if povm.num_bases() != self.k || povm.num_outcomes() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "POVM with K={}, M={} for family K={}, M={}",
                povm.num_bases(),
                povm.num_outcomes(),
                self.k,
                self.m
            )));
        }
        let mut out = distribution_to_angles(&povm.alphas)?;
        out.extend(povm.unitary_angles.iter().flatten());
        let m = self.m;
        for (r, row) in povm.relabel.iter().enumerate() {
            let d: Vec<f64> = (0..m).map(|j| row[(j + r) % m]).collect();
            out.extend(distribution_to_angles(&d)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Pauli, QuantumState};

    fn assert_close(a: &Operator, b: &Operator, tol: f64) {
        assert!(a.distance(b) < tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn computational_effects() {
        let e = PmSimulablePovm::computational().effects();
        assert_close(&e.effects()[0], &Operator::diag(&[1.0, 0.0]), 1e-15);
        assert_close(&e.effects()[1], &Operator::diag(&[0.0, 1.0]), 1e-15);
    }

    #[test]
    fn random_pauli_effects_are_scaled_eigenprojectors() {
        let e = PmSimulablePovm::random_pauli().effects();
        let order = [
            (Pauli::Z, true),
            (Pauli::Z, false),
            (Pauli::X, true),
            (Pauli::X, false),
            (Pauli::Y, true),
            (Pauli::Y, false),
        ];
        for (m, (axis, pos)) in order.into_iter().enumerate() {
            let want = QuantumState::pauli_eigenstate(axis, pos).rho().scale(1.0 / 3.0);
            assert_close(&e.effects()[m], &want, 1e-12);
        }
        assert!(e.is_informationally_complete());
    }

    #[test]
    fn everything_to_outcome_zero() {
        let p = PmSimulablePovm::new(
            vec![0.5, 0.5],
            vec![[0.3, 1.0, -2.0], [1.1, 0.2, 0.4]],
            vec![vec![1.0, 0.0, 0.0]; 4],
        )
        .unwrap();
        let e = p.effects();
        assert_close(&e.effects()[0], &Operator::identity(2), 1e-12);
        assert!(e.effects()[1].frobenius_norm() < 1e-15);
        assert!(e.effects()[2].frobenius_norm() < 1e-15);
    }

    #[test]
    fn tetrahedral_matches_closed_form() {
        let e = PmSimulablePovm::tetrahedral().effects();
        for (m, n) in tetrahedron().iter().enumerate() {
            let mut want = Operator::identity(2).scale(0.25);
            for (c, p) in n.iter().zip([Pauli::X, Pauli::Y, Pauli::Z]) {
                want += &p.matrix().scale(c / 6.0);
            }
            assert_close(&e.effects()[m], &want, 1e-12);
        }
        assert!(e.is_informationally_complete());
    }

    #[test]
    fn invalid_specs_rejected() {
        let ok_rel = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(PmSimulablePovm::new(vec![0.9], vec![[0.0; 3]], ok_rel.clone()).is_err());
        assert!(PmSimulablePovm::new(vec![1.0], vec![], ok_rel.clone()).is_err());
        assert!(PmSimulablePovm::new(vec![1.0], vec![[0.0; 3]], vec![vec![0.5, 0.6], vec![0.0, 1.0]]).is_err());
        assert!(PmSimulablePovm::new(vec![1.0], vec![[0.0; 3]], vec![vec![1.0, 0.0]]).is_err());
        let not_unitary = Operator::diag(&[1.0, 0.5]);
        assert!(PmSimulablePovm::from_unitaries(vec![1.0], &[not_unitary], ok_rel).is_err());
    }

    #[test]
    fn params_roundtrip_and_length_check() {
        let fam = PmFamily::new(1, 2).unwrap();
        assert_eq!(fam.num_params(), 5);
        let p = fam.povm_from_params(&[0.0; 5]).unwrap();
        assert_close(&p.effects().effects()[0], &Operator::diag(&[1.0, 0.0]), 1e-15);
        assert!(fam.povm_from_params(&[0.0; 4]).is_err());

        let fam = PmFamily::new(3, 6).unwrap();
        let rp = PmSimulablePovm::random_pauli();
        let params = fam.params_from_povm(&rp).unwrap();
        let back = fam.povm_from_params(&params).unwrap();
        for (a, b) in back.effects().effects().iter().zip(rp.effects().effects()) {
            assert_close(a, b, 1e-12);
        }
        assert_eq!(PmFamily::default().num_params(), 39);
    }

    #[test]
    fn single_outcome_family() {
        let fam = PmFamily::new(2, 1).unwrap();
        let p = fam.povm_from_params(&vec![0.4; fam.num_params()]).unwrap();
        assert_close(&p.effects().effects()[0], &Operator::identity(2), 1e-12);
    }
}
