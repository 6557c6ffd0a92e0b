use crate::error::{Error, Result};
use crate::noise::{dilation_readout, NoiseModel};
use crate::povm::{unitary_from_angles, PovmFamily, Povm, DILATION_PARAMS};
use crate::qcore::{cnot, compose, Channel, Operator, OperatorBasis, QuantumState};
use crate::tol;
use crate::tomography::{run_ancilla_qst, run_native_qdt, run_qpt, ShotMode};

/// Classical model of one qubit's noisy detector: native readout effects
/// (from detector tomography), the channel following every single-qubit
/// gate, the CNOT channel (from process tomography) and the ancilla state
/// (from state tomography). The last two are only used by the dilation
/// family.
#[derive(Clone, Debug)]
pub struct DetectorModel {
    family: PovmFamily,
    native: Povm,
    single_qubit_noise: Channel,
    cnot: Channel,
    ancilla: QuantumState,
    basis: OperatorBasis,
}

impl DetectorModel {
    /// `native` has 2 effects on one qubit for the PM family and 4 effects on
    /// `system (x) ancilla` for the dilation family.
    pub fn new(
        family: PovmFamily,
        native: Povm,
        single_qubit_noise: Channel,
        cnot: Channel,
        ancilla: QuantumState,
    ) -> Result<Self> {
        let (dim, len) = match family {
            PovmFamily::Pm(_) => (2, 2),
            PovmFamily::Dilation => (4, 4),
        };
        if native.dim() != dim || native.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "native measurement with {} effects of dimension {}, expected {len} of dimension {dim}",
                native.len(),
                native.dim()
            )));
        }
        if single_qubit_noise.input_dim() != 2 || single_qubit_noise.output_dim() != 2 {
            return Err(Error::DimensionMismatch("single-qubit gate channel must act on one qubit".into()));
        }
        if cnot.input_dim() != 4 || cnot.output_dim() != 4 {
            return Err(Error::DimensionMismatch("CNOT channel must act on two qubits".into()));
        }
        for ch in [&single_qubit_noise, &cnot] {
            if !ch.is_trace_preserving(tol::EXACT) {
                return Err(Error::invalid("detector model", "gate channel is not trace preserving"));
            }
        }
        if ancilla.num_qubits() != 1 {
            return Err(Error::invalid("detector model", "ancilla state must be single-qubit"));
        }
        Ok(DetectorModel {
            family,
            native,
            single_qubit_noise,
            cnot,
            ancilla,
            basis: OperatorBasis::normalized_pauli(1),
        })
    }

    /// Noiseless detector: model effects equal the ideal ones.
    pub fn ideal(family: PovmFamily) -> Self {
        let native = match family {
            PovmFamily::Pm(_) => (0..2).map(|b| Operator::basis_projector(2, b)).collect(),
            PovmFamily::Dilation => (0..4).map(|b| Operator::basis_projector(4, b)).collect(),
        };
        Self::new(
            family,
            Povm::new(native).expect("projectors"),
            Channel::identity(2),
            Channel::unitary(&cnot()).expect("unitary"),
            QuantumState::basis(1, 0),
        )
        .expect("consistent shapes")
    }

    /// The model built from the exact ground-truth components of `noise` for
    /// register qubit `qubit`.
    pub fn from_noise(family: PovmFamily, noise: &NoiseModel, qubit: usize) -> Result<Self> {
        let native = match family {
            PovmFamily::Pm(_) => noise.readout(qubit)?.to_vec(),
            PovmFamily::Dilation => dilation_readout(noise, qubit)?,
        };
        Self::new(
            family,
            Povm::new(native)?,
            noise.single_qubit_noise().clone(),
            noise.noisy_two(&cnot())?,
            noise.ancilla_state(),
        )
    }

    /// The model a lab would build: native readout by detector tomography,
    /// CNOT by process tomography and the ancilla by state tomography, each
    /// with `mode` shots per input; single-qubit gates use the parametric
    /// channel of `noise`.
    pub fn characterise(
        family: PovmFamily,
        noise: &NoiseModel,
        qubit: usize,
        mode: ShotMode,
        seed: u64,
    ) -> Result<Self> {
        use crate::sampler::derive_seed;
        match family {
            PovmFamily::Pm(_) => Self::new(
                family,
                run_native_qdt(noise, 1, qubit, mode, derive_seed(seed, 1, qubit as u64))?,
                noise.single_qubit_noise().clone(),
                Channel::unitary(&cnot())?,
                QuantumState::basis(1, 0),
            ),
            PovmFamily::Dilation => Self::new(
                family,
                run_native_qdt(noise, 2, qubit, mode, derive_seed(seed, 1, qubit as u64))?,
                noise.single_qubit_noise().clone(),
                run_qpt(&noise.noisy_two(&cnot())?, mode, derive_seed(seed, 2, qubit as u64))?,
                run_ancilla_qst(noise, mode, derive_seed(seed, 3, qubit as u64))?,
            ),
        }
    }

    pub fn family(&self) -> PovmFamily {
        self.family
    }

    pub fn native(&self) -> &Povm {
        &self.native
    }

    pub fn single_qubit_noise(&self) -> &Channel {
        &self.single_qubit_noise
    }

    pub fn cnot(&self) -> &Channel {
        &self.cnot
    }

    pub fn ancilla(&self) -> &QuantumState {
        &self.ancilla
    }

    fn noisy_gate(&self, u: &Operator) -> Result<Channel> {
        compose(&[Channel::unitary(u)?, self.single_qubit_noise.clone()])
    }

    /// Channel `E_x` on `system (x) ancilla` of the dilation circuit.
    pub fn dilation_channel(&self, params: &[f64]) -> Result<Channel> {
        if params.len() != DILATION_PARAMS {
            return Err(Error::DimensionMismatch(format!("{} dilation angles", params.len())));
        }
        let g: Vec<Channel> = params
            .chunks(3)
            .map(|c| self.noisy_gate(&unitary_from_angles(c[0], c[1], c[2])))
            .collect::<Result<_>>()?;
        compose(&[g[2].tensor(&g[3]), self.cnot.clone(), g[0].tensor(&g[1])])
    }

    /// `Pi_model,i(x) = sum_a Tr[E_x(B_a (x) rho_anc) M_i] B_a`. In the PM
    /// family each basis `k` contributes its own channel and the outcomes
    /// are relabelled with the family's conditional distributions.
    pub fn model_effects(&self, params: &[f64]) -> Result<Povm> {
        let basis = self.basis.elements();
        let effects = match self.family {
            PovmFamily::Pm(f) => {
                let spec = f.povm_from_params(params)?;
                let mut effects = vec![Operator::zeros(2); spec.num_outcomes()];
                for (k, u) in spec.unitaries().iter().enumerate() {
                    let channel = self.noisy_gate(u)?;
                    let images: Vec<Operator> = basis.iter().map(|b| channel.apply(b)).collect::<Result<_>>()?;
                    for (b, m_b) in self.native.effects().iter().enumerate() {
                        let mut pi = Operator::zeros(2);
                        for (img, ba) in images.iter().zip(basis) {
                            pi += &ba.scale(img.trace_product(m_b).re);
                        }
                        for (m, &p) in spec.relabel_row(k, b).iter().enumerate() {
                            let w = p * spec.alphas()[k];
                            if w != 0.0 {
                                effects[m] += &pi.scale(w);
                            }
                        }
                    }
                }
                effects
            }
            PovmFamily::Dilation => {
                let channel = self.dilation_channel(params)?;
                let images: Vec<Operator> = basis
                    .iter()
                    .map(|b| channel.apply(&b.kron(self.ancilla.rho())))
                    .collect::<Result<_>>()?;
                self.native
                    .effects()
                    .iter()
                    .map(|m_i| {
                        let mut pi = Operator::zeros(2);
                        for (img, ba) in images.iter().zip(basis) {
                            pi += &ba.scale(img.trace_product(m_i).re);
                        }
                        pi
                    })
                    .collect()
            }
        };
        Povm::new(effects)
    }

    /// Outcome probabilities predicted for `rho` straight from the model's
    /// components, without forming effects.
    pub fn predicted_probabilities(&self, params: &[f64], rho: &QuantumState) -> Result<Vec<f64>> {
        match self.family {
            PovmFamily::Pm(f) => {
                let spec = f.povm_from_params(params)?;
                let mut p = vec![0.0; spec.num_outcomes()];
                for (k, u) in spec.unitaries().iter().enumerate() {
                    let out = self.noisy_gate(u)?.apply(rho.rho())?;
                    for (b, m_b) in self.native.effects().iter().enumerate() {
                        let pb = out.trace_product(m_b).re;
                        for (m, &r) in spec.relabel_row(k, b).iter().enumerate() {
                            p[m] += spec.alphas()[k] * r * pb;
                        }
                    }
                }
                Ok(p)
            }
            PovmFamily::Dilation => {
                let out = self.dilation_channel(params)?.apply(&rho.rho().kron(self.ancilla.rho()))?;
                Ok(self.native.effects().iter().map(|m| out.trace_product(m).re).collect())
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::noise::{real_effects_dilation, real_effects_pm, NoiseConfig};
    use crate::povm::PmFamily;
    use crate::qcore::random;
    use crate::tomography::max_effect_error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_params(family: PovmFamily, rng: &mut impl Rng) -> Vec<f64> {
        match family {
            PovmFamily::Pm(f) => (0..f.num_params())
                .map(|i| {
                    if f.is_hypersphere_angle(i) {
                        rng.random_range(0.0..std::f64::consts::FRAC_PI_2)
                    } else {
                        rng.random_range(0.0..std::f64::consts::TAU)
                    }
                })
                .collect(),
            PovmFamily::Dilation => (0..DILATION_PARAMS).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect(),
        }
    }

    pub(crate) fn random_model(family: PovmFamily, rng: &mut impl Rng) -> DetectorModel {
        let d = if family == PovmFamily::Dilation { 4 } else { 2 };
        // random native POVM: conjugate a random channel's Heisenberg image of the projectors
        let ch = random::channel(d, 2, rng);
        let native = (0..d)
            .map(|b| ch.apply_adjoint(&Operator::basis_projector(d, b)).unwrap().hermitian_part())
            .collect();
        DetectorModel::new(
            family,
            Povm::new(native).unwrap(),
            random::channel(2, 3, rng),
            random::channel(4, 2, rng),
            random::density_matrix(1, rng),
        )
        .unwrap()
    }

    #[test]
    fn ideal_pm_model_matches_ideal_effects() {
        let family = PovmFamily::Pm(PmFamily::default());
        let model = DetectorModel::ideal(family);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = random_params(family, &mut rng);
            let a = model.model_effects(&x).unwrap();
            let b = family.effects(&x).unwrap();
            assert!(max_effect_error(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn ideal_dilation_model_matches_ideal_effects() {
        let model = DetectorModel::ideal(PovmFamily::Dilation);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_params(PovmFamily::Dilation, &mut rng);
        let a = model.model_effects(&x).unwrap();
        let b = PovmFamily::Dilation.effects(&x).unwrap();
        assert!(max_effect_error(&a, &b) < 1e-12);
    }

    #[test]
    fn ground_truth_model_matches_real_effects() {
        let noise = NoiseConfig::default().to_model().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let family = PovmFamily::Pm(PmFamily::default());
        let x = random_params(family, &mut rng);
        let model = DetectorModel::from_noise(family, &noise, 0).unwrap();
        let spec = PmFamily::default().povm_from_params(&x).unwrap();
        let truth = real_effects_pm(&spec, &noise, 0).unwrap();
        assert!(max_effect_error(&model.model_effects(&x).unwrap(), &truth) < 1e-12);

        let x = random_params(PovmFamily::Dilation, &mut rng);
        let model = DetectorModel::from_noise(PovmFamily::Dilation, &noise, 0).unwrap();
        let truth = real_effects_dilation(&x, &noise, 0).unwrap();
        assert!(max_effect_error(&model.model_effects(&x).unwrap(), &truth) < 1e-12);
    }

    #[test]
    fn fully_depolarizing_gates_give_flat_effects() {
        let family = PovmFamily::Pm(PmFamily::default());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_model(family, &mut rng);
        let model = DetectorModel::new(
            family,
            m.native().clone(),
            Channel::depolarizing(1, 1.0).unwrap(),
            m.cnot().clone(),
            m.ancilla().clone(),
        )
        .unwrap();
        let x = random_params(family, &mut rng);
        let spec = PmFamily::default().povm_from_params(&x).unwrap();
        let effects = model.model_effects(&x).unwrap();
        for (mi, e) in effects.effects().iter().enumerate() {
            // each native effect contributes Tr[M_b]/2 * I, relabelled
            let mut w = 0.0;
            for k in 0..spec.num_bases() {
                for (b, mb) in model.native().effects().iter().enumerate() {
                    w += spec.alphas()[k] * spec.relabel_row(k, b)[mi] * mb.trace().re / 2.0;
                }
            }
            assert!(e.distance(&Operator::identity(2).scale(w)) < 1e-12);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_model(PovmFamily::Dilation, &mut rng);
        let model = DetectorModel::new(
            PovmFamily::Dilation,
            m.native().clone(),
            Channel::identity(2),
            Channel::depolarizing(2, 1.0).unwrap(),
            m.ancilla().clone(),
        )
        .unwrap();
        // the final single-qubit layer maps I/4 to I/4, so nothing survives
        let x = random_params(PovmFamily::Dilation, &mut rng);
        for (e, mi) in model.model_effects(&x).unwrap().effects().iter().zip(m.native().effects()) {
            assert!(e.distance(&Operator::identity(2).scale(mi.trace().re / 4.0)) < 1e-12);
        }
    }

    #[test]
    fn model_effects_reproduce_channel_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for family in [PovmFamily::Pm(PmFamily::default()), PovmFamily::Dilation] {
            for _ in 0..5 {
                let model = random_model(family, &mut rng);
                let x = random_params(family, &mut rng);
                let effects = model.model_effects(&x).unwrap();
                for _ in 0..100 {
                    let rho = random::density_matrix(1, &mut rng);
                    let direct = model.predicted_probabilities(&x, &rho).unwrap();
                    for (e, p) in effects.effects().iter().zip(direct) {
                        assert!((rho.expectation(e) - p).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn characterised_dilation_model_close_to_truth() {
        let noise = NoiseConfig::default().to_model().unwrap();
        let model = DetectorModel::characterise(PovmFamily::Dilation, &noise, 0, ShotMode::Shots(250_000), 9).unwrap();
        let x = PovmFamily::Dilation.initial_params();
        let truth = real_effects_dilation(&x, &noise, 0).unwrap();
        let err = max_effect_error(&model.model_effects(&x).unwrap(), &truth);
        assert!(err < 0.02, "error {err}");
    }
}
