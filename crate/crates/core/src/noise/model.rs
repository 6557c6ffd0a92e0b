use crate::error::{Error, Result};
use crate::qcore::{Channel, Operator, QuantumState};
use crate::tol;

/// Native two-outcome readout `{M_0, M_1}` of one qubit.
pub type ReadoutPair = [Operator; 2];

/// `M_0 = (1 - p10)|0><0| + p01|1><1|`, `M_1 = I - M_0`, where `p10` is the
/// probability of reading 1 from `|0>` and `p01` of reading 0 from `|1>`.
pub fn confusion_readout(p10: f64, p01: f64) -> Result<ReadoutPair> {
    for (name, p) in [("p10", p10), ("p01", p01)] {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::invalid("readout flip probability", format!("{name} = {p} outside [0, 1)")));
        }
    }
    let m0 = Operator::diag(&[1.0 - p10, p01]);
    let m1 = Operator::diag(&[p10, 1.0 - p01]);
    Ok([m0, m1])
}

/// Amplitude damping towards `|1>` with probability `gamma`. Ordinary
/// damping leaves the `|0>` ancilla untouched, so the perturbation of a
/// freshly reset ancilla is modelled as decay into the other level:
/// `|0><0| -> (1 - gamma)|0><0| + gamma|1><1|`.
pub fn ancilla_relaxation(gamma: f64) -> Result<Channel> {
    let x = crate::qcore::Pauli::X.matrix();
    let ad = Channel::amplitude_damping(gamma)?;
    let kraus = ad.kraus().iter().map(|k| (&(&x * k) * &x).into_matrix()).collect();
    Channel::new(2, 2, kraus)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Readout {
    /// Same pair on every qubit.
    Global(ReadoutPair),
    PerQubit(Vec<ReadoutPair>),
}

/// Ground-truth model of a faulty detector: readout effects, channels after
/// every single-qubit unitary and every CNOT, and a channel applied to the
/// ancilla's `|0><0|` before it interacts with the system.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    readout: Readout,
    single_qubit: Channel,
    two_qubit: Channel,
    ancilla: Channel,
}

impl NoiseModel {
    pub fn new(readout: Readout, single_qubit: Channel, two_qubit: Channel, ancilla: Channel) -> Result<Self> {
        let pairs: &[ReadoutPair] = match &readout {
            Readout::Global(p) => std::slice::from_ref(p),
            Readout::PerQubit(ps) => ps,
        };
        for (q, pair) in pairs.iter().enumerate() {
            crate::povm::Povm::new(pair.to_vec())
                .map_err(|e| Error::invalid("readout effects", format!("qubit {q}: {e}")))?;
            if pair[0].dim() != 2 {
                return Err(Error::DimensionMismatch(format!("readout on qubit {q} is not single-qubit")));
            }
        }
        for (name, ch, dim) in [
            ("single-qubit gate noise", &single_qubit, 2),
            ("two-qubit gate noise", &two_qubit, 4),
            ("ancilla perturbation", &ancilla, 2),
        ] {
            if ch.input_dim() != dim || ch.output_dim() != dim {
                return Err(Error::DimensionMismatch(format!("{name} must act on dimension {dim}")));
            }
            if !ch.is_trace_preserving(tol::EXACT) {
                return Err(Error::invalid("noise channel", format!("{name} is not trace preserving")));
            }
        }
        Ok(NoiseModel {
            readout,
            single_qubit,
            two_qubit,
            ancilla,
        })
    }

    /// No noise anywhere.
    pub fn ideal() -> Self {
        Self::parametric(0.0, 0.0, 0.0, 0.0, 0.0).expect("zero rates are valid")
    }

    /// Confusion readout, depolarising gate noise and a faulty ancilla reset
    /// (see [`ancilla_relaxation`]), identical on every qubit.
    pub fn parametric(p10: f64, p01: f64, depol_1q: f64, depol_2q: f64, ancilla_damping: f64) -> Result<Self> {
        Self::new(
            Readout::Global(confusion_readout(p10, p01)?),
            Channel::depolarizing(1, depol_1q)?,
            Channel::depolarizing(2, depol_2q)?,
            ancilla_relaxation(ancilla_damping)?,
        )
    }

    pub fn readout(&self, qubit: usize) -> Result<&ReadoutPair> {
        match &self.readout {
            Readout::Global(p) => Ok(p),
            Readout::PerQubit(ps) => ps
                .get(qubit)
                .ok_or_else(|| Error::MissingNoise(format!("readout of qubit {qubit}"))),
        }
    }

    /// Number of qubits with readout entries, `None` when global.
    pub fn readout_qubits(&self) -> Option<usize> {
        match &self.readout {
            Readout::Global(_) => None,
            Readout::PerQubit(ps) => Some(ps.len()),
        }
    }

    /// Fails unless every qubit of an `n`-qubit register has a readout entry.
    pub fn check_covers(&self, n: usize) -> Result<()> {
        match self.readout_qubits() {
            Some(k) if k < n => Err(Error::MissingNoise(format!("readout of qubit {k} (register has {n})"))),
            _ => Ok(()),
        }
    }

    pub fn single_qubit_noise(&self) -> &Channel {
        &self.single_qubit
    }

    pub fn two_qubit_noise(&self) -> &Channel {
        &self.two_qubit
    }

    pub fn ancilla_channel(&self) -> &Channel {
        &self.ancilla
    }

    /// Ancilla state after perturbation of `|0><0|`.
    pub fn ancilla_state(&self) -> QuantumState {
        let rho = self
            .ancilla
            .apply(QuantumState::basis(1, 0).rho())
            .expect("single-qubit channel");
        QuantumState::with_tolerance(rho, tol::TOMOGRAPHY).expect("channel output is a state")
    }

    /// Ideal single-qubit unitary followed by the single-qubit noise.
    pub fn noisy_single(&self, u: &Operator) -> Result<Channel> {
        Channel::unitary(u)?.then(&self.single_qubit)
    }

    /// Ideal two-qubit unitary followed by the two-qubit noise.
    pub fn noisy_two(&self, u: &Operator) -> Result<Channel> {
        Channel::unitary(u)?.then(&self.two_qubit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_examples() {
        let [m0, m1] = confusion_readout(0.0, 0.0).unwrap();
        assert_eq!(m0, Operator::diag(&[1.0, 0.0]));
        assert_eq!(m1, Operator::diag(&[0.0, 1.0]));
        let [m0, m1] = confusion_readout(0.1, 0.0).unwrap();
        assert!(m0.distance(&Operator::diag(&[0.9, 0.0])) < 1e-15);
        assert!(m1.distance(&Operator::diag(&[0.1, 1.0])) < 1e-15);
        let [_, m1] = confusion_readout(0.02, 0.03).unwrap();
        assert!((QuantumState::basis(1, 0).expectation(&m1) - 0.02).abs() < 1e-15);
        assert!(confusion_readout(1.0, 0.0).is_err());
        assert!(confusion_readout(0.0, -0.1).is_err());
    }

    #[test]
    fn per_qubit_coverage() {
        let pair = confusion_readout(0.01, 0.02).unwrap();
        let m = NoiseModel::new(
            Readout::PerQubit(vec![pair.clone(), pair]),
            Channel::identity(2),
            Channel::identity(4),
            Channel::identity(2),
        )
        .unwrap();
        assert!(m.readout(1).is_ok());
        assert!(matches!(m.readout(2), Err(Error::MissingNoise(_))));
        assert!(m.check_covers(2).is_ok());
        assert!(matches!(m.check_covers(3), Err(Error::MissingNoise(_))));
    }

    #[test]
    fn rejects_bad_channels() {
        let pair = confusion_readout(0.0, 0.0).unwrap();
        assert!(NoiseModel::new(Readout::Global(pair.clone()), Channel::identity(4), Channel::identity(4), Channel::identity(2)).is_err());
        let bad = [Operator::diag(&[1.0, 0.0]), Operator::diag(&[0.5, 1.0])];
        assert!(NoiseModel::new(Readout::Global(bad), Channel::identity(2), Channel::identity(4), Channel::identity(2)).is_err());
    }

    #[test]
    fn relaxed_ancilla() {
        let m = NoiseModel::parametric(0.0, 0.0, 0.0, 0.0, 0.3).unwrap();
        assert!(m.ancilla_state().rho().distance(&Operator::diag(&[0.7, 0.3])) < 1e-15);
        assert_eq!(NoiseModel::ideal().ancilla_state(), QuantumState::basis(1, 0));
    }
}
