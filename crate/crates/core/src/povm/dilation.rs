use super::effects::Povm;
use super::unitary::unitary_from_angles;
use crate::error::{Error, Result};
use crate::qcore::{cnot, Operator, QuantumState};
use crate::tol;

/// Number of angles parameterising the dilation circuit.
pub const DILATION_PARAMS: usize = 12;

/// A single-qubit POVM obtained by coupling the system to one ancilla with
/// a two-qubit unitary and measuring both in the computational basis.
///
/// The register is `system (x) ancilla`; outcome `i = 2 * s + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationPovm {
    unitary: Operator,
    ancilla: QuantumState,
}

impl DilationPovm {
    pub fn new(unitary: Operator, ancilla: QuantumState) -> Result<Self> {
        if unitary.dim() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "dilation unitary is {0}x{0}, expected 4x4",
                unitary.dim()
            )));
        }
        if !unitary.is_unitary(tol::EXACT) {
            return Err(Error::invalid("dilation unitary", "not unitary"));
        }
        if ancilla.num_qubits() != 1 {
            return Err(Error::DimensionMismatch("ancilla must be one qubit".into()));
        }
        Ok(DilationPovm { unitary, ancilla })
    }

    /// `U = (U_a (x) U_b) . CNOT . (U_c (x) U_d)` with the system as CNOT
    /// control and an ideal `|0>` ancilla. `angles` holds the three angles of
    /// `U_a, U_b, U_c, U_d` in that order.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Ok(DilationPovm {
            unitary: dilation_unitary(angles)?,
            ancilla: QuantumState::basis(1, 0),
        })
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn ancilla(&self) -> &QuantumState {
        &self.ancilla
    }

    pub fn with_ancilla(&self, ancilla: QuantumState) -> Result<Self> {
        Self::new(self.unitary.clone(), ancilla)
    }

    /// `Pi_i = Tr_anc[(I (x) rho_anc) U^dagger |i><i| U]`.
    pub fn effects(&self) -> Povm {
        self.effects_for_readout(&(0..4).map(|i| Operator::basis_projector(4, i)).collect::<Vec<_>>())
    }

    /// Effects when the two-qubit readout is described by `readout` instead
    /// of ideal basis projectors.
    pub fn effects_for_readout(&self, readout: &[Operator]) -> Povm {
        let anc = Operator::identity(2).kron(self.ancilla.rho());
        let effects = readout
            .iter()
            .map(|r| {
                let h = self.unitary.dagger().conjugate(r);
                (&anc * &h)
                    .partial_trace_second(2, 2)
                    .expect("4 = 2 x 2")
                    .hermitian_part()
            })
            .collect();
        Povm::new_unchecked(effects)
    }
}

pub fn dilation_unitary(angles: &[f64]) -> Result<Operator> {
    if angles.len() != DILATION_PARAMS {
        return Err(Error::DimensionMismatch(format!(
            "{} dilation angles, expected {DILATION_PARAMS}",
            angles.len()
        )));
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("dilation angles", "non-finite entry"));
    }
    let u: Vec<Operator> = angles
        .chunks(3)
        .map(|c| unitary_from_angles(c[0], c[1], c[2]))
        .collect();
    let after = u[0].kron(&u[1]);
    let before = u[2].kron(&u[3]);
    Ok(&(&after * &cnot()) * &before)
}

/// Fixed angles giving an informationally complete dilation POVM, used as
/// the default starting point.
pub fn default_dilation_angles() -> [f64; DILATION_PARAMS] {
    [
        1.5, 2.0, 1.0, //
        0.0, 3.0, 2.75, //
        1.25, 0.75, 2.0, //
        2.25, 3.0, 0.75,
    ]
}
