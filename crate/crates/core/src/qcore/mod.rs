//! Dense complex linear algebra and the core quantum objects.

mod basis;
mod channel;
pub mod local;
mod operator;
mod pauli;
pub mod random;
mod spectrum;
mod state;

pub use basis::OperatorBasis;
pub use channel::{compose, Channel};
pub use operator::{sum, tensor, Operator, C64};
pub use pauli::{pauli_matrix, Pauli, PauliObservable, PauliString};
pub use spectrum::{ground_state, MAX_DENSE_QUBITS};
pub use state::{QuantumState, StateFile};

/// Two-qubit CNOT with the first factor as control.
pub fn cnot() -> Operator {
    Operator::from_real_rows(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
    .expect("4x4")
}

pub fn swap() -> Operator {
    Operator::from_real_rows(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
    .expect("4x4")
}
