//! Pauli strings, Hamiltonian fixtures and exact ground states.

use povmforge::qcore::{ground_state, Pauli, PauliObservable, QuantumState};

fn main() -> povmforge::Result<()> {
    let x = Pauli::X.matrix();
    let y = Pauli::Y.matrix();
    let z = Pauli::Z.matrix();
    // XY = iZ
    let xy = &x * &y;
    println!("Tr[XY Z]/2 = {}", xy.trace_product(&z) / 2.0);

    let h2 = PauliObservable::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/h2_parity_4q.txt"))?;
    println!("H2 fixture: {} qubits, {} terms", h2.num_qubits(), h2.terms().len());
    for (c, s) in h2.terms().iter().take(4) {
        println!("  {c:+.6} {s}");
    }

    let (e0, psi) = ground_state(&h2)?;
    println!("ground energy {e0:.9} Ha");
    println!("<psi|H|psi> = {:.9}", psi.expectation(&h2.matrix()));
    let mixed = QuantumState::maximally_mixed(4);
    println!("Tr[H]/16   = {:.9}", mixed.expectation(&h2.matrix()));
    Ok(())
}
