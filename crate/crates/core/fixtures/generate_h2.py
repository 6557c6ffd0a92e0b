"""Regenerates the H2 Hamiltonian fixtures in this directory.

Requires pyscf and openfermion. Integrals are computed with RHF at the given
bond length, mapped to qubits, and written one Pauli term per line.
"""
import sys

import numpy as np
import openfermion as of
from pyscf import ao2mo, gto, scf, fci

BOND = 0.75


def molecular_hamiltonian(basis):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {BOND}", basis=basis, unit="Angstrom")
    mf = scf.RHF(mol).run(verbose=0)
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    n = h1.shape[0]
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), n)
    # chemist (pq|rs) -> openfermion physicist ordering <pq|sr> convention
    two = np.asarray(eri.transpose(0, 2, 3, 1), order="C")
    one_so, two_so = of.chem.molecular_data.spinorb_from_spatial(h1, two)
    op = of.InteractionOperator(mol.energy_nuc(), one_so, 0.5 * two_so)
    e_fci = fci.FCI(mf).kernel()[0]
    return of.get_fermion_operator(op), 2 * n, e_fci


def write(path, qop, n_qubits, comment):
    qop.compress(1e-12)
    lines = [f"# {comment}"]
    for term, coeff in sorted(qop.terms.items(), key=lambda t: (len(t[0]), t[0])):
        word = ["I"] * n_qubits
        for q, p in term:
            word[q] = p
        lines.append(f"{coeff.real:.16e} {''.join(word)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def main():
    ferm, modes, e_fci = molecular_hamiltonian("sto-3g")
    write("h2_parity_4q.txt", of.binary_code_transform(ferm, of.parity_code(modes)), modes,
          f"H2 STO-3G {BOND} A, parity mapping, FCI energy {e_fci:.12f} Ha")
    write("h2_bk_4q.txt", of.bravyi_kitaev(ferm), modes,
          f"H2 STO-3G {BOND} A, Bravyi-Kitaev mapping, FCI energy {e_fci:.12f} Ha")
    ferm, modes, e_fci = molecular_hamiltonian("6-31g")
    reduced = of.symmetry_conserving_bravyi_kitaev(ferm, modes, 2)
    write("h2_scbk_6q.txt", reduced, modes - 2,
          f"H2 6-31G {BOND} A, symmetry-conserving Bravyi-Kitaev, FCI energy {e_fci:.12f} Ha")


if __name__ == "__main__":
    sys.exit(main())
