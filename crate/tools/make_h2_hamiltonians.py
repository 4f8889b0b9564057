"""Generate 4-qubit H2 (STO-3G) qubit Hamiltonians for the shipped data files.

Electronic integrals come from PySCF (RHF, STO-3G). The fermionic Hamiltonian is
mapped with Jordan-Wigner in blocked spin ordering: qubits 0..k-1 hold the alpha
spin orbitals, qubits k..2k-1 the beta spin orbitals of the same spatial orbitals.
Character i of every Pauli string acts on qubit i. |1> means occupied.

Usage: python3 tools/make_h2_hamiltonians.py data/
"""
import itertools
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, scf

_MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def mul(a, b):
    out = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            phase = 1
            chars = []
            for x, y in zip(sa, sb):
                p, c = _MUL[(x, y)]
                phase *= p
                chars.append(c)
            key = "".join(chars)
            out[key] = out.get(key, 0) + ca * cb * phase
    return out


def add(a, b, scale=1.0):
    out = dict(a)
    for s, c in b.items():
        out[s] = out.get(s, 0) + scale * c
    return out


def ladder(p, n, dagger):
    base = ["Z"] * p + ["I"] * (n - p - 1)
    x = "".join(base[:p]) + "X" + "".join(base[p:])
    y = "".join(base[:p]) + "Y" + "".join(base[p:])
    sign = -0.5j if dagger else 0.5j
    return {x: 0.5, y: sign}


def qubit_hamiltonian(h1, eri, e_nuc):
    k = h1.shape[0]
    n = 2 * k

    def spatial(q):
        return q % k

    def spin(q):
        return q // k

    cre = [ladder(p, n, True) for p in range(n)]
    ann = [ladder(p, n, False) for p in range(n)]
    ham = {"I" * n: e_nuc}
    for p, q in itertools.product(range(n), repeat=2):
        if spin(p) != spin(q):
            continue
        c = h1[spatial(p), spatial(q)]
        if abs(c) > 1e-14:
            ham = add(ham, mul(cre[p], ann[q]), c)
    for p, q, r, s in itertools.product(range(n), repeat=4):
        if spin(p) != spin(q) or spin(r) != spin(s):
            continue
        c = 0.5 * eri[spatial(p), spatial(q), spatial(r), spatial(s)]
        if abs(c) > 1e-14:
            term = mul(mul(cre[p], cre[r]), mul(ann[s], ann[q]))
            ham = add(ham, term, c)
    clean = {}
    for s, c in ham.items():
        assert abs(c.imag) < 1e-12, (s, c)
        if abs(c.real) > 1e-12:
            clean[s] = c.real
    return clean


def dense(ham, n):
    mats = {
        "I": np.eye(2),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1.0, -1.0]),
    }
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for s, c in ham.items():
        # qubit 0 is the least significant bit, so it is the rightmost kron factor
        m = np.array([[1.0]])
        for ch in reversed(s):
            m = np.kron(m, mats[ch])
        out += c * m
    return out


def main(outdir):
    for bond in [0.5, 0.75, 1.0, 1.5, 2.0]:
        mol = gto.M(atom=f"H 0 0 0; H 0 0 {bond}", basis="sto-3g", unit="Angstrom", verbose=0)
        mf = scf.RHF(mol).run()
        c = mf.mo_coeff
        h1 = c.T @ mf.get_hcore() @ c
        eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
        e_fci = fci.FCI(mf).kernel()[0]
        ham = qubit_hamiltonian(h1, eri, mol.energy_nuc())
        ground = np.linalg.eigvalsh(dense(ham, 4))[0]
        assert abs(ground - e_fci) < 1e-8, (ground, e_fci)
        path = f"{outdir}/h2_sto3g_{bond:.2f}.txt"
        with open(path, "w") as f:
            f.write(f"# H2 STO-3G, bond length {bond:.2f} Angstrom, RHF orbitals (PySCF)\n")
            f.write("# Jordan-Wigner, blocked spin ordering: qubits 0,1 alpha; 2,3 beta\n")
            f.write("# character i acts on qubit i; Hartree-Fock reference 1010\n")
            f.write(f"# RHF energy {mf.e_tot:.12f} Ha, FCI energy {e_fci:.12f} Ha\n")
            for s in sorted(ham, key=lambda t: (sum(ch != 'I' for ch in t), t)):
                f.write(f"{ham[s]: .15f} {s}\n")
        print(path, len(ham), "terms, E_fci =", e_fci, "E_hf =", mf.e_tot)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
