"""Spin-s operators on qubits and what they cost.

Walks through the single-site encodings (standard binary and Gray code),
checks the spin algebra on the encoded operators, then counts Hamiltonian
terms and Trotter CNOTs for the two-site chain at each spin.

    python demos/encodings_and_costs.py
"""

from fractions import Fraction

import numpy as np

from highspin2dcs.encoding import code_map, encoded_spin, physical_projector, qubits_per_site
from highspin2dcs.model import ModelSpec
from highspin2dcs.pauli import to_dense


def show_site(s, enc):
    ops = encoded_spin(s, enc)
    print(f"\nspin {s}, {enc} encoding, {qubits_per_site(s)} qubits per site")
    print("  levels ->", code_map(enc, int(2 * Fraction(s) + 1)))
    for comp in "xyz":
        terms = ", ".join(f"{complex(t.coefficient).real:+.4f}{complex(t.coefficient).imag:+.4f}j {t.string.text()}" for t in ops[comp].terms[:4])
        more = len(ops[comp]) - 4
        print(f"  S{comp}: {len(ops[comp])} strings  {terms}{' ...' if more > 0 else ''}")
    x, y, z = (to_dense(ops[c]) for c in "xyz")
    sv = float(Fraction(s))
    P = np.diag(physical_projector(s, enc))
    print(f"  |[Sx,Sy] - iSz| = {np.linalg.norm(x @ y - y @ x - 1j * z):.1e}", end="")
    print(f"   |S^2 - s(s+1)P| = {np.linalg.norm(x @ x + y @ y + z @ z - sv * (sv + 1) * P):.1e}")


def main():
    show_site("1", "gray")
    show_site("5/2", "std")
    show_site("5/2", "gray")

    print("\ntwo-site chain, J=1, D=0.2: Hamiltonian size and first-order Trotter cost")
    print(f"  {'s':>4} {'enc':>5} {'qubits':>6} {'H0 terms':>9} {'+Zeeman':>8} {'CNOT/step':>10}")
    for s in ("1/2", "1", "3/2", "2", "5/2"):
        for enc in ("std", "gray"):
            spec = ModelSpec(s=Fraction(s), D=0.2, encoding=enc)
            ops = spec.operators
            full = ops.full(1.0)
            print(f"  {s:>4} {enc:>5} {spec.n_qubits:>6} {len(ops.H0):>9} {len(full):>8} {full.trotter_cnots():>10}")
    # 10^4 steps of 0.005 reach tJ = 50
    per_step = ModelSpec(s=1, D=0.2).operators.full(1.0).trotter_cnots()
    print(f"\nTrotter to tJ=50 at dt=0.005 for s=1 Gray: {per_step * 10_000:,} CNOTs")


if __name__ == "__main__":
    main()
