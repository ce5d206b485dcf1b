"""Spin-s operators in the level basis and their multi-qubit encodings."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .pauli import PauliOperatorSum, PauliString, PauliTerm

__all__ = [
    "Encoding",
    "SpinLevelOperator",
    "as_spin",
    "spin_matrices",
    "qubits_per_site",
    "code_map",
    "encode_operator",
    "encoded_spin",
    "physical_projector",
]


class Encoding(str, enum.Enum):
    STANDARD = "std"
    GRAY = "gray"

    @classmethod
    def parse(cls, value) -> "Encoding":
        if isinstance(value, Encoding):
            return value
        v = str(value).lower()
        if v in ("std", "standard", "binary", "standardbinary"):
            return cls.STANDARD
        if v in ("gray", "graycode"):
            return cls.GRAY
        raise ValueError(f"unknown encoding {value!r}")


def as_spin(s) -> Fraction:
    """Validate a spin magnitude; accepts ``1.5``, ``"3/2"`` or ``Fraction(3, 2)``."""
    f = Fraction(s).limit_denominator(1000) if not isinstance(s, str) else Fraction(s)
    if f <= 0 or (2 * f).denominator != 1:
        raise ValueError(f"spin must be a positive half-integer, got {s!r}")
    return f


@dataclass(frozen=True)
class SpinLevelOperator:
    """A ``d x d`` operator in the spin-level basis ``|l>``, ``l = 0..d-1``."""

    s: Fraction
    component: str
    entries: np.ndarray

    @property
    def d(self) -> int:
        return int(2 * self.s + 1)


def spin_matrices(s) -> dict[str, SpinLevelOperator]:
    """``S^x``, ``S^y``, ``S^z`` with ``S^z |l> = (s - l)|l>``."""
    s = as_spin(s)
    d = int(2 * s + 1)
    sf = float(s)
    sx = np.zeros((d, d), dtype=complex)
    sy = np.zeros((d, d), dtype=complex)
    sz = np.diag([sf - l for l in range(d)]).astype(complex)
    for l in range(d):
        for lp in range(d):
            if abs(l - lp) != 1:
                continue
            amp = math.sqrt((sf + 1) * (l + lp + 1) - (l + 1) * (lp + 1))
            sx[l, lp] = 0.5 * amp
            # (delta_{l,l'+1} - delta_{l+1,l'}) * i/2
            sy[l, lp] = 0.5j * amp * (1 if l == lp + 1 else -1)
    return {
        "x": SpinLevelOperator(s, "x", sx),
        "y": SpinLevelOperator(s, "y", sy),
        "z": SpinLevelOperator(s, "z", sz),
    }


def qubits_per_site(s) -> int:
    d = int(2 * as_spin(s) + 1)
    return max(1, math.ceil(math.log2(d)))


def code_map(encoding, d: int) -> dict[int, str]:
    """Level -> bitstring ``x_{n-1} ... x_0``."""
    encoding = Encoding.parse(encoding)
    if d < 2:
        raise ValueError("need at least two levels")
    n = max(1, math.ceil(math.log2(d)))
    out = {}
    for l in range(d):
        code = l if encoding is Encoding.STANDARD else l ^ (l >> 1)
        out[l] = format(code, f"0{n}b")
    return out


def _codes(encoding, d: int) -> list[int]:
    return [int(b, 2) for b in code_map(encoding, d).values()]


# |x><x'| on one qubit as (coefficient, label) pairs
_OUTER = {
    (0, 0): ((0.5, "I"), (0.5, "Z")),
    (1, 1): ((0.5, "I"), (-0.5, "Z")),
    (0, 1): ((0.5, "X"), (0.5j, "Y")),
    (1, 0): ((0.5, "X"), (-0.5j, "Y")),
}


def _outer_product(n: int, ket: int, bra: int) -> list[tuple[complex, str]]:
    terms = [(1.0 + 0j, "")]
    for q in range(n):
        pair = _OUTER[(ket >> q) & 1, (bra >> q) & 1]
        terms = [(c * c1, lab + p) for c, lab in terms for c1, p in pair]
    return terms


def encode_operator(op: SpinLevelOperator | np.ndarray, encoding, site: int = 0, total_sites: int = 1) -> PauliOperatorSum:
    """Map a level-basis operator on ``site`` to a Pauli sum on the full register.

    Site ``i`` occupies qubits ``[i*n, (i+1)*n)`` with ``n`` qubits per site.
    """
    entries = op.entries if isinstance(op, SpinLevelOperator) else np.asarray(op)
    d = entries.shape[0]
    if not 0 <= site < total_sites:
        raise IndexError(f"site {site} outside chain of {total_sites}")
    n = max(1, math.ceil(math.log2(d)))
    codes = _codes(encoding, d)
    items = []
    for l in range(d):
        for lp in range(d):
            a = entries[l, lp]
            if a == 0:
                continue
            for c, lab in _outer_product(n, codes[l], codes[lp]):
                items.append(PauliTerm(a * c, PauliString(lab)))
    local = PauliOperatorSum(n, tuple(items))
    if total_sites == 1 and site == 0:
        return local
    return local.embed(n * total_sites, n * site)


def encoded_spin(s, encoding, site: int = 0, total_sites: int = 1) -> dict[str, PauliOperatorSum]:
    """Encoded ``S^x, S^y, S^z`` of one site (Hermitian parts only)."""
    mats = spin_matrices(s)
    return {k: encode_operator(v, encoding, site, total_sites).real() for k, v in mats.items()}


def physical_projector(s, encoding, n_sites: int = 1) -> np.ndarray:
    """Diagonal (as a vector) of the projector onto encoded physical basis states."""
    d = int(2 * as_spin(s) + 1)
    n = qubits_per_site(s)
    local = np.zeros(1 << n)
    local[_codes(encoding, d)] = 1.0
    out = np.ones(1)
    for _ in range(n_sites):
        out = np.kron(local, out)
    return out
