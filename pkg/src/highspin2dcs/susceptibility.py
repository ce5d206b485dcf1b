"""Eigenstate expansion of the nonlinear magnetic response.

Resolvents ``L_ab(w) = 1 / (w + i eta + E_a - E_b)`` are evaluated at the
angular frequency ``w = 2 pi f`` for a cycle-frequency grid ``f``, so peaks
land at the same positions as in the transformed time traces.  Index ``0`` is
the ground state; only physical eigenstates enter the sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import EigenDecomposition

__all__ = [
    "ResponseGrid",
    "DipoleData",
    "dipole_data",
    "resolvent",
    "chi2_2d",
    "chi3_2d",
    "chi_1d",
    "pathway_report",
]

DEFAULT_ETA = 0.02


@dataclass
class ResponseGrid:
    f_t: np.ndarray
    f_tau: np.ndarray | None
    values: np.ndarray
    eta: float

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def value_near(self, ft: float, ftau: float | None = None, bins: int = 1) -> float:
        i = int(np.argmin(np.abs(self.f_t - ft)))
        mag = self.magnitude()
        if self.f_tau is None:
            return float(mag[max(0, i - bins) : i + bins + 1].max())
        j = int(np.argmin(np.abs(self.f_tau - ftau)))
        return float(mag[max(0, i - bins) : i + bins + 1, max(0, j - bins) : j + bins + 1].max())


@dataclass(frozen=True)
class DipoleData:
    """Physical energies and magnetic dipole matrix ``m[j, k] = <j|Hz|k>``."""

    energies: np.ndarray
    m: np.ndarray
    n_sites: int

    def __post_init__(self):
        if not np.allclose(self.m, self.m.conj().T, atol=1e-10):
            raise ValueError("dipole matrix must be Hermitian")

    def s2(self) -> np.ndarray:
        return self.m[0, :] * self.m[:, 0]

    def s3(self) -> np.ndarray:
        m = self.m
        return m[0, :, None] * m * m[None, :, 0]

    def s4(self) -> np.ndarray:
        m = self.m
        return m[0, :, None, None] * m[:, :, None] * m[None, :, :] * m[None, None, :, 0]


def dipole_data(eig: EigenDecomposition, hz, n_sites: int) -> DipoleData:
    return DipoleData(eig.physical_energies, eig.dipoles(hz), n_sites)


def resolvent(f: np.ndarray, energies: np.ndarray, eta: float = DEFAULT_ETA) -> np.ndarray:
    """``L[k, a, b] = 1 / (2 pi f_k + i eta + E_a - E_b)``."""
    if not eta > 0:
        raise ValueError("broadening must be positive")
    w = 2 * np.pi * np.asarray(f, dtype=float)
    gap = energies[:, None] - energies[None, :]
    return 1.0 / (w[:, None, None] + 1j * eta + gap[None, :, :])


def chi2_2d(data: DipoleData, f_t, f_tau, eta: float = DEFAULT_ETA) -> ResponseGrid:
    S = data.s3()
    Lt = resolvent(f_t, data.energies, eta)
    Lu = resolvent(f_tau, data.energies, eta)
    e = lambda sub, *ops: np.einsum(sub, *ops, optimize=True)  # noqa: E731
    val = (
        e("mn,am,bn->ab", S, Lt[:, 0, :], Lu[:, 0, :])
        - e("mn,amn,bn->ab", S, Lt, Lu[:, 0, :])
        - e("mn,amn,bm->ab", S, Lt, Lu[:, :, 0])
        + e("mn,an,bm->ab", S, Lt[:, :, 0], Lu[:, :, 0])
    ) / data.n_sites
    return ResponseGrid(np.asarray(f_t), np.asarray(f_tau), val, eta)


def chi3_2d(data: DipoleData, f_t, f_tau, ordering: str = "t,tau,0", eta: float = DEFAULT_ETA) -> ResponseGrid:
    """Third-order response; ``ordering`` is ``"t,tau,0"`` or ``"t,0,tau"``."""
    S = data.s4()
    Lt = resolvent(f_t, data.energies, eta)
    Lu = resolvent(f_tau, data.energies, eta)
    t0, u0 = Lt[:, 0, :], Lu[:, 0, :]  # L_{0,x}
    tx0, ux0 = Lt[:, :, 0], Lu[:, :, 0]  # L_{x,0}
    e = lambda sub, *ops: np.einsum(sub, *ops, optimize=True)  # noqa: E731
    if ordering == "t,tau,0":
        val = (
            e("mnl,am,bn->ab", S, t0, u0)
            - e("mnl,amn,bn->ab", S, Lt, u0)
            - 2 * e("mnl,amn,bml->ab", S, Lt, Lu)
            + 2 * e("mnl,anl,bml->ab", S, Lt, Lu)
            + e("mnl,anl,bn->ab", S, Lt, ux0)
            - e("mnl,al,bn->ab", S, tx0, ux0)
        )
    elif ordering == "t,0,tau":
        val = (
            e("mnl,am,bl->ab", S, t0, u0)
            - 2 * e("mnl,amn,bl->ab", S, Lt, u0)
            + e("mnl,anl,bl->ab", S, Lt, u0)
            - e("mnl,amn,bm->ab", S, Lt, ux0)
            + 2 * e("mnl,anl,bm->ab", S, Lt, ux0)
            - e("mnl,al,bm->ab", S, tx0, ux0)
        )
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    return ResponseGrid(np.asarray(f_t), np.asarray(f_tau), 1j * val / data.n_sites, eta)


def chi_1d(data: DipoleData, f, order: int, eta: float = DEFAULT_ETA) -> ResponseGrid:
    L = resolvent(f, data.energies, eta)
    l0, lx0 = L[:, 0, :], L[:, :, 0]
    if order == 1:
        S = data.s2()
        val = (l0 - lx0) @ S
    elif order == 2:
        S = data.s3()
        val = 1j * (
            np.einsum("mn,am->a", S, l0) - 2 * np.einsum("mn,amn->a", S, L) + np.einsum("mn,an->a", S, lx0)
        )
    elif order == 3:
        S = data.s4()
        val = -(
            np.einsum("mnl,am->a", S, l0)
            - 3 * np.einsum("mnl,amn->a", S, L)
            + 3 * np.einsum("mnl,anl->a", S, L)
            - np.einsum("mnl,al->a", S, lx0)
        )
    else:
        raise ValueError("order must be 1, 2 or 3")
    return ResponseGrid(np.asarray(f), None, val / data.n_sites, eta)


def pathway_report(
    data: DipoleData,
    peak: tuple[float, float],
    order: int = 2,
    ordering: str = "t,tau,0",
    eta: float = DEFAULT_ETA,
    top: int = 5,
    rel: float = 1e-6,
) -> list[tuple[tuple[int, ...], float]]:
    """Eigenstate-index combinations ranked by their contribution magnitude at ``peak``.

    Contributions below ``rel`` times the largest one are dropped.
    """
    ft, fu = peak
    Lt = resolvent([ft], data.energies, eta)[0]
    Lu = resolvent([fu], data.energies, eta)[0]
    n = data.energies.size
    if order == 2:
        S = data.s3()
        c = S * (
            Lt[0, :, None] * Lu[0, None, :]
            - Lt * Lu[0, None, :]
            - Lt * Lu[:, 0, None]
            + Lt[None, :, 0] * Lu[:, 0, None]
        )
    elif order == 3:
        S = data.s4()
        m, nn, l = np.ix_(range(n), range(n), range(n))
        if ordering == "t,tau,0":
            br = (
                Lt[0, m] * Lu[0, nn]
                - Lt[m, nn] * Lu[0, nn]
                - 2 * Lt[m, nn] * Lu[m, l]
                + 2 * Lt[nn, l] * Lu[m, l]
                + Lt[nn, l] * Lu[nn, 0]
                - Lt[l, 0] * Lu[nn, 0]
            )
        else:
            br = (
                Lt[0, m] * Lu[0, l]
                - 2 * Lt[m, nn] * Lu[0, l]
                + Lt[nn, l] * Lu[0, l]
                - Lt[m, nn] * Lu[m, 0]
                + 2 * Lt[nn, l] * Lu[m, 0]
                - Lt[l, 0] * Lu[m, 0]
            )
        c = S * br
    else:
        raise ValueError("order must be 2 or 3")
    mag = np.abs(c) / data.n_sites
    if mag.max() == 0:
        return []
    flat = np.argsort(mag, axis=None)[::-1]
    out = []
    for k in flat[:top]:
        if mag.flat[k] < rel * mag.max():
            break
        out.append((tuple(int(i) for i in np.unravel_index(k, mag.shape)), float(mag.flat[k])))
    return out
