"""Occupation profile and particle currents of the steady state.

Sign convention: ``J > 0`` is flow from site 1 towards site L in the
``lam <a_i^dag a_{i+1} + h.c.>`` convention of the drift matrix. With
``N1 > NL`` the chain therefore reports a negative current.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bosonic_ness.ness import MomentMatrices
from bosonic_ness.params import ChainParams

UNIFORMITY_TOL = 1e-10


@dataclass(frozen=True)
class TransportReport:
    profile: np.ndarray
    bond_currents: np.ndarray
    J: float
    regime: str


def occupation_profile(m: MomentMatrices) -> np.ndarray:
    """``<a_i^dag a_i>`` for ``i = 1..L``."""
    return np.real(np.diag(m.C)).copy()


def bond_current(m: MomentMatrices, i: int, lam: float = 1.0) -> float:
    """Particle current on bond ``(i, i+1)`` (1-based): ``2 lam Re C[i+1, i]``."""
    if not 1 <= i <= m.L - 1:
        raise IndexError(f"bond index must lie in 1..{m.L - 1}, got {i}")
    return float(2 * lam * m.C[i, i - 1].real)


def bond_currents(m: MomentMatrices, lam: float = 1.0) -> np.ndarray:
    return 2 * lam * np.real(np.diag(m.C, -1))


def transport_report(params: ChainParams, m: MomentMatrices) -> TransportReport:
    """Profile and currents; raises if the bond currents are not uniform."""
    currents = bond_currents(m, params.lam)
    spread = float(np.ptp(currents)) if currents.size else 0.0
    if spread > UNIFORMITY_TOL * max(1.0, float(np.max(np.abs(currents)))):
        raise ValueError(f"bond currents not uniform (spread {spread:.3e}); not a steady state")
    return TransportReport(occupation_profile(m), currents, float(np.mean(currents)), params.regime)


def exact_current(params: ChainParams) -> float:
    """Closed-form current ``2 gamma lam^2 (NL - N1) / (4 lam^2 + gamma^2 + gamma Gamma (L-1))``."""
    p = params
    D = 4 * p.lam**2 + p.gamma**2 + p.gamma * p.Gamma * (p.L - 1)
    return 2 * p.gamma * p.lam**2 * (p.NL - p.N1) / D


def asymptotic_current(params: ChainParams) -> tuple[float, float]:
    """Return ``(J_ballistic, lim_L J*L)``.

    The ballistic value is ``2 gamma lam^2 (NL - N1)/(4 lam^2 + gamma^2)``;
    the diffusive ``J*L`` limit is ``2 lam^2 (NL - N1)/Gamma`` and is undefined
    (ValueError) for ``Gamma = 0``.
    """
    p = params
    dN = p.NL - p.N1
    j_ball = 2 * p.gamma * p.lam**2 * dN / (4 * p.lam**2 + p.gamma**2)
    if p.Gamma == 0:
        raise ValueError("diffusive limit undefined for Gamma = 0")
    return j_ball, 2 * p.lam**2 * dN / p.Gamma


def ballistic_current(params: ChainParams) -> float:
    p = params
    return 2 * p.gamma * p.lam**2 * (p.NL - p.N1) / (4 * p.lam**2 + p.gamma**2)
