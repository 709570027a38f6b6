"""Chain and bath parameters, and the drift/noise matrices of the moment dynamics.

Sites are numbered 1..L in every user-facing argument; arrays are 0-based
internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class BathSpec:
    """A squeezed thermal bath.

    Parameters
    ----------
    nbar : float
        Bose-Einstein occupation of the bath.
    r : float
        Squeezing magnitude.
    theta : float
        Squeezing phase, in [0, 2*pi).
    """

    nbar: float = 0.0
    r: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        for name in ("nbar", "r", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.nbar < 0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")
        if self.r < 0:
            raise ValueError(f"squeezing r must be >= 0, got {self.r}")
        if not 0 <= self.theta < 2 * math.pi:
            raise ValueError(f"theta must lie in [0, 2pi), got {self.theta}")

    @property
    def N(self) -> float:
        return squeezing_to_moments(self)[0]

    @property
    def M(self) -> complex:
        return squeezing_to_moments(self)[1]


def squeezing_to_moments(bath: BathSpec) -> tuple[float, complex]:
    """Return the thermal and squeezing moments ``(N, M)`` of a bath.

    ``N + 1/2 = (nbar + 1/2) cosh 2r`` and ``M = (nbar + 1/2) e^{i theta} sinh 2r``.
    """
    h = bath.nbar + 0.5
    # nbar cosh 2r + sinh^2 r avoids cancellation at small r
    N = bath.nbar * math.cosh(2 * bath.r) + math.sinh(bath.r) ** 2
    M = h * complex(math.cos(bath.theta), math.sin(bath.theta)) * math.sinh(2 * bath.r)
    if bath.r == 0:
        M = 0j
    return N, M


@dataclass(frozen=True)
class ChainParams:
    """Physical parameters of the boundary-driven chain.

    ``Gamma = 0`` is the purely boundary-driven (ballistic) chain; ``Gamma > 0``
    adds a self-consistent reservoir on every site.
    """

    L: int
    omega: float = 0.0
    lam: float = 1.0
    gamma: float = 1.0
    Gamma: float = 0.0
    bath_left: BathSpec = field(default_factory=BathSpec)
    bath_right: BathSpec = field(default_factory=BathSpec)

    def __post_init__(self):
        if isinstance(self.L, bool) or int(self.L) != self.L:
            raise ValueError(f"L must be an integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        for name in ("omega", "lam", "gamma", "Gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.Gamma < 0:
            raise ValueError(f"Gamma must be >= 0, got {self.Gamma}")

    @classmethod
    def thermal(cls, L: int, N1: float, NL: float, **kwargs) -> "ChainParams":
        """Chain between two unsqueezed baths with occupations ``N1`` and ``NL``."""
        return cls(L=L, bath_left=BathSpec(N1), bath_right=BathSpec(NL), **kwargs)

    def with_(self, **changes) -> "ChainParams":
        """Copy with fields replaced; ``N1``/``NL`` set the bath occupations."""
        left, right = self.bath_left, self.bath_right
        if "N1" in changes:
            left = replace(left, nbar=float(changes.pop("N1")))
        if "NL" in changes:
            right = replace(right, nbar=float(changes.pop("NL")))
        return replace(self, bath_left=left, bath_right=right, **changes)

    @property
    def N1(self) -> float:
        return self.bath_left.N

    @property
    def NL(self) -> float:
        return self.bath_right.N

    @property
    def M1(self) -> complex:
        return self.bath_left.M

    @property
    def ML(self) -> complex:
        return self.bath_right.M

    @property
    def squeezed(self) -> bool:
        return self.bath_left.r > 0 or self.bath_right.r > 0

    @property
    def regime(self) -> str:
        return "ballistic" if self.Gamma == 0 else "diffusive"


@dataclass(frozen=True)
class DriftNoise:
    """Drift ``W`` and noise ``F_N``, ``F_M`` of dC/dt = W C + C W^dag + F_N."""

    W: np.ndarray
    F_N: np.ndarray
    F_M: np.ndarray


def drift_matrix(L: int, omega: float, lam: float, gammas) -> np.ndarray:
    """Tridiagonal drift with +lam above and -lam below the diagonal."""
    W = np.zeros((L, L), dtype=complex)
    idx = np.arange(L)
    W[idx, idx] = 1j * omega - 0.5 * np.asarray(gammas, dtype=float)
    W[idx[:-1], idx[1:]] = lam
    W[idx[1:], idx[:-1]] = -lam
    return W


def build_drift_noise(params: ChainParams) -> DriftNoise:
    """Drift and noise matrices for the physical boundary baths.

    The self-consistent reservoirs are not part of ``W``; the solvers add
    them as the ``-Gamma * offdiag(C)`` term.
    """
    L = params.L
    if L < 2:
        raise ValueError("L must be >= 2")
    gammas = np.zeros(L)
    gammas[0] = gammas[-1] = params.gamma
    W = drift_matrix(L, params.omega, params.lam, gammas)
    F_N = np.zeros((L, L))
    F_N[0, 0] = params.gamma * params.N1
    F_N[-1, -1] = params.gamma * params.NL
    F_M = np.zeros((L, L), dtype=complex)
    F_M[0, 0] = params.gamma * params.M1
    F_M[-1, -1] = params.gamma * params.ML
    return DriftNoise(W=W, F_N=F_N, F_M=F_M)
