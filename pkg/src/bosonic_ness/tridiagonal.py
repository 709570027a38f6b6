"""High-precision entropies for number-conserving states with tridiagonal ``C``.

The steady state of the chain has ``B = 0`` (unsqueezed baths) and a
tridiagonal ``C``. Every marginal is then again tridiagonal, its symplectic
eigenvalues are ``2c + 1`` for the eigenvalues ``c`` of the reduced ``C``, and
signed combinations of entropies are accumulated in quad precision by the
compiled kernel. This keeps conditional mutual informations far below double
precision resolvable (diffusive chains reach 1e-20 and less).

Conditional and bipartite mutual informations of contiguous blocks are
evaluated on a window of ``w`` sites on either side of the cut. The windowed
value increases monotonically with ``w`` (strong subadditivity) and
converges exponentially; the window is doubled until the relative change
drops below ``rtol``. Results within the rounding floor of the signed entropy
sum are reported as exactly 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bosonic_ness._core import backend
from bosonic_ness.ness import MomentMatrices, tridiagonal_ness
from bosonic_ness.params import ChainParams

DEFAULT_RTOL = 1e-12
START_WINDOW = 8
# a signed entropy sum in quad precision is good to ~ EPS_Q * sum |S_t|
EPS_Q = 1.93e-34
ROUNDING_SAFETY = 1e3


@dataclass(frozen=True)
class TridiagonalState:
    """``diag[i-1] = <a_i^dag a_i>``, ``offdiag[i-1] = <a_i^dag a_{i+1}>``."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        o = np.asarray(self.offdiag)
        if d.ndim != 1 or o.shape != (max(d.size - 1, 0),):
            raise ValueError("offdiag must have length len(diag) - 1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", o)

    @property
    def L(self) -> int:
        return self.diag.size

    @classmethod
    def from_params(cls, params: ChainParams) -> "TridiagonalState":
        if params.squeezed:
            raise ValueError("squeezed baths give B != 0; use the dense covariance-matrix path")
        return cls(*tridiagonal_ness(params))

    @classmethod
    def from_moments(cls, m: MomentMatrices, tol: float = 1e-12) -> "TridiagonalState":
        if np.any(np.abs(m.B) > tol):
            raise ValueError("state is not number conserving (B != 0)")
        if not m.is_tridiagonal(tol):
            raise ValueError("C is not tridiagonal")
        diag = np.diag(m.C)
        if np.any(np.abs(diag.imag) > tol):
            raise ValueError("diagonal of C must be real")
        return cls(diag.real.copy(), np.diag(m.C, -1).copy())

    def entropy_sum(self, terms, weights) -> float:
        """``sum_t weights[t] * S(sites_t)`` with 0-based index arrays, in quad precision."""
        return backend.signed_entropy_sum(self.diag, self.offdiag, terms, weights)

    def entropy(self, sites=None) -> float:
        """Entropy of a (1-based) site set; the whole chain when None."""
        idx = np.arange(self.L) if sites is None else _index(sites, self.L)
        return self.entropy_sum([idx], [1.0])


def _index(sites, L):
    idx = np.array(sorted(set(int(s) for s in sites)), dtype=np.int64) - 1
    if idx.size and (idx[0] < 0 or idx[-1] >= L):
        raise ValueError(f"sites must lie in 1..{L}")
    return idx


def _mode_entropy(c):
    c = np.maximum(c, 0.0)
    return (c + 1) * np.log1p(c) - c * np.log(np.where(c > 0, c, 1.0))


def _windowed(evaluate, span: int, window, rtol: float) -> float:
    # evaluate(w) -> (value, rounding scale) using w sites each side
    if window is not None:
        return _resolved(*evaluate(min(int(window), span)))
    w = min(START_WINDOW, span)
    value, scale = evaluate(w)
    while w < span:
        w = min(2 * w, span)
        new, scale = evaluate(w)
        if abs(new - value) <= rtol * abs(new) + ROUNDING_SAFETY * EPS_Q * scale:
            return _resolved(new, scale)
        value = new
    return _resolved(value, scale)


def _resolved(value: float, scale: float) -> float:
    # values inside the rounding floor of the entropy sum are indistinguishable from 0
    return 0.0 if abs(value) <= ROUNDING_SAFETY * EPS_Q * scale else value


def cmi(state: TridiagonalState, k: int, b: int, window: int | None = None,
        rtol: float = DEFAULT_RTOL) -> float:
    """``I(A:C|B)`` for ``A = 1..k``, ``B = k+1..k+b``, ``C = k+b+1..L``.

    ``window=None`` converges the window automatically; an integer fixes it
    (use ``window >= L`` for the untruncated value).
    """
    L = state.L
    if k < 1 or b < 0 or k + b >= L:
        raise ValueError(f"invalid tripartition k={k}, b={b} of L={L}")
    Bi = np.arange(k, k + b)

    def evaluate(w):
        Ai = np.arange(max(0, k - w), k)
        Ci = np.arange(k + b, min(L, k + b + w))
        ABC = np.r_[Ai, Bi, Ci]
        value = state.entropy_sum(
            [np.r_[Ai, Bi], np.r_[Bi, Ci], ABC, Bi], [1.0, 1.0, -1.0, -1.0])
        scale = 3 * float(np.sum(_mode_entropy(state.diag[ABC]) + 1.0))
        return value, scale

    return _windowed(evaluate, max(k, L - k - b), window, rtol)


def mutual_information(state: TridiagonalState, k: int, window: int | None = None,
                       rtol: float = DEFAULT_RTOL) -> float:
    """``I(A:B)`` for the bipartition ``A = 1..k``, ``B = k+1..L``."""
    return cmi(state, k, 0, window, rtol)


def total_correlations(state: TridiagonalState) -> float:
    """``sum_i S(rho_i) - S(rho)``, accumulated in quad precision."""
    L = state.L
    terms = [np.array([i]) for i in range(L)] + [np.arange(L)]
    return state.entropy_sum(terms, [1.0] * L + [-1.0])


def local_cmis(state: TridiagonalState, window: int | None = None,
               rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """``I_k = I({1..k-1} : {k+1..L} | {k})`` for ``k = 2..L-1``."""
    return np.array([cmi(state, k - 1, 1, window, rtol) for k in range(2, state.L)])
