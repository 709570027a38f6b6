"""Covariance matrices, symplectic spectra and entropic quantities of Gaussian states.

The covariance matrix uses the interleaved basis ``(a_1, a_1^dag, ..., a_L, a_L^dag)``:
``Theta_ij = <{X_i, X_j^dag}>/2``. All logarithms are natural. Sites are 1-based.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from bosonic_ness.ness import MomentMatrices

NU_TOL = 1e-8
IMAG_TOL = 1e-8
NEG_TOL = 1e-10

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


class UnphysicalStateError(ValueError):
    """A covariance matrix violates the uncertainty relation beyond tolerance."""


@dataclass(frozen=True)
class CovarianceMatrix:
    Theta: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.Theta, dtype=complex)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] % 2 or T.shape[0] == 0:
            raise ValueError(f"Theta must be 2n x 2n with n >= 1, got shape {T.shape}")
        if not np.allclose(T, T.conj().T, atol=1e-10, rtol=0):
            raise ValueError("Theta must be Hermitian")
        object.__setattr__(self, "Theta", T)

    @property
    def n_modes(self) -> int:
        return self.Theta.shape[0] // 2

    @property
    def C(self) -> np.ndarray:
        return self.Theta[0::2, 0::2] - 0.5 * np.eye(self.n_modes)

    @property
    def B(self) -> np.ndarray:
        return self.Theta[0::2, 1::2]

    @property
    def number_conserving(self) -> bool:
        return not np.any(self.B)


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), SIGMA_Z)


def assemble_cm(m: MomentMatrices) -> CovarianceMatrix:
    """``Theta = I/2 + C x s+s- + C^T x s-s+ + B x s+ + B^* x s-``."""
    L = m.L
    Theta = (0.5 * np.eye(2 * L)
             + np.kron(m.C, SIGMA_PLUS @ SIGMA_MINUS)
             + np.kron(m.C.T, SIGMA_MINUS @ SIGMA_PLUS)
             + np.kron(m.B, SIGMA_PLUS)
             + np.kron(m.B.conj(), SIGMA_MINUS))
    return CovarianceMatrix(Theta)


def _site_index(sites: Iterable[int], L: int, allow_empty: bool = False) -> np.ndarray:
    idx = np.array(sorted(set(int(s) for s in sites)), dtype=int)
    if idx.size == 0 and not allow_empty:
        raise ValueError("site set must be non-empty")
    if idx.size and (idx[0] < 1 or idx[-1] > L):
        raise ValueError(f"sites must lie in 1..{L}, got {idx.tolist()}")
    return idx


def reduce_cm(cm: CovarianceMatrix, sites: Iterable[int]) -> CovarianceMatrix:
    """Marginal CM of the given (1-based) sites; both quadrature rows of each mode are kept."""
    idx = _site_index(sites, cm.n_modes) - 1
    rows = np.ravel(np.column_stack([2 * idx, 2 * idx + 1]))
    return CovarianceMatrix(cm.Theta[np.ix_(rows, rows)])


@dataclass(frozen=True)
class SymplecticSpectrum:
    nu: np.ndarray

    def __len__(self):
        return len(self.nu)


def _clamp(nu: np.ndarray) -> np.ndarray:
    if nu.size and nu.min() < 1 - NU_TOL:
        raise UnphysicalStateError(f"symplectic eigenvalue {nu.min():.12g} < 1")
    return np.maximum(nu, 1.0)


def symplectic_eigenvalues(cm: CovarianceMatrix, method: str = "dense") -> SymplecticSpectrum:
    """Positive eigenvalues of ``2 Sigma Theta``, sorted descending.

    ``method="dense"`` runs a general eigensolver on the 2n x 2n matrix;
    ``method="number_conserving"`` uses ``nu = 2c + 1`` with ``c`` the
    eigenvalues of ``C`` and requires ``B = 0``; ``"auto"`` picks the latter
    when it applies.
    """
    n = cm.n_modes
    if method == "auto":
        method = "number_conserving" if cm.number_conserving else "dense"
    if method == "number_conserving":
        if not cm.number_conserving:
            raise ValueError("number-conserving spectrum requires B = 0")
        nu = 2 * np.linalg.eigvalsh(cm.C) + 1
    elif method == "dense":
        ev = np.linalg.eigvals(2 * symplectic_form(n) @ cm.Theta)
        scale = max(1.0, float(np.max(np.abs(ev))))
        if np.max(np.abs(ev.imag)) > IMAG_TOL * scale:
            raise UnphysicalStateError(
                f"2 Sigma Theta has complex eigenvalues (|Im| up to {np.max(np.abs(ev.imag)):.3e})")
        ev = np.sort(ev.real)
        # eigenvalues come in +-nu pairs
        nu = ev[n:]
        if not np.allclose(nu, -ev[:n][::-1], atol=1e-8 * scale, rtol=0) or nu.min() <= 0:
            raise UnphysicalStateError("spectrum of 2 Sigma Theta is not +- paired")
    else:
        raise ValueError(f"unknown method {method!r}")
    return SymplecticSpectrum(np.sort(_clamp(nu))[::-1])


def von_neumann_entropy(spec: SymplecticSpectrum) -> float:
    """Gaussian entropy ``sum_k [(nu+1)/2 ln((nu+1)/2) - (nu-1)/2 ln((nu-1)/2)]``."""
    nu = _clamp(np.asarray(spec.nu, dtype=float))
    hi = (nu + 1) / 2
    lo = (nu - 1) / 2
    return float(np.sum(xlogy(hi, hi) - xlogy(lo, lo)))


def entropy(cm: CovarianceMatrix, sites: Iterable[int] | None = None, method: str = "auto") -> float:
    """Entropy of the marginal on ``sites`` (all modes when None); 0 for an empty set."""
    if sites is not None:
        idx = _site_index(sites, cm.n_modes, allow_empty=True)
        if idx.size == 0:
            return 0.0
        cm = reduce_cm(cm, idx)
    return von_neumann_entropy(symplectic_eigenvalues(cm, method))


def _nonneg(value: float, what: str) -> float:
    if value < -NEG_TOL:
        raise UnphysicalStateError(f"{what} = {value:.3e} is negative beyond tolerance")
    return max(value, 0.0)


def _disjoint(*blocks):
    seen = set()
    for b in blocks:
        if seen & b:
            raise ValueError("site sets must be disjoint")
        seen |= b


def mutual_information(cm: CovarianceMatrix, A: Iterable[int], B: Iterable[int],
                       method: str = "auto") -> float:
    """``S(A) + S(B) - S(AB)``."""
    A, B = set(A), set(B)
    if not A or not B:
        raise ValueError("mutual information needs two non-empty site sets")
    _disjoint(A, B)
    v = entropy(cm, A, method) + entropy(cm, B, method) - entropy(cm, A | B, method)
    return _nonneg(v, "mutual information")


def tripartite_mutual_information(cm: CovarianceMatrix, A, B, C, method: str = "auto") -> float:
    """``S(A) + S(B) + S(C) - S(ABC)``: information absent from the product of the three marginals."""
    A, B, C = set(A), set(B), set(C)
    if not (A and B and C):
        raise ValueError("site sets must be non-empty")
    _disjoint(A, B, C)
    v = (entropy(cm, A, method) + entropy(cm, B, method) + entropy(cm, C, method)
         - entropy(cm, A | B | C, method))
    return _nonneg(v, "tripartite mutual information")


def total_correlations(cm: CovarianceMatrix, method: str = "auto") -> float:
    """``sum_i S(rho_i) - S(rho)`` over all modes of ``cm``."""
    singles = sum(entropy(cm, [i], method) for i in range(1, cm.n_modes + 1))
    return _nonneg(singles - entropy(cm, None, method), "total correlations")


@dataclass(frozen=True)
class Partition:
    """Ordered, pairwise disjoint blocks of 1-based site indices."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(s) for s in b)) for b in self.blocks)
        seen: set[int] = set()
        for b in blocks:
            if len(set(b)) != len(b) or seen & set(b):
                raise ValueError("partition blocks must be disjoint")
            if b and b[0] < 1:
                raise ValueError("site indices are 1-based")
            seen |= set(b)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def tripartition(cls, L: int, k: int, b: int) -> "Partition":
        """``A = 1..k``, ``B = k+1..k+b``, ``C = k+b+1..L``."""
        if k < 1 or b < 0 or k + b >= L:
            raise ValueError(f"invalid tripartition k={k}, b={b} of L={L}")
        return cls((tuple(range(1, k + 1)), tuple(range(k + 1, k + b + 1)),
                    tuple(range(k + b + 1, L + 1))))

    @classmethod
    def symmetric_tripartition(cls, L: int, b: int) -> "Partition":
        """``|A| = |C| = (L - b)/2``; odd ``L - b`` is rejected."""
        if (L - b) % 2:
            raise ValueError(f"symmetric tripartition needs L - b even (L={L}, b={b})")
        return cls.tripartition(L, (L - b) // 2, b)

    @classmethod
    def bipartition(cls, L: int, k: int) -> "Partition":
        if not 1 <= k < L:
            raise ValueError(f"invalid bipartition k={k} of L={L}")
        return cls((tuple(range(1, k + 1)), tuple(range(k + 1, L + 1))))

    def check_range(self, L: int) -> None:
        for b in self.blocks:
            if b and b[-1] > L:
                raise ValueError(f"partition refers to site {b[-1]} > L={L}")

    def abc(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        """Validate and unpack a contiguous ordered tripartition A < B < C."""
        if len(self.blocks) != 3:
            raise ValueError("expected a tripartition A|B|C")
        A, B, C = self.blocks
        if not A or not C:
            raise ValueError("blocks A and C must be non-empty")
        flat = A + B + C
        if flat != tuple(range(flat[0], flat[0] + len(flat))):
            raise ValueError("tripartition blocks must be contiguous and ordered A < B < C")
        return A, B, C


def conditional_mutual_information(cm: CovarianceMatrix, p: Partition, method: str = "auto") -> float:
    """``I(A:C|B) = S(AB) + S(BC) - S(ABC) - S(B)``; equals I(A:C) for an empty B."""
    A, B, C = p.abc()
    p.check_range(cm.n_modes)
    A, B, C = set(A), set(B), set(C)
    v = (entropy(cm, A | B, method) + entropy(cm, B | C, method)
         - entropy(cm, A | B | C, method) - entropy(cm, B, method))
    return _nonneg(v, "conditional mutual information")


def _mi_raw(cm, X, Y, method):
    return entropy(cm, X, method) + entropy(cm, Y, method) - entropy(cm, X | Y, method)


def chain_rule_residual(cm: CovarianceMatrix, p: Partition, orientation: str = "right",
                        method: str = "auto") -> float:
    """``I(A:C|B) - [I(AB:C) - I(B:C)]`` (``orientation="left"``: ``I(A:BC) - I(A:B)``)."""
    A, B, C = (set(x) for x in p.abc())
    p.check_range(cm.n_modes)
    cmi = (entropy(cm, A | B, method) + entropy(cm, B | C, method)
           - entropy(cm, A | B | C, method) - entropy(cm, B, method))
    if orientation == "right":
        other = _mi_raw(cm, A | B, C, method) - _mi_raw(cm, B, C, method)
    elif orientation == "left":
        other = _mi_raw(cm, A, B | C, method) - _mi_raw(cm, A, B, method)
    else:
        raise ValueError(f"orientation must be 'right' or 'left', got {orientation!r}")
    return float(cmi - other)
