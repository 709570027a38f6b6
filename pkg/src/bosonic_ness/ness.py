"""Steady-state moment matrices of the chain.

Three independent routes are provided and cross-checked in the test suite:

* closed-form tridiagonal expressions (:func:`analytic_ness`), O(L);
* exact linear solves of the self-consistent Lyapunov equation
  (:func:`solve_self_consistent`), either on the vectorized L^2 system or by a
  damped fixed-point iteration on the reservoir occupations;
* fixed-step RK4 integration of the moment dynamics (:func:`evolve_transient`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from bosonic_ness._core import backend
from bosonic_ness.params import ChainParams, build_drift_noise

HURWITZ_TOL = 1e-12
FIXED_POINT_TOL = 1e-12
FIXED_POINT_DAMPING = 0.5
DENSE_SPECTRUM_MAX_L = 24


class SolverError(RuntimeError):
    """A steady-state solve failed (marginal drift, non-convergence, ...)."""


@dataclass(frozen=True)
class MomentMatrices:
    """Second moments of a zero-mean Gaussian state.

    ``C[i, j] = <a_j^dag a_i>`` (Hermitian) and ``B[i, j] = <a_i a_j>`` (symmetric).
    """

    C: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=complex)
        B = np.asarray(self.B, dtype=complex)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape != B.shape:
            raise ValueError("C and B must be square matrices of equal size")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "B", B)

    @property
    def L(self) -> int:
        return self.C.shape[0]

    @property
    def number_conserving(self) -> bool:
        return not np.any(self.B)

    def is_tridiagonal(self, tol: float = 1e-12) -> bool:
        far = np.abs(np.subtract.outer(np.arange(self.L), np.arange(self.L))) > 1
        return bool(np.all(np.abs(self.C[far]) <= tol) and np.all(np.abs(self.B[far]) <= tol))


def _denominator(params: ChainParams) -> float:
    p = params
    return 4 * p.lam**2 + p.gamma**2 + p.gamma * p.Gamma * (p.L - 1)


def _profile(params: ChainParams, X1, XL):
    """Diagonal and uniform off-diagonal of the tridiagonal steady state.

    The same expressions serve the thermal moments (X = N) and the squeezing
    moments (X = M).
    """
    p = params
    D = _denominator(p)
    i = np.arange(1, p.L + 1)
    ends = (i == 1).astype(float) - (i == p.L)
    diag = ((X1 + XL) / 2
            + 0.5 * p.gamma * (X1 - XL) / D * p.Gamma * (p.L - 2 * i + 1)
            + 0.5 * p.gamma**2 * (X1 - XL) / D * ends)
    off = p.gamma * p.lam / D * (XL - X1)
    return diag, off


def tridiagonal_ness(params: ChainParams) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form ``(diag, offdiag)`` of the steady-state C, in O(L).

    ``diag[i-1] = <a_i^dag a_i>`` and ``offdiag[i-1] = <a_i^dag a_{i+1}>``.
    """
    diag, off = _profile(params, params.N1, params.NL)
    return np.asarray(diag, dtype=float), np.full(params.L - 1, float(off))


def _tridiag(diag, off) -> np.ndarray:
    L = len(diag)
    out = np.zeros((L, L), dtype=complex)
    out[np.arange(L), np.arange(L)] = diag
    out[np.arange(L - 1), np.arange(1, L)] = off
    out[np.arange(1, L), np.arange(L - 1)] = off
    return out


def analytic_ness_C(params: ChainParams) -> np.ndarray:
    """Closed-form steady-state ``C`` (occupations and nearest-neighbour correlator)."""
    return _tridiag(*_profile(params, params.N1, params.NL))


def analytic_ness_B(params: ChainParams) -> np.ndarray:
    """Closed-form steady-state ``B``: the ``C`` expressions with N replaced by M."""
    if params.M1 == 0 and params.ML == 0:
        return np.zeros((params.L, params.L), dtype=complex)
    return _tridiag(*_profile(params, params.M1, params.ML))


def analytic_ness(params: ChainParams) -> MomentMatrices:
    return MomentMatrices(analytic_ness_C(params), analytic_ness_B(params))


def check_hurwitz(A: np.ndarray, tol: float = HURWITZ_TOL) -> None:
    """Raise :class:`SolverError` unless every eigenvalue of ``A`` has Re < -tol."""
    worst = np.max(np.linalg.eigvals(A).real)
    if worst >= -tol:
        raise SolverError(
            f"drift is not Hurwitz (max Re eigenvalue {worst:.3e}); steady state not unique")


def solve_lyapunov_dense(A, Q) -> np.ndarray:
    """Solve ``A X + X A^dag + Q = 0`` for a Hurwitz ``A`` (Bartels-Stewart)."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    if A.shape != Q.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and Q must be square and of equal shape")
    check_hurwitz(A)
    X = sla.solve_continuous_lyapunov(A, -Q)
    res = np.linalg.norm(A @ X + X @ A.conj().T + Q)
    scale = np.linalg.norm(A) * np.linalg.norm(X) + np.linalg.norm(Q)
    if not np.isfinite(res) or res > 1e-10 * max(scale, np.finfo(float).tiny):
        raise SolverError(f"Lyapunov residual {res:.3e} exceeds tolerance (ill-conditioned drift)")
    return X


def offdiagonal(X: np.ndarray) -> np.ndarray:
    """``X`` with its main diagonal removed."""
    out = np.array(X, copy=True)
    np.fill_diagonal(out, 0)
    return out


def lyapunov_residual(params: ChainParams, m: MomentMatrices) -> tuple[float, float]:
    """Max-norm residuals of the self-consistent steady-state equations for C and B."""
    dn = build_drift_noise(params)
    W, Wd = dn.W, dn.W.conj().T
    rC = W @ m.C + m.C @ Wd + dn.F_N - params.Gamma * offdiagonal(m.C)
    rB = W @ m.B + m.B @ Wd + dn.F_M - params.Gamma * offdiagonal(m.B)
    return float(np.max(np.abs(rC))), float(np.max(np.abs(rB)))


def _vectorized_operator(W: np.ndarray, Gamma: float) -> sp.csc_matrix:
    # column-major vec: vec(W X) = (I kron W) vec X, vec(X W^dag) = (conj(W) kron I) vec X
    L = W.shape[0]
    I = sp.identity(L, format="csr", dtype=complex)
    Ws = sp.csr_matrix(W)
    op = sp.kron(I, Ws) + sp.kron(Ws.conj(), I)
    off = 1.0 - np.eye(L).reshape(-1, order="F")
    return (op - Gamma * sp.diags(off)).tocsc()


def _solve_vectorized(W, F, Gamma):
    L = W.shape[0]
    if not np.any(F):
        return np.zeros((L, L), dtype=complex)
    op = _vectorized_operator(W, Gamma)
    x = spla.spsolve(op, -np.asarray(F, dtype=complex).reshape(-1, order="F"))
    return np.asarray(x).reshape((L, L), order="F")


def _solve_fixed_point(W, F, Gamma, max_iter, tol=FIXED_POINT_TOL,
                       damping=FIXED_POINT_DAMPING):
    # W C + C W^dag + F - Gamma C + Gamma diag(n) = 0 with n = diag(C) at the fixed point
    L = W.shape[0]
    Wg = W - 0.5 * Gamma * np.eye(L)
    check_hurwitz(Wg)
    if Gamma == 0:
        return solve_lyapunov_dense(Wg, F), 0
    n = np.diag(solve_lyapunov_dense(Wg, F))
    if not np.iscomplexobj(F):
        n = n.real
    for it in range(1, max_iter + 1):
        X = solve_lyapunov_dense(Wg, F + Gamma * np.diag(n))
        new = np.diag(X)
        if not np.iscomplexobj(F):
            new = new.real
        step = np.max(np.abs(new - n))
        n = (1 - damping) * n + damping * new
        if step <= tol:
            return X, it
    raise SolverError(f"self-consistent iteration did not converge in {max_iter} steps "
                      f"(last diagonal change {step:.3e})")


def solve_self_consistent(params: ChainParams, method: str = "vectorized",
                          max_iter: int = 10_000) -> MomentMatrices:
    """Solve ``W C + C W^dag + F_N - Gamma * offdiag(C) = 0`` and its B analogue.

    ``method="vectorized"`` performs one sparse solve on the L^2 system;
    ``method="fixed_point"`` iterates the reservoir occupations
    ``N~_i <- C_ii`` with damping 0.5 until the diagonal changes by < 1e-12.
    """
    dn = build_drift_noise(params)
    check_hurwitz(dn.W - 0.5 * params.Gamma * np.eye(params.L))
    if method == "vectorized":
        C = _solve_vectorized(dn.W, dn.F_N, params.Gamma)
        B = _solve_vectorized(dn.W, dn.F_M, params.Gamma)
    elif method == "fixed_point":
        C, _ = _solve_fixed_point(dn.W, dn.F_N, params.Gamma, max_iter)
        if np.any(dn.F_M):
            B, _ = _solve_fixed_point(dn.W, dn.F_M, params.Gamma, max_iter)
        else:
            B = np.zeros_like(C)
    else:
        raise ValueError(f"unknown method {method!r}")
    C = 0.5 * (C + C.conj().T)
    B = 0.5 * (B + B.T)
    return MomentMatrices(C, B)


def relaxation_rate(params: ChainParams) -> float:
    """Slowest decay rate of the moment dynamics.

    This is minus the spectral abscissa of ``X -> W X + X W^dag - Gamma offdiag(X)``;
    the reservoir feedback on the diagonal makes it slower than the rates of
    ``W`` alone.
    """
    dn = build_drift_noise(params)
    op = _vectorized_operator(dn.W, params.Gamma)
    if params.L <= DENSE_SPECTRUM_MAX_L:
        ev = np.linalg.eigvals(op.toarray())
    else:
        # shift-invert about 0: the slow modes sit closest to the origin
        ev = spla.eigs(op, k=12, sigma=0, which="LM", return_eigenvectors=False)
    return float(-np.max(ev.real))


def evolve_transient(params: ChainParams, C0, B0, t_final: float, dt: float) -> MomentMatrices:
    """Integrate the moment dynamics from ``(C0, B0)`` with fixed-step RK4.

    The step is shrunk slightly so that an integer number of steps lands
    exactly on ``t_final``.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be a positive finite number, got {dt}")
    if not (math.isfinite(t_final) and t_final >= 0):
        raise ValueError(f"t_final must be finite and >= 0, got {t_final}")
    L = params.L
    C0 = np.asarray(C0, dtype=complex)
    B0 = np.asarray(B0, dtype=complex)
    if C0.shape != (L, L) or B0.shape != (L, L):
        raise ValueError(f"initial moments must be {L}x{L}")
    if not (np.all(np.isfinite(C0)) and np.all(np.isfinite(B0))):
        raise ValueError("initial moments must be finite")
    nsteps = math.ceil(t_final / dt - 1e-12) if t_final > 0 else 0
    if nsteps == 0:
        return MomentMatrices(C0.copy(), B0.copy())
    h = t_final / nsteps
    dn = build_drift_noise(params)
    C = backend.rk4_lyapunov(dn.W, dn.F_N.astype(complex), params.Gamma, C0, h, nsteps)
    B = backend.rk4_lyapunov(dn.W, dn.F_M, params.Gamma, B0, h, nsteps)
    return MomentMatrices(C, B)
