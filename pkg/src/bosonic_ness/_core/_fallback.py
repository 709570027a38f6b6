"""Pure-Python implementations of the compiled kernels.

Entropies use mpmath at 34 significant digits (the precision of IEEE quad),
so results agree with the compiled path; they are much slower.
"""

import mpmath
import numpy as np

_DPS = 34


def _as_arrays(diag, offdiag):
    d = np.ascontiguousarray(diag, dtype=np.float64)
    o2 = np.ascontiguousarray(np.abs(np.asarray(offdiag)) ** 2, dtype=np.float64)
    if d.ndim != 1 or o2.ndim != 1:
        raise ValueError("diag and offdiag must be one-dimensional")
    if o2.shape[0] != max(d.shape[0] - 1, 0):
        raise ValueError("offdiag must have length len(diag) - 1")
    return d, o2


def _eigvals_mp(d, o2, idx):
    m = len(idx)
    T = mpmath.zeros(m, m)
    for i in range(m):
        T[i, i] = mpmath.mpf(d[idx[i]])
        if i < m - 1 and idx[i + 1] == idx[i] + 1:
            e = mpmath.sqrt(mpmath.mpf(o2[idx[i]]))
            T[i, i + 1] = T[i + 1, i] = e
    if m == 1:
        return [T[0, 0]]
    return list(mpmath.eigsy(T, eigvals_only=True))


def _g(c):
    if c <= 0:
        return mpmath.mpf(0)
    return (c + 1) * mpmath.log1p(c) - c * mpmath.log(c)


def tridiag_eigvalsh(diag, offdiag):
    d, o2 = _as_arrays(diag, offdiag)
    if d.shape[0] == 0:
        return np.zeros(0)
    with mpmath.workdps(_DPS):
        ev = _eigvals_mp(d, o2, np.arange(d.shape[0]))
        return np.sort(np.array([float(x) for x in ev]))


def signed_entropy_sum(diag, offdiag, terms, weights):
    d, o2 = _as_arrays(diag, offdiag)
    if len(terms) != len(weights):
        raise ValueError("terms and weights differ in length")
    n = d.shape[0]
    with mpmath.workdps(_DPS):
        total = mpmath.mpf(0)
        for idx, w in zip(terms, weights):
            idx = np.asarray(idx, dtype=np.int64)
            if idx.size == 0:
                continue
            if idx[0] < 0 or idx[-1] >= n or np.any(np.diff(idx) <= 0):
                raise ValueError("site indices must be sorted, unique and in range")
            total += mpmath.mpf(float(w)) * mpmath.fsum(_g(c) for c in _eigvals_mp(d, o2, idx))
        return float(total)


def rk4_lyapunov(W, F, Gamma, X0, h, nsteps):
    W = np.asarray(W, dtype=complex)
    F = np.asarray(F, dtype=complex)
    Wd = W.conj().T
    keep = 1.0 - np.eye(W.shape[0])

    def rhs(X):
        return W @ X + X @ Wd + F - Gamma * keep * X

    X = np.array(X0, dtype=complex, copy=True)
    for _ in range(int(nsteps)):
        k1 = rhs(X)
        k2 = rhs(X + 0.5 * h * k1)
        k3 = rhs(X + 0.5 * h * k2)
        k4 = rhs(X + h * k3)
        X = X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return X
