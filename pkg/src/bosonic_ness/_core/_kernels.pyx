# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Quad-precision kernels for number-conserving Gaussian entropies.

Eigenvalues of real symmetric tridiagonal matrices are refined in
``__float128`` by a Newton iteration safeguarded with Sturm counts; entropies are accumulated in the
same precision so that signed sums of large, nearly cancelling entropies
(conditional mutual information of weakly correlated blocks) keep their
significant digits.
"""

import numpy as np
cimport numpy as cnp

from libc.stdlib cimport malloc, free
from scipy.linalg.cython_lapack cimport dstev

cnp.import_array()


cdef extern from "quadmath.h":
    ctypedef long double f128 "__float128"
    f128 logq(f128) nogil
    f128 log1pq(f128) nogil
    f128 fabsq(f128) nogil
    f128 sqrtq(f128) nogil


cdef f128 EPS_Q = <f128>1.9259299443872359e-34
cdef int MAX_ITER = 400


cdef int _count_and_logderiv(const f128* d, const f128* e2, int n, f128 x,
                             f128 pivmin, f128* logderiv) noexcept nogil:
    """Sturm count below ``x`` and d/dx ln det(T - x) from the LDL recurrence.

    The derivative is reported as 0 (no Newton step) when a pivot had to be
    clamped, since ``x`` then sits on a pole of the recurrence.
    """
    cdef int i, count = 0, clamped = 0
    cdef f128 q, dq, s
    q = d[0] - x
    dq = -1
    if fabsq(q) < pivmin:
        q = -pivmin
        clamped = 1
    if q < 0:
        count += 1
    s = dq / q
    for i in range(1, n):
        dq = -1 + e2[i - 1] * dq / (q * q)
        q = d[i] - x - e2[i - 1] / q
        if fabsq(q) < pivmin:
            q = -pivmin
            clamped = 1
        if q < 0:
            count += 1
        s += dq / q
    logderiv[0] = 0 if clamped else s
    return count


cdef void _eigvals_block(const f128* d, const f128* e2, int n, f128* out,
                         double* dwork, double* ework) noexcept nogil:
    """All eigenvalues (ascending) of one unreduced tridiagonal block.

    Double-precision LAPACK estimates seed a Newton iteration on the
    characteristic polynomial, safeguarded by a Sturm-count bracket.
    """
    cdef int i, k, it, info = 0, one = 1, cnt
    cdef char jobz = b'N'
    cdef f128 lo, hi, a, b, x, xn, tnorm, tau, pivmin = <f128>1e-300, ld
    if n == 1:
        out[0] = d[0]
        return
    lo = d[0]
    hi = d[0]
    for i in range(n):
        a = 0
        if i > 0:
            a += sqrtq(e2[i - 1])
        if i < n - 1:
            a += sqrtq(e2[i])
        if d[i] - a < lo:
            lo = d[i] - a
        if d[i] + a > hi:
            hi = d[i] + a
        dwork[i] = <double>d[i]
        if i < n - 1:
            ework[i] = <double>sqrtq(e2[i])
    tnorm = fabsq(lo) if fabsq(lo) > fabsq(hi) else fabsq(hi)
    lo -= 2 * EPS_Q * tnorm + 2 * pivmin
    hi += 2 * EPS_Q * tnorm + 2 * pivmin
    dstev(&jobz, &n, dwork, ework, NULL, &one, NULL, &info)
    for k in range(n):
        if info == 0:
            x = dwork[k]
            tau = <f128>(64 * 2.220446049250313e-16) * tnorm + pivmin
            while True:
                a = x - tau
                b = x + tau
                if a < lo:
                    a = lo
                if b > hi:
                    b = hi
                if ((a == lo or _count_and_logderiv(d, e2, n, a, pivmin, &ld) <= k) and
                        (b == hi or _count_and_logderiv(d, e2, n, b, pivmin, &ld) > k)):
                    break
                tau *= 16
        else:
            a = lo
            b = hi
            x = (a + b) / 2
        if x <= a or x >= b:
            x = (a + b) / 2
        for it in range(MAX_ITER):
            cnt = _count_and_logderiv(d, e2, n, x, pivmin, &ld)
            if cnt > k:
                b = x
            else:
                a = x
            if ld != 0:
                xn = x - 1 / ld
                if fabsq(xn - x) <= 4 * EPS_Q * fabsq(x) + pivmin:
                    x = xn
                    break
            else:
                xn = (a + b) / 2
            if xn <= a or xn >= b:
                xn = (a + b) / 2
            if b - a <= 4 * EPS_Q * (fabsq(a) + fabsq(b)) + pivmin:
                x = xn
                break
            x = xn
        out[k] = x


cdef f128 _g(f128 c) noexcept nogil:
    # (c+1) ln(c+1) - c ln c, the entropy of a mode with occupation c
    if c <= 0:
        return 0
    return (c + 1) * log1pq(c) - c * logq(c)


cdef struct Work:
    f128* d
    f128* e2
    f128* ev
    double* dw
    double* ew


cdef int _alloc(Work* w, int n) noexcept nogil:
    n = n + 1
    w.d = <f128*>malloc(n * sizeof(f128))
    w.e2 = <f128*>malloc(n * sizeof(f128))
    w.ev = <f128*>malloc(n * sizeof(f128))
    w.dw = <double*>malloc(n * sizeof(double))
    w.ew = <double*>malloc(n * sizeof(double))
    return w.d != NULL and w.e2 != NULL and w.ev != NULL and w.dw != NULL and w.ew != NULL


cdef void _release(Work* w) noexcept nogil:
    free(w.d)
    free(w.e2)
    free(w.ev)
    free(w.dw)
    free(w.ew)


cdef void _eigvals_split(Work* w, int m) noexcept nogil:
    # w.d / w.e2 hold an m x m tridiagonal; split at exact zero couplings
    cdef int i, start = 0
    for i in range(m):
        if i == m - 1 or w.e2[i] == 0:
            _eigvals_block(w.d + start, w.e2 + start, i - start + 1,
                           w.ev + start, w.dw, w.ew)
            start = i + 1


def _as_arrays(diag, offdiag):
    d = np.ascontiguousarray(diag, dtype=np.float64)
    o2 = np.ascontiguousarray(np.abs(np.asarray(offdiag)) ** 2, dtype=np.float64)
    if d.ndim != 1 or o2.ndim != 1:
        raise ValueError("diag and offdiag must be one-dimensional")
    if o2.shape[0] != max(d.shape[0] - 1, 0):
        raise ValueError("offdiag must have length len(diag) - 1")
    return d, o2


def tridiag_eigvalsh(diag, offdiag):
    """Eigenvalues of a Hermitian tridiagonal matrix, computed in quad precision.

    Only ``|offdiag|`` enters, so complex off-diagonals are accepted.
    Returns the eigenvalues rounded to double, ascending.
    """
    cdef cnp.ndarray[double, ndim=1] d, o2
    d, o2 = _as_arrays(diag, offdiag)
    cdef int n = d.shape[0], i
    out = np.empty(n)
    if n == 0:
        return out
    cdef double[::1] ov = out
    cdef Work w
    if not _alloc(&w, n):
        _release(&w)
        raise MemoryError()
    try:
        for i in range(n):
            w.d[i] = d[i]
            w.e2[i] = o2[i] if i < n - 1 else 0
        _eigvals_split(&w, n)
        for i in range(n):
            ov[i] = <double>w.ev[i]
    finally:
        _release(&w)
    out.sort()
    return out


def signed_entropy_sum(diag, offdiag, terms, weights):
    """Return ``sum_t weights[t] * S(sites_t)`` accumulated in quad precision.

    ``diag`` and ``offdiag`` describe the full tridiagonal correlation matrix
    ``C``; each entry of ``terms`` is a sorted array of 0-based site indices.
    The reduced matrix of a site set is again tridiagonal, with a zero
    coupling wherever two retained sites are not adjacent.
    """
    cdef cnp.ndarray[double, ndim=1] d, o2
    d, o2 = _as_arrays(diag, offdiag)
    if len(terms) != len(weights):
        raise ValueError("terms and weights differ in length")
    cdef int n = d.shape[0], m, i, t
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx
    cdef f128 total = 0, s
    cdef Work w
    if not _alloc(&w, n):
        _release(&w)
        raise MemoryError()
    try:
        for t in range(len(terms)):
            idx = np.ascontiguousarray(terms[t], dtype=np.int64)
            m = idx.shape[0]
            if m == 0:
                continue
            if idx[0] < 0 or idx[m - 1] >= n or (m > 1 and np.any(np.diff(idx) <= 0)):
                raise ValueError("site indices must be sorted, unique and in range")
            for i in range(m):
                w.d[i] = d[idx[i]]
                if i < m - 1:
                    w.e2[i] = o2[idx[i]] if idx[i + 1] == idx[i] + 1 else 0
            _eigvals_split(&w, m)
            s = 0
            for i in range(m):
                s += _g(w.ev[i])
            total += <f128>(<double>weights[t]) * s
    finally:
        _release(&w)
    return <double>total



cdef void _lyap_rhs(const double complex[:, ::1] W, const double complex[:, ::1] F,
                    double Gamma, const double complex[:, ::1] X,
                    double complex[:, ::1] out, Py_ssize_t band) noexcept nogil:
    # W has nonzeros only within ``band`` of the diagonal
    cdef Py_ssize_t L = W.shape[0], i, j, k, lo, hi
    cdef double complex acc
    for i in range(L):
        lo = i - band if i >= band else 0
        hi = i + band + 1 if i + band + 1 <= L else L
        for j in range(L):
            acc = F[i, j]
            for k in range(lo, hi):
                acc = acc + W[i, k] * X[k, j]
            if i != j:
                acc = acc - Gamma * X[i, j]
            out[i, j] = acc
    for j in range(L):
        lo = j - band if j >= band else 0
        hi = j + band + 1 if j + band + 1 <= L else L
        for i in range(L):
            acc = 0
            for k in range(lo, hi):
                acc = acc + X[i, k] * W[j, k].conjugate()
            out[i, j] = out[i, j] + acc


def rk4_lyapunov(W, F, double Gamma, X0, double h, long nsteps):
    """Integrate ``dX/dt = W X + X W^dag + F - Gamma * offdiag(X)`` with RK4.

    Banded ``W`` (the chain's drift is tridiagonal) costs O(L^2) per step.
    """
    Wa = np.ascontiguousarray(W, dtype=np.complex128)
    cdef double complex[:, ::1] Wv = Wa
    cdef double complex[:, ::1] Fv = np.ascontiguousarray(F, dtype=np.complex128)
    X = np.array(X0, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] Xv = X
    cdef Py_ssize_t L = Xv.shape[0], i, j, band = 0
    cdef long s
    if Wa.shape != (L, L) or Fv.shape[0] != L or Fv.shape[1] != L:
        raise ValueError("W, F and X0 must share one square shape")
    rows, cols = np.nonzero(Wa)
    if rows.size:
        band = int(np.max(np.abs(rows - cols)))
    k1a = np.empty((L, L), dtype=np.complex128)
    k2a = np.empty((L, L), dtype=np.complex128)
    k3a = np.empty((L, L), dtype=np.complex128)
    k4a = np.empty((L, L), dtype=np.complex128)
    tma = np.empty((L, L), dtype=np.complex128)
    cdef double complex[:, ::1] k1 = k1a, k2 = k2a, k3 = k3a, k4 = k4a, tmp = tma
    with nogil:
        for s in range(nsteps):
            _lyap_rhs(Wv, Fv, Gamma, Xv, k1, band)
            for i in range(L):
                for j in range(L):
                    tmp[i, j] = Xv[i, j] + 0.5 * h * k1[i, j]
            _lyap_rhs(Wv, Fv, Gamma, tmp, k2, band)
            for i in range(L):
                for j in range(L):
                    tmp[i, j] = Xv[i, j] + 0.5 * h * k2[i, j]
            _lyap_rhs(Wv, Fv, Gamma, tmp, k3, band)
            for i in range(L):
                for j in range(L):
                    tmp[i, j] = Xv[i, j] + h * k3[i, j]
            _lyap_rhs(Wv, Fv, Gamma, tmp, k4, band)
            for i in range(L):
                for j in range(L):
                    Xv[i, j] = Xv[i, j] + h / 6.0 * (k1[i, j] + 2 * k2[i, j] + 2 * k3[i, j] + k4[i, j])
    return X
