"""Log-log slopes, the CMI decay constant and the linearized CMI scaling-law fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_POINTS = 3


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of ``I = u / (v + Gamma*L)**(2b+2)``.

    The fit is linear in ``y = I**(-1/(2b+2))`` against ``x = Gamma*L``.
    """

    u: float
    v: float
    exponent_used: int
    r_squared: float
    residuals: tuple[float, ...]


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of ``I = A / R**b`` as a straight line in ``ln I``."""

    R: float
    amplitude: float
    r: float


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, np.ndarray]:
    """Intercept, slope, r-squared and residuals of ``y = a + b x``."""
    A = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (a + b * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(res**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return float(a), float(b), min(max(r2, 0.0), 1.0), res


def loglog_slope(L, values, decade: bool = True) -> float:
    """Least-squares slope of ``ln|value|`` against ``ln L``.

    With ``decade=True`` only points with ``L >= max(L) / 10`` are used.
    """
    L = np.asarray(L, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    if decade:
        keep = L >= L.max() / 10
        L, v = L[keep], v[keep]
    if L.size < 2 or np.unique(L).size < 2:
        raise ValueError("a slope needs at least two distinct L values")
    if np.any(v <= 0):
        raise ValueError("log-log slope needs nonzero values")
    return _linear_fit(np.log(L), np.log(v))[1]


def fit_cmi_decay(b_values, values) -> DecayFit:
    """Fit the exponential decay of CMI with middle-block size ``b``.

    ``R`` is fitted per parameter set; no functional form in the chain
    parameters is assumed. ``r`` is the correlation coefficient of
    ``ln I`` against ``b`` (negative for a decaying CMI).
    """
    b = np.asarray(b_values, dtype=float)
    v = np.asarray(values, dtype=float)
    if b.size < MIN_POINTS or np.unique(b).size < 2:
        raise ValueError(f"decay fit needs at least {MIN_POINTS} points over two distinct b")
    if np.any(~(v > 0)):
        raise ValueError("decay fit needs strictly positive CMI values")
    a, slope, _, _ = _linear_fit(b, np.log(v))
    r = float(np.corrcoef(b, np.log(v))[0, 1])
    return DecayFit(R=float(np.exp(-slope)), amplitude=float(np.exp(a)), r=r)


def fit_cmi_scaling(rows, b: int) -> ScalingFit:
    """Fit the CMI scaling law at middle-block size ``b``.

    ``rows`` are sweep rows (dicts with ``Gamma``, ``L``, ``cmi`` and
    optionally ``b`` and ``error``). Rows carrying an error or a different
    ``b`` are skipped.
    """
    b = int(b)
    if b < 0:
        raise ValueError("b must be >= 0")
    x, I = [], []
    for row in rows:
        if row.get("error"):
            continue
        if row.get("b") is not None and int(row["b"]) != b:
            continue
        x.append(float(row["Gamma"]) * float(row["L"]))
        I.append(float(row["cmi"]))
    if len(I) < MIN_POINTS:
        raise ValueError(f"scaling fit needs at least {MIN_POINTS} points, got {len(I)}")
    I = np.asarray(I)
    if np.any(~(I > 0)):
        raise ValueError("scaling fit needs strictly positive CMI values")
    p = 2 * b + 2
    y = I ** (-1.0 / p)
    alpha, beta, r2, res = _linear_fit(np.asarray(x), y)
    if not beta > 0:
        raise ValueError("fitted slope is not positive; data does not follow the scaling law")
    return ScalingFit(u=beta ** (-p), v=alpha / beta, exponent_used=p, r_squared=r2,
                      residuals=tuple(float(r) for r in res))
