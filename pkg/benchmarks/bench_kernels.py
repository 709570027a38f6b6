"""Compiled kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--sites 25] [--L 24] [--steps 200]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from bosonic_ness import ChainParams
from bosonic_ness._core import _fallback
from bosonic_ness.params import build_drift_noise
from bosonic_ness.tridiagonal import TridiagonalState

try:
    from bosonic_ness._core import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.2 and number < 10_000:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def cases(sites: int, L: int, steps: int):
    s = TridiagonalState.from_params(ChainParams.thermal(4 * sites, 15, 1, Gamma=0.1))
    k = 2 * sites - sites // 2
    A, B, C = np.arange(k - sites, k), np.arange(k, k + 1), np.arange(k + 1, k + 1 + sites)
    terms = [np.r_[A, B], np.r_[B, C], np.r_[A, B, C], B]
    weights = [1.0, 1.0, -1.0, -1.0]
    d, e = s.diag[: 2 * sites + 1], s.offdiag[: 2 * sites]
    dn = build_drift_noise(ChainParams.thermal(L, 2, 1, Gamma=0.2, omega=1.0))
    F = dn.F_N.astype(complex)
    X0 = np.zeros((L, L), complex)
    return {
        f"tridiag_eigvalsh ({2 * sites + 1} sites)": lambda m: m.tridiag_eigvalsh(d, e),
        f"signed_entropy_sum (CMI, {2 * sites + 1} sites)":
            lambda m: m.signed_entropy_sum(s.diag, s.offdiag, terms, weights),
        f"rk4_lyapunov (L={L}, {steps} steps)":
            lambda m: m.rk4_lyapunov(dn.W, F, 0.2, X0, 0.01, steps),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, default=12, help="block size on each side of the cut")
    ap.add_argument("--L", type=int, default=24)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; build it with `python3 setup.py build_ext --inplace`")
        return
    print(f"{'kernel':45s} {'compiled':>12s} {'fallback':>12s} {'speedup':>9s}")
    for name, run in cases(args.sites, args.L, args.steps).items():
        fast = best_of(lambda: run(_kernels), args.repeat)
        slow = best_of(lambda: run(_fallback), args.repeat)
        print(f"{name:45s} {fast * 1e3:10.3f}ms {slow * 1e3:10.3f}ms {slow / fast:8.1f}x")


if __name__ == "__main__":
    main()
