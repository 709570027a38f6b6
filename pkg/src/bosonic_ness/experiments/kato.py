"""Local-equilibrium bound from single-site-conditioned CMIs."""

from __future__ import annotations

import numpy as np

from bosonic_ness import gaussian, tridiagonal
from bosonic_ness.gaussian import Partition
from bosonic_ness.ness import analytic_ness
from bosonic_ness.params import ChainParams


def kato_bound(params: ChainParams, window: int | None = None) -> tuple[float, float]:
    """``(epsilon, epsilon * L)`` with epsilon the largest single-site-conditioned CMI.

    ``I_k = I({1..k-1} : {k+1..L} | {k})`` over ``k = 2..L-1``.
    """
    L = params.L
    if L < 4:
        raise ValueError(f"Kato bound needs L >= 4, got {L}")
    if not params.squeezed:
        eps = float(np.max(tridiagonal.local_cmis(tridiagonal.TridiagonalState.from_params(params),
                                                  window)))
    else:
        cm = gaussian.assemble_cm(analytic_ness(params))
        eps = max(gaussian.conditional_mutual_information(cm, Partition.tripartition(L, k - 1, 1))
                  for k in range(2, L))
    return eps, eps * L
