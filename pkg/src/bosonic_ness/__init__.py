"""Non-equilibrium steady states of a boundary-driven bosonic chain.

Transport observables and Gaussian information measures (mutual information,
total correlations, conditional mutual information) of a harmonic chain
coupled to two boundary baths and, optionally, to self-consistent reservoirs
on every site.
"""

from bosonic_ness.params import BathSpec, ChainParams, DriftNoise, build_drift_noise, squeezing_to_moments
from bosonic_ness.ness import (
    MomentMatrices,
    SolverError,
    analytic_ness,
    analytic_ness_B,
    analytic_ness_C,
    evolve_transient,
    solve_lyapunov_dense,
    solve_self_consistent,
)

__version__ = "0.1.0"
