"""Numerical kernels: a Cython/quad-precision build with a pure-Python fallback."""
