import importlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonic_ness._core import _fallback, backend

compiled = pytest.importorskip("bosonic_ness._core._kernels")

tridiagonals = st.integers(1, 14).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([0.0, 0.5, 1.0, 3.0, 8.0]) | st.floats(-5, 10), min_size=n, max_size=n),
    st.lists(st.sampled_from([0.0, -2.8, 1.0]) | st.floats(-3, 3), min_size=n - 1, max_size=n - 1)))


def dense(d, e):
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


def test_backend_prefers_compiled():
    assert backend.NAME == "compiled"


def test_pure_env_selects_fallback(monkeypatch):
    monkeypatch.setenv("BOSONIC_NESS_PURE", "1")
    try:
        mod = importlib.reload(backend)
        assert mod.NAME == "python"
        assert mod.signed_entropy_sum is _fallback.signed_entropy_sum
    finally:
        monkeypatch.delenv("BOSONIC_NESS_PURE")
        importlib.reload(backend)


@pytest.mark.parametrize("d,e", [([8.0, 8.0], [-2.8]), ([1.0, 1.0], [-2.8]),
                                 ([3.0, 3.0, 3.0], [1.0, 1.0]), ([0.0, 0.0], [-2.8])])
def test_tight_gershgorin_blocks(d, e):
    # equal diagonals make the Gershgorin bound exact; seeds land on its edge
    np.testing.assert_allclose(compiled.tridiag_eigvalsh(np.array(d), np.array(e)),
                               np.linalg.eigvalsh(dense(d, e)), atol=1e-13)


@given(tridiagonals)
@settings(max_examples=150, deadline=None)
def test_eigvalsh_matches_lapack(de):
    d, e = (np.array(x, dtype=float) for x in de)
    ref = np.linalg.eigvalsh(dense(d, e)) if d.size else np.array([])
    scale = 1 + np.abs(ref).max(initial=0)
    np.testing.assert_allclose(compiled.tridiag_eigvalsh(d, e), ref, atol=1e-13 * scale)


def test_eigvalsh_matches_fallback():
    rng = np.random.default_rng(3)
    d, e = rng.uniform(0, 4, 25), rng.uniform(-1, 1, 24)
    np.testing.assert_allclose(compiled.tridiag_eigvalsh(d, e), _fallback.tridiag_eigvalsh(d, e),
                               atol=1e-15, rtol=1e-15)


def test_signed_sum_matches_fallback_on_tiny_difference():
    # a CMI of a weakly correlated chain: four O(10) entropies cancelling to ~1e-19
    from bosonic_ness import ChainParams
    from bosonic_ness.tridiagonal import TridiagonalState
    s = TridiagonalState.from_params(ChainParams.thermal(40, 2, 1, Gamma=0.1))
    k, b = 16, 8
    A, B, C = np.arange(k), np.arange(k, k + b), np.arange(k + b, 40)
    terms = [np.r_[A, B], np.r_[B, C], np.r_[A, B, C], B]
    w = [1.0, 1.0, -1.0, -1.0]
    fast = compiled.signed_entropy_sum(s.diag, s.offdiag, terms, w)
    slow = _fallback.signed_entropy_sum(s.diag, s.offdiag, terms, w)
    assert 0 < slow < 1e-18
    assert fast == pytest.approx(slow, rel=1e-9)


def test_signed_sum_non_adjacent_sites():
    d = np.array([1.0, 2.0, 3.0])
    e = np.array([0.3, 0.4])
    # sites 1 and 3 are not neighbours, so the marginal is a product
    both = compiled.signed_entropy_sum(d, e, [np.array([0, 2])], [1.0])
    apart = compiled.signed_entropy_sum(d, e, [np.array([0]), np.array([2])], [1.0, 1.0])
    assert both == pytest.approx(apart, rel=1e-15)


@pytest.mark.parametrize("impl", [compiled, _fallback])
def test_signed_sum_validation(impl):
    with pytest.raises(ValueError):
        impl.signed_entropy_sum(np.ones(3), np.zeros(2), [np.array([1, 0])], [1.0])
    with pytest.raises(ValueError):
        impl.signed_entropy_sum(np.ones(3), np.zeros(2), [np.array([3])], [1.0])
    with pytest.raises(ValueError):
        impl.signed_entropy_sum(np.ones(3), np.zeros(2), [np.array([0])], [1.0, 2.0])
    with pytest.raises(ValueError):
        impl.tridiag_eigvalsh(np.ones(3), np.zeros(3))


def test_rk4_matches_fallback():
    from bosonic_ness.params import build_drift_noise
    from bosonic_ness import ChainParams
    dn = build_drift_noise(ChainParams.thermal(7, 2, 1, Gamma=0.3, omega=1.0))
    X0 = np.zeros((7, 7), complex)
    a = compiled.rk4_lyapunov(dn.W, dn.F_N.astype(complex), 0.3, X0, 0.05, 40)
    b = _fallback.rk4_lyapunov(dn.W, dn.F_N.astype(complex), 0.3, X0, 0.05, 40)
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_rk4_shape_check():
    with pytest.raises(ValueError):
        compiled.rk4_lyapunov(np.eye(2, dtype=complex), np.eye(3, dtype=complex), 0.0,
                              np.eye(2, dtype=complex), 0.1, 1)
