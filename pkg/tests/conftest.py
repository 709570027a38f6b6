import math

import numpy as np
import pytest
from hypothesis import strategies as st

from bosonic_ness import BathSpec, ChainParams


def thermal(L, N1=2.0, NL=1.0, **kw):
    return ChainParams.thermal(L, N1, NL, **kw)


@st.composite
def chain_params(draw, L_max=12, squeezed=None, Gammas=None):
    """Random valid chains; ``squeezed`` None draws both kinds."""
    L = draw(st.integers(2, L_max))
    Gamma = draw(st.sampled_from(Gammas)) if Gammas else draw(st.floats(0, 2))
    lam = draw(st.floats(0.2, 2))
    gamma = draw(st.floats(0.2, 2))
    omega = draw(st.floats(0, 5))
    sq = draw(st.booleans()) if squeezed is None else squeezed

    def bath():
        nbar = draw(st.floats(0, 5))
        if not sq:
            return BathSpec(nbar)
        return BathSpec(nbar, draw(st.floats(0, 0.8)), draw(st.floats(0, 2 * math.pi - 1e-9)))

    return ChainParams(L, omega=omega, lam=lam, gamma=gamma, Gamma=Gamma,
                       bath_left=bath(), bath_right=bath())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
