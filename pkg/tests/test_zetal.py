import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from maassmean import arith
from maassmean.numkernel import DomainError, PoleError
from maassmean.specfun import gamma
from maassmean.zetal import (
    K_sw_n, L_delta, all_L_values, dirichlet_L, epsilon_factor, hurwitz_from_L, hurwitz_zeta,
    kloosterman_zeta, kloosterman_zeta_lerch, lerch_fe_residual, lerch_zeta, riemann_fe_residual,
    riemann_zeta,
)

ZETA_HALF = -1.4603545088095868
CATALAN = 0.915965594177219


def test_basel():
    assert abs(riemann_zeta(2) - math.pi ** 2 / 6) < 1e-14


def test_zeta_half():
    assert abs(riemann_zeta(0.5) - ZETA_HALF) < 1e-14


def test_zeta_pole():
    with pytest.raises(PoleError):
        riemann_zeta(1)


def test_riemann_fe_example():
    assert riemann_fe_residual(0.3 + 7j) < 1e-10


@given(st.floats(0.01, 0.99), st.floats(-60, 60))
def test_riemann_fe_strip(sr, si):
    assert riemann_fe_residual(complex(sr, si)) < 1e-10


@pytest.mark.parametrize("t", [100.0, 1000.0, 4999.0])
def test_zeta_high_on_critical_line(t):
    ref = complex(mp.zeta(mp.mpc(0.5, t)))
    assert abs(riemann_zeta(0.5 + 1j * t) - ref) < 1e-9 * max(1, abs(ref))


def test_hurwitz_examples():
    s = 0.4 + 2j
    assert abs(hurwitz_zeta(s, 1.0) - riemann_zeta(s)) < 1e-14
    assert abs(hurwitz_zeta(2, 0.5) - math.pi ** 2 / 2) < 1e-13
    s = 1 + 1e-6
    assert abs((s - 1) * hurwitz_zeta(s, 0.37) - 1) < 1e-4


@given(st.floats(-3, 3), st.floats(-40, 40), st.floats(0.02, 1.0))
def test_hurwitz_matches_mpmath(sr, si, w):
    s = complex(sr, si)
    if abs(s - 1) < 1e-3:
        return
    ref = complex(mp.zeta(s, w))
    assert abs(hurwitz_zeta(s, w) - ref) < 1e-11 * max(1, abs(ref))


def test_lerch_examples():
    assert abs(lerch_zeta(0.7 + 1j, 0.4, 3.0) - hurwitz_zeta(0.7 + 1j, 0.4)) < 1e-15
    assert abs(lerch_zeta(2, 1.0, 0.5) - math.pi ** 2 / 12) < 1e-13
    assert lerch_fe_residual(1.5, 0.3, 0.7) < 1e-10


@given(st.floats(2.0, 6.0), st.floats(0.05, 1.0), st.floats(0.05, 0.95))
def test_lerch_direct_series(sr, w, x):
    n = np.arange(200000)
    direct = np.sum(np.exp(2j * np.pi * x * n) * (n + w) ** -sr)
    assert abs(lerch_zeta(sr, w, x) - direct) < 1e-8


@given(st.floats(1.0, 2.0), st.floats(-5, 5), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_lerch_fe_property(sr, si, w, x):
    assert lerch_fe_residual(complex(sr, si), w, x) < 1e-10


def test_dirichlet_examples():
    s = 0.3 + 4j
    assert abs(dirichlet_L(s, arith.characters(1).characters[0]) - riemann_zeta(s)) < 1e-15
    tab = arith.characters(4)
    chi4 = tab.characters[tab.of_parity(1)[0]]
    assert abs(dirichlet_L(2, chi4) - CATALAN) < 1e-13


def test_principal_pole():
    with pytest.raises(PoleError):
        dirichlet_L(1, arith.characters(5).characters[0])


def test_convexity_scan():
    worst = max(np.max(np.abs(all_L_values(0.5, c))) / c ** 0.25 for c in range(1, 101))
    assert worst < 2.0


@pytest.mark.parametrize("c", [3, 4, 7, 10, 12, 20])
def test_hurwitz_inversion(c):
    s = 0.6 + 2.5j
    for a in range(1, c):
        if math.gcd(a, c) == 1:
            assert abs(hurwitz_from_L(s, a, c) - hurwitz_zeta(s, a / c)) < 1e-10


def test_k_at_one():
    s = 0.5 + 3j
    for sign in "+-":
        assert abs(kloosterman_zeta("character", sign, s, 1) - riemann_zeta(s)) < 1e-10


def test_k_series_vs_hurwitz():
    a = kloosterman_zeta("series", "+", 1.5, 5)
    b = kloosterman_zeta("hurwitz_fe", "+", 1.5, 5)
    assert abs(a - b) < 1e-9


def test_k_hurwitz_vs_character():
    a = kloosterman_zeta("hurwitz_fe", "-", 0.5, 7)
    b = kloosterman_zeta("character", "-", 0.5, 7)
    assert abs(a - b) < 1e-9


def test_k_dual_vs_hurwitz():
    s = -0.7 + 1.3j
    for c in (2, 6, 9):
        assert abs(kloosterman_zeta("dual", "+", s, c) - kloosterman_zeta("hurwitz_fe", "+", s, c)) < 1e-9


def test_k_lerch_route():
    s = 0.4 + 2j
    assert abs(kloosterman_zeta_lerch("-", s, 9) - kloosterman_zeta("hurwitz_fe", "-", s, 9)) < 1e-9


def test_k_strip_refused():
    with pytest.raises(DomainError):
        kloosterman_zeta("series", "+", 0.5, 5)
    with pytest.raises(PoleError):
        kloosterman_zeta("hurwitz_fe", "+", 1, 1)


def test_L_delta_examples():
    assert abs(L_delta(0, 1) - ZETA_HALF) < 1e-12
    assert L_delta(1, 1) == 0


def test_L_delta_bound_scan():
    worst = max(abs(L_delta(d, c)) / c ** 0.25 for d in (0, 1) for c in range(1, 201))
    assert worst < 2.0


@pytest.mark.parametrize("delta", [0, 1])
def test_L_delta_routes(delta):
    for c in range(1, 51):
        a = L_delta(delta, c, route="character")
        b = L_delta(delta, c, route="kloosterman")
        assert abs(a - b) < 1e-9


@pytest.mark.parametrize("m", [2, 3, 6])
def test_L_delta_gauss_twist(m):
    for c in range(1, 31):
        for delta in (0, 1):
            a = L_delta(delta, c, m, route="character", twist="gauss")
            b = L_delta(delta, c, m, route="kloosterman", twist="gauss")
            assert abs(a - b) < 1e-9
            if math.gcd(m, c) == 1:
                assert abs(a - L_delta(delta, c, m, route="character")) < 1e-12
            else:
                assert L_delta(delta, c, m) == 0


def test_epsilon_factor():
    assert abs(epsilon_factor(1, 0, 1)) < 1e-15
    assert epsilon_factor(1, 0) == 1
    assert epsilon_factor(-1, 1) == -1j
    assert epsilon_factor(1, 1) == 1j


def test_K_sw_n_examples():
    s, w = 0.5 + 1j, 1.3 - 0.4j
    ref = gamma(w) * 2 * cmath.cos(math.pi * w / 2) * riemann_zeta(s)
    assert abs(K_sw_n("+", s, w, 1) - ref) < 1e-13
    assert abs(K_sw_n("+", s, w, 2) - K_sw_n("-", s, w, 2)) < 1e-15


def test_K_sw_n_bound_scan():
    w = 2 + 5j
    scale = abs(gamma(w)) * math.cosh(math.pi * w.imag / 2)
    assert max(abs(K_sw_n(sg, 0.5, w, n)) / scale for sg in "+-" for n in range(1, 51)) < 4.0
