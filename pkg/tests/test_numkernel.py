import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maassmean.numkernel import (
    DivergenceError, PrecisionPolicy, QuadratureError, SeriesBudget, gaussian_half_width,
    integrate_line, pairwise_sum, sum_compensated, tail_estimate,
)

SQRT_PI = math.sqrt(math.pi)


def gauss(t):
    return np.exp(-t * t)


def test_gaussian_integral():
    assert abs(integrate_line(gauss, 0.0, 8.0) - SQRT_PI) < 1e-13


def test_completed_square():
    v = integrate_line(lambda t: np.exp(-t * t + 2j * t), 0.0, 9.0)
    assert abs(v - SQRT_PI / math.e) < 1e-13


@pytest.mark.parametrize("offset", [0.0, 0.5, 1.0])
def test_cauchy_invariance(offset):
    assert abs(integrate_line(gauss, offset, 9.0) - SQRT_PI) < 1e-12


def test_error_is_reported():
    v, err = integrate_line(gauss, 0.0, 8.0, return_error=True)
    assert err < 1e-12 and abs(v - SQRT_PI) < 1e-13


def test_quadrature_failure_carries_estimates():
    with pytest.raises(QuadratureError) as exc:
        integrate_line(lambda t: np.exp(1j * 500 * t * t), 0.0, 50.0, order=4, max_panels=64)
    assert exc.value.previous != exc.value.last


def test_half_width_covers_gaussian():
    hw = gaussian_half_width(2.0, 1e-12)
    assert math.exp(-(hw / 2.0) ** 2) < 1e-12


def test_sum_ten_ones():
    assert sum_compensated([1.0] * 10) == 10


def test_alternating_harmonic():
    n = np.arange(1, 10 ** 6 + 1, dtype=float)
    terms = np.where(n % 2 == 1, 1.0, -1.0) / n
    assert abs(sum_compensated(terms) - math.log(2)) < 1e-6


def test_empty_sum():
    assert sum_compensated([]) == 0


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=200), st.randoms())
def test_sum_permutation_stable(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    a, b = sum_compensated(xs), sum_compensated(ys)
    assert abs(a - b) <= 1e-13 * max(1.0, sum(abs(x) for x in xs))


def test_sum_complex_permutation():
    rng = np.random.default_rng(3)
    z = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    assert sum_compensated(z) == sum_compensated(rng.permutation(z))


def test_pairwise_is_deterministic():
    a = np.random.default_rng(1).normal(size=(3, 37))
    assert np.array_equal(pairwise_sum(a), pairwise_sum(a.copy()))
    assert np.allclose(pairwise_sum(a), a.sum(axis=1))


def test_tail_geometric():
    B = 10
    part = lambda N: sum(0.5 ** n for n in range(1, N + 1))
    true_tail = 0.5 ** (2 * B)
    est = tail_estimate(part(B), part(2 * B), decay_exponent_hint=1.0)
    assert est >= abs(part(2 * B) - part(B))
    assert true_tail / 2 <= est or est >= true_tail


def test_tail_zeta2():
    part = lambda N: math.fsum(1.0 / n ** 2 for n in range(1, N + 1))
    est = tail_estimate(part(1000), part(2000), decay_exponent_hint=1.0)
    assert abs(est - 5e-4) < 5e-5
    assert 0.5 / 2000 < est < 2 / 2000


def test_tail_identical():
    assert tail_estimate(1.5, 1.5) == 0


def test_tail_divergence():
    with pytest.raises(DivergenceError):
        tail_estimate(2.0, 4.0, 1.0, partial_at_half_B=1.5)


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False),
       st.complex_numbers(max_magnitude=1e6, allow_nan=False),
       st.floats(0.1, 5))
def test_tail_never_below_increment(a, b, p):
    assert tail_estimate(a, b, p) >= abs(b - a) * (1 - 1e-15)


def test_policy_invariants():
    with pytest.raises(ValueError):
        PrecisionPolicy(working_digits=10)
    with pytest.raises(ValueError):
        PrecisionPolicy(target_tol=0)
    with pytest.raises(ValueError):
        PrecisionPolicy(working_digits=30, max_digits=20)
    assert PrecisionPolicy().escalated().working_digits == 30


def test_budget_invariants():
    with pytest.raises(ValueError):
        SeriesBudget(c_max=0)
    with pytest.raises(ValueError):
        SeriesBudget(contour_offset=1.5)
    assert SeriesBudget(tail_mode="fixed").tail_mode.value == "fixed"
