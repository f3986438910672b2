import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosshex.errors import DimensionMismatch, NonConvergent
from crosshex.theta import (
    PeriodMatrix,
    ScaledComplex,
    quasi_period_factor,
    quasi_period_factor_scaled,
    theta_eval,
    theta_eval_scaled,
    theta_zero_1d,
)


def _random_pm(rng, g):
    if g == 1:
        return PeriodMatrix(complex(-rng.uniform(3.0, 8.0), rng.uniform(-2.0, 2.0)))
    m = rng.normal(size=(g, g))
    re = -(m @ m.T + g * np.eye(g))
    im = rng.normal(size=(g, g))
    return PeriodMatrix(re + 0.5j * (im + im.T))


def _rel_diff(a: ScaledComplex, b: ScaledComplex) -> float:
    return abs(a.over(b).as_complex() - 1.0)


def test_value_at_zero_matches_independent_direct_sum():
    # oracle: the plain series summed term by term over a wide window;
    # for B = -2*pi the terms are exp(-pi n^2)
    direct = sum(math.exp(-math.pi * n * n) for n in range(-30, 31))
    val = theta_eval(PeriodMatrix(-2.0 * math.pi), 0.0)
    assert abs(val - direct) <= 1e-12
    assert abs(val - 1.0864348112133082) <= 5e-15  # frozen from the sum above


def test_parity_periodicity_quasi_periodicity_100_draws():
    rng = np.random.default_rng(2)
    for i in range(100):
        g = 1 if i % 2 == 0 else 2
        pm = _random_pm(rng, g)
        z = rng.normal(0, 2, g) + 1j * rng.normal(0, 2, g)
        m = rng.integers(-3, 4, g)
        n = rng.integers(-3, 4, g)
        t0 = theta_eval_scaled(pm, z)
        assert _rel_diff(theta_eval_scaled(pm, -z), t0) <= 1e-9
        assert _rel_diff(theta_eval_scaled(pm, z + 2j * math.pi * m), t0) <= 1e-9
        shifted = theta_eval_scaled(pm, z + 2j * math.pi * m + pm.matrix @ n)
        predicted = t0.times(quasi_period_factor_scaled(pm, z, m, n))
        assert _rel_diff(shifted, predicted) <= 1e-9


def test_quasi_period_factor_plain_matches_scaled():
    pm = PeriodMatrix(-4.5)
    z = np.array([0.3 + 0.7j])
    plain = quasi_period_factor(pm, z, [2], [1])
    scaled = quasi_period_factor_scaled(pm, z, [2], [1]).as_complex()
    assert abs(plain - scaled) <= 1e-12 * abs(plain)


def test_truncation_stable_under_forced_extra_shells():
    pm = PeriodMatrix(-5.0)
    rng = np.random.default_rng(3)
    for _ in range(20):
        z = complex(rng.normal(0, 4), rng.normal(0, 4))
        a = theta_eval_scaled(pm, [z])
        b = theta_eval_scaled(pm, [z], min_shells=8)
        assert _rel_diff(a, b) <= 1e-12


def test_truncation_survives_phase_resonant_shell():
    # at this argument one shell's two terms sit at opposite phases and
    # cancel to machine noise while the next shell still carries weight
    # ~1e-5 of the total; an adaptive rule that trusts a single quiet
    # shell returns a value wrong in the fifth digit
    pm = PeriodMatrix(-6.0)
    z = [12.0 + 2.5j * math.pi]
    adaptive = theta_eval_scaled(pm, z)
    forced = theta_eval_scaled(pm, z, min_shells=10)
    assert _rel_diff(adaptive, forced) <= 1e-12


def test_zero_of_genus_one_theta():
    for b in (-2.0 * math.pi, -6.0, complex(-5.0, 1.3)):
        pm = PeriodMatrix(b)
        z0 = theta_zero_1d(pm)
        assert abs(z0 - (1j * math.pi + complex(b) / 2.0)) <= 1e-8
        at_zero = theta_eval_scaled(pm, [z0])
        at_origin = theta_eval_scaled(pm, 0.0)
        assert at_zero.log_abs - at_origin.log_abs <= math.log(1e-10)


@pytest.mark.parametrize(
    "bad",
    [
        np.array([[-4.0, 0.3], [0.2, -5.0]]),  # not symmetric
        np.array([[1.0]]),  # real part not negative definite
        np.array([[-4.0, -3.9], [-3.9, -0.1]]),  # indefinite real part
    ],
)
def test_period_matrix_validation(bad):
    with pytest.raises(ValueError):
        PeriodMatrix(bad)


def test_argument_length_must_match_genus():
    pm = PeriodMatrix(np.diag([-4.0, -5.0]))
    with pytest.raises(DimensionMismatch):
        theta_eval(pm, [1.0])


def test_eps_bounds():
    pm = PeriodMatrix(-4.0)
    with pytest.raises(ValueError):
        theta_eval(pm, 0.0, eps=0.0)
    with pytest.raises(ValueError):
        theta_eval(pm, 0.0, eps=0.5)


def test_quasi_period_shift_must_be_integral():
    pm = PeriodMatrix(-4.0)
    with pytest.raises(ValueError):
        quasi_period_factor(pm, [0.1], [0.5], [1])


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(min_value=-4, max_value=4),
    m=st.integers(min_value=-4, max_value=4),
    zr=st.floats(min_value=-3, max_value=3),
    zi=st.floats(min_value=-3, max_value=3),
)
def test_quasi_periodicity_is_exact_in_the_exponent(n, m, zr, zi):
    pm = PeriodMatrix(-4.7)
    z = np.array([complex(zr, zi)])
    lhs = theta_eval_scaled(pm, z + 2j * math.pi * np.array([m]) + pm.matrix @ np.array([n]))
    rhs = theta_eval_scaled(pm, z).times(quasi_period_factor_scaled(pm, z, [m], [n]))
    assert abs(lhs.over(rhs).as_complex() - 1.0) <= 1e-9


class TestScaledComplex:
    def test_round_trip_is_exact_for_plain_values(self):
        for w in (1.375 - 2.5j, 3.0, -1e7 + 1e-7j, 0j):
            assert ScaledComplex.from_complex(w).as_complex() == complex(w)

    def test_times_over_plus_match_plain_arithmetic(self):
        a = ScaledComplex.from_complex(1.2 - 0.7j)
        b = ScaledComplex.from_complex(-0.4 + 2.1j)
        assert abs(a.times(b).as_complex() - (1.2 - 0.7j) * (-0.4 + 2.1j)) < 1e-14
        assert abs(a.over(b).as_complex() - (1.2 - 0.7j) / (-0.4 + 2.1j)) < 1e-14
        assert abs(a.plus(b).as_complex() - (0.8 + 1.4j)) < 1e-14

    def test_times_accepts_plain_complex(self):
        a = ScaledComplex.from_complex(2.0 + 1.0j)
        assert abs(a.times(3.0).as_complex() - (6.0 + 3.0j)) < 1e-14

    def test_huge_and_tiny_magnitudes_survive(self):
        big = ScaledComplex(1.0 + 0j, 5000.0)
        tiny = ScaledComplex(1.0 + 0j, -5000.0)
        assert big.times(tiny).as_complex() == pytest.approx(1.0)
        assert big.as_complex() == math.inf  # saturates, never raises
        assert tiny.as_complex() == 0j

    def test_plus_aligns_scales(self):
        a = ScaledComplex(1.0 + 0j, 100.0)
        b = ScaledComplex(1.0 + 0j, 98.0)
        expected = 1.0 + math.exp(-2.0)
        got = a.plus(b)
        assert abs(got.log_abs - (100.0 + math.log(expected))) < 1e-12

    def test_times_exp_carries_real_part_into_scale(self):
        a = ScaledComplex.one().times_exp(complex(800.0, 0.25))
        assert a.log_abs == pytest.approx(800.0)
        assert cmath.phase(a.mantissa) == pytest.approx(0.25)


def test_shell_cap_raises_nonconvergent():
    # a barely-negative-definite real part makes the series decay so
    # slowly that the shell cap triggers before the tail test
    pm = PeriodMatrix(-1e-8)
    with pytest.raises(NonConvergent):
        theta_eval(pm, [30.0])
