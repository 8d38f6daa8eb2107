"""Special-function checks against an independent quadrature oracle."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from rsmiso.numerics import (
    EULER_GAMMA,
    SpecialFnConfig,
    binomial,
    exp_integral_e1,
    phi,
    upper_incomplete_gamma,
)


def e1_quad(x: float) -> float:
    """Adaptive quadrature of the defining integral (independent oracle)."""
    val, _ = quad(lambda t: math.exp(-x * t) / t, 1.0, np.inf, limit=300)
    return val


def phi_quad(x: float) -> float:
    """phi oracle in overflow-safe form: integral of e^(-s/x)/(1+s) over [0, inf)."""
    val, _ = quad(lambda s: math.exp(-s / x) / (1.0 + s), 0.0, np.inf, limit=300)
    return val


class TestExpIntegral:
    def test_frozen_values(self):
        # frozen from the quadrature oracle
        assert exp_integral_e1(1.0) == pytest.approx(0.2193839, abs=1e-7)
        assert exp_integral_e1(2.0) == pytest.approx(0.0489005, abs=1e-7)

    @pytest.mark.parametrize("x", [0.05, 0.3, 0.9, 1.0, 1.1, 3.0, 10.0, 40.0])
    def test_against_quadrature(self, x):
        assert exp_integral_e1(x) == pytest.approx(e1_quad(x), rel=1e-10)

    def test_leading_asymptotic(self):
        # E1(x) ~ e^(-x)/x: ratio within 2% at x = 50
        x = 50.0
        assert exp_integral_e1(x) * x * math.exp(x) == pytest.approx(1.0, rel=0.02)

    def test_strictly_decreasing(self):
        grid = np.logspace(-2, 2, 60)
        vals = [exp_integral_e1(float(x)) for x in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            exp_integral_e1(0.0)
        with pytest.raises(ValueError):
            exp_integral_e1(-1.0)


class TestPhi:
    def test_frozen_value(self):
        # e^2 * E1(2), frozen from the quadrature oracle
        assert phi(0.5) == pytest.approx(0.361328, abs=1e-6)

    def test_high_argument_asymptote(self):
        # phi(x) -> ln(x) - gamma; the first correction term is
        # (1 + ln x - gamma)/x, which at x = 1000 is 1.16e-3 relative
        target = -EULER_GAMMA + math.log(1000.0)
        rel = abs(phi(1000.0) - target) / target
        assert rel < 2e-3
        correction = (1.0 + math.log(1000.0) - EULER_GAMMA) / 1000.0
        assert phi(1000.0) - target == pytest.approx(correction, rel=0.01)

    def test_small_argument_asymptote(self):
        # phi(x) = x(1 - x + 2x^2 - ...)
        assert phi(1e-4) / 1e-4 == pytest.approx(1.0, abs=1e-3)

    def test_grid_against_quadrature(self):
        for x in np.logspace(-3, 6, 28):
            oracle = phi_quad(float(x))
            assert abs(phi(float(x)) - oracle) / oracle < 1e-9

    def test_domain(self):
        with pytest.raises(ValueError):
            phi(0.0)


class TestUpperIncompleteGamma:
    def test_identities(self):
        assert upper_incomplete_gamma(1, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-14)
        assert upper_incomplete_gamma(0, 1.0) == pytest.approx(exp_integral_e1(1.0), rel=1e-14)

    def test_negative_order_frozen(self):
        # (Gamma(0,1) - e^-1)/(-1) with E1 from the quadrature oracle
        oracle = (e1_quad(1.0) - math.exp(-1.0)) / (-1.0)
        assert upper_incomplete_gamma(-1, 1.0) == pytest.approx(0.148496, abs=1e-6)
        assert upper_incomplete_gamma(-1, 1.0) == pytest.approx(oracle, rel=1e-10)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 5.0])
    def test_recurrence_consistency(self, a):
        # r*Gamma(r,a) + a^r e^-a = Gamma(r+1,a) down to r = -5
        for r in range(-5, 2):
            lhs = r * upper_incomplete_gamma(r, a) + a ** r * math.exp(-a)
            rhs = upper_incomplete_gamma(r + 1, a)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-300)

    def test_positive_orders_against_scipy(self):
        from scipy.special import gammaincc, gamma as gamma_fn
        for r in (1, 2, 3, 7):
            for a in (0.3, 1.0, 4.0):
                oracle = gammaincc(r, a) * gamma_fn(r)
                assert upper_incomplete_gamma(r, a) == pytest.approx(oracle, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            upper_incomplete_gamma(0, 0.0)
        with pytest.raises(ValueError):
            upper_incomplete_gamma(0, -1.0)


class TestBinomial:
    def test_values(self):
        assert binomial(5, 2) == 10
        assert binomial(7, 3) == 35
        assert binomial(9, 0) == 1
        assert binomial(62, 31) == math.comb(62, 31)

    def test_domain(self):
        with pytest.raises(ValueError):
            binomial(3, 4)
        with pytest.raises(ValueError):
            binomial(-1, 0)


class TestConfig:
    def test_validation(self):
        SpecialFnConfig()  # defaults are legal
        with pytest.raises(ValueError):
            SpecialFnConfig(rel_tolerance=1e-3)
        with pytest.raises(ValueError):
            SpecialFnConfig(rel_tolerance=0.0)
        with pytest.raises(ValueError):
            SpecialFnConfig(max_terms=5)

    def test_config_is_honoured(self):
        loose = SpecialFnConfig(rel_tolerance=1e-6, max_terms=10)
        assert exp_integral_e1(0.5, loose) == pytest.approx(exp_integral_e1(0.5), rel=1e-5)
