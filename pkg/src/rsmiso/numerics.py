"""Special functions behind the closed-form rate expressions.

Everything here is scalar, pure, double precision: the exponential integral
E1, the ergodic-rate kernel phi(x) = e^(1/x) E1(1/x) (the mean of ln(1+xZ)
for a unit-mean exponential Z), the upper incomplete gamma function at
integer order including non-positive orders, and exact binomial
coefficients.
"""

import math
from dataclasses import dataclass

__all__ = [
    "EULER_GAMMA",
    "SpecialFnConfig",
    "exp_integral_e1",
    "phi",
    "upper_incomplete_gamma",
    "binomial",
]

EULER_GAMMA = 0.5772156649015328606


@dataclass(frozen=True)
class SpecialFnConfig:
    """Numerical policy shared by the special-function evaluators."""

    rel_tolerance: float = 1e-12
    max_terms: int = 200

    def __post_init__(self):
        if not 0.0 < self.rel_tolerance <= 1e-6:
            raise ValueError("rel_tolerance must lie in (0, 1e-6]")
        if self.max_terms < 10:
            raise ValueError("max_terms must be at least 10")


_DEFAULT = SpecialFnConfig()


# ---------------------------------------------------------------------------
# exponential integral E1
# ---------------------------------------------------------------------------

def _e1_series(x: float, cfg: SpecialFnConfig) -> float:
    # E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!),  0 < x <= 1
    total = -EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, cfg.max_terms + 1):
        term *= -x / k
        contrib = -term / k
        total += contrib
        if abs(contrib) < cfg.rel_tolerance * abs(total):
            return total
    raise ArithmeticError(f"E1 series did not converge at x={x!r}")


def _e1_cf_scaled(x: float, cfg: SpecialFnConfig) -> float:
    # e^x * E1(x) via the modified-Lentz continued fraction, x > 1.
    # Returning the scaled value avoids under/overflow for very large x.
    b = x + 1.0
    c = 1e300
    d = 1.0 / b
    h = d
    for i in range(1, cfg.max_terms + 1):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < cfg.rel_tolerance:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x!r}")


def exp_integral_e1(x: float, config: SpecialFnConfig = _DEFAULT) -> float:
    """E1(x) = integral of e^(-x t)/t over t in [1, inf), for x > 0.

    Series expansion below the x = 1 crossover, continued fraction above it.
    """
    if x <= 0.0:
        raise ValueError("exp_integral_e1 requires x > 0")
    if x <= 1.0:
        return _e1_series(x, config)
    return math.exp(-x) * _e1_cf_scaled(x, config)


def phi(x: float, config: SpecialFnConfig = _DEFAULT) -> float:
    """phi(x) = e^(1/x) E1(1/x) = E[ln(1 + x Z)] with Z ~ Exp(1).

    Evaluated through the scaled continued fraction when 1/x > 1, so both
    tails (x -> 0+ where phi ~ x, and x -> inf where phi ~ ln x - gamma)
    stay inside double range.
    """
    if x <= 0.0:
        raise ValueError("phi requires x > 0")
    y = 1.0 / x
    if y <= 1.0:
        return math.exp(y) * _e1_series(y, config)
    return _e1_cf_scaled(y, config)


# ---------------------------------------------------------------------------
# upper incomplete gamma at integer order (valid for r <= 0 as well)
# ---------------------------------------------------------------------------

def upper_incomplete_gamma(r: int, a: float, config: SpecialFnConfig = _DEFAULT) -> float:
    """Gamma(r, a) for integer r of any sign and a > 0.

    r >= 1 uses the finite sum Gamma(r, a) = (r-1)! e^(-a) sum a^k/k!;
    r <= 0 uses the downward recurrence
    Gamma(r, a) = (Gamma(r+1, a) - a^r e^(-a)) / r seeded by Gamma(0, a) = E1(a),
    which preserves relative accuracy through the alternating-sum formulas
    that consume it.
    """
    if a <= 0.0:
        raise ValueError("upper_incomplete_gamma requires a > 0")
    if r != int(r):
        raise ValueError("upper_incomplete_gamma is defined for integer order only")
    r = int(r)
    if r >= 1:
        s = 1.0
        term = 1.0
        for k in range(1, r):
            term *= a / k
            s += term
        return math.factorial(r - 1) * math.exp(-a) * s
    val = exp_integral_e1(a, config)
    if r == 0:
        return val
    ea = math.exp(-a)
    for rr in range(-1, r - 1, -1):
        val = (val - a ** rr * ea) / rr
    return val


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k); requires 0 <= k <= n."""
    if n < 0 or k < 0:
        raise ValueError("binomial requires non-negative arguments")
    if k > n:
        raise ValueError("binomial requires k <= n")
    return math.comb(n, k)
