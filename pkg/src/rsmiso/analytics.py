"""Closed-form layer: distribution functions, rate-loss upper bounds,
feedback-bit scaling laws and the thresholds that switch between schemes.

Conventions used throughout:
  P        linear SNR (noise power 1)
  M        transmit antennas (M >= 2)
  t        power splitting ratio in (0, 1]: private messages get P*t,
           the common message gets P*(1-t)
  bits     feedback budget per receiver; for receiver-specific qualities
           B_alpha <= B_beta with gap tau = B_beta - B_alpha and mean bbar
  delta    multiplicative rate-loss target: log2(delta) bps/Hz allowed loss
  3 dB per bps/Hz converts rate offsets into SNR offsets.

Every bound takes an explicit ``regime`` switch ("exact", "high-snr", ...)
instead of silently mixing asymptotics with finite-SNR forms.
"""

import math

import numpy as np

from .numerics import EULER_GAMMA, binomial, exp_integral_e1, phi, upper_incomplete_gamma

__all__ = [
    "InfeasibleError",
    "PrecisionError",
    "interference_scale",
    "theta",
    "b0_eq",
    "bbar0_rs",
    "delta0",
    "joint_cdf",
    "cdf_yk_approx",
    "cdf_y_upper",
    "expected_ln_y_lower",
    "bound_rs_s_eq",
    "feedback_bits_rs_s_eq",
    "overhead_reduction_eq",
    "bound_rs_s_rs",
    "feedback_bits_rs_s_rs",
    "bound_rs_st",
    "st_gain_db",
    "st_gain_db_large_tau",
    "st_overhead_reduction",
    "st_overhead_reduction_large_tau",
    "feedback_bits_rs_st",
]

LN2 = math.log(2.0)
E = math.e

DB_PER_BPS = 3.0  # SNR-offset interpretation of a 1 bps/Hz rate offset


class InfeasibleError(ArithmeticError):
    """A scaling-law inverse has no solution for the requested target."""


class PrecisionError(ArithmeticError):
    """A closed form lost too much precision to be trusted."""


# ---------------------------------------------------------------------------
# shared building blocks
# ---------------------------------------------------------------------------

def interference_scale(P: float, M: int, bits: float) -> float:
    """Residual-interference scale P*M/(2(M-1)) * 2^(-bits/(M-1))."""
    return P * M / (2.0 * (M - 1)) * 2.0 ** (-bits / (M - 1))


def _kappa(P: float, t: float) -> float:
    # exponent of the common-rate lower bound: (4/(Pt) - 1) phi(Pt/4) - 1 - gamma
    return (4.0 / (P * t) - 1.0) * phi(P * t / 4.0) - 1.0 - EULER_GAMMA


def _eps_loss(P: float, t: float) -> float:
    # private-power shrinkage cost in bps/Hz: [phi(P/2) - phi(Pt/2)] / ln 2
    return (phi(P / 2.0) - phi(P * t / 2.0)) / LN2


def _common_term(P: float, t: float) -> float:
    # 1 + P(1-t)/2 * e^kappa(t): the guaranteed common-message term
    return 1.0 + P * (1.0 - t) / 2.0 * math.exp(_kappa(P, t))


def theta(tau: float, M: int) -> float:
    """Symmetric transform of the per-use feedback gap:
    2^(-tau/(2(M-1))) + 2^(tau/(2(M-1))) + 2, equal to 4 at tau = 0."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    x = tau / (2.0 * (M - 1))
    return 2.0 ** (-x) + 2.0 ** x + 2.0


def b0_eq(P: float, M: int) -> float:
    """Bit threshold below which splitting beats plain ZFBF (equal qualities)."""
    return (M - 1) * (math.log2(P * M / (2.0 * (M - 1))) - math.log2(E - 1.0))


def bbar0_rs(P: float, M: int, tau: float) -> float:
    """Average-bit threshold between splitting and plain ZFBF for a gap tau."""
    th = theta(tau, M)
    eta_star = math.sqrt(E * E / 4.0 + (E - 2.0) ** 2 * th * (th - 4.0) / 16.0) \
        + (E - 2.0) * (th - 2.0) / 4.0
    return (M - 1) * (math.log2(P * M / (2.0 * (M - 1))) - math.log2(eta_star))


def _delta0_from_theta(th: float) -> float:
    if th <= 4.0 + 1e-12:
        return E * E
    q = (E * E / 8.0) * (th - 2.0) ** 2 * (1.0 - 2.0 / E) + E
    return math.sqrt(E * E / 4.0 * (th * th - 4.0 * th) + q * q) + q


def delta0(tau: float, M: int) -> float:
    """Loss-target threshold below which the splitting optimum stays at t = 1."""
    return _delta0_from_theta(theta(tau, M))


def _t_eq_delta(delta: float) -> float:
    # high-SNR minimizer of the equal-quality bit law; 1 below delta = e^2
    if delta <= 1.0:
        raise ValueError("delta must exceed 1")
    if delta < E * E:
        return 1.0
    return 1.0 / (delta / (2.0 * E) - E / 2.0 + 1.0)


def _t_rs_delta(delta: float, th: float) -> float:
    # high-SNR minimizer of the receiver-specific bit law (quadratic root)
    if delta <= 1.0:
        raise ValueError("delta must exceed 1")
    if th <= 4.0 + 1e-12:
        return _t_eq_delta(delta)
    if delta <= _delta0_from_theta(th):
        return 1.0
    d2 = th * th - 4.0 * th
    arg = 4.0 * (th - 2.0) ** 2 / (E * E * d2 * d2) * delta ** 2 \
        - (th - 2.0) ** 2 / d2 * delta * (1.0 - 2.0 / E)
    r = math.sqrt(arg) - 4.0 * delta / (E * d2)
    return min(1.0, 1.0 / r)


def _t_loss_eq(P: float, M: int, bits: float) -> float:
    # high-SNR minimizer of the equal-quality loss bound
    if bits > b0_eq(P, M):
        return 1.0
    lam = interference_scale(P, M, bits)
    return min(1.0, 1.0 / (lam + 2.0 - E))


def _t_loss_rs(P: float, M: int, b_alpha: float, b_beta: float) -> float:
    # high-SNR minimizer of the receiver-specific loss bound
    bbar = 0.5 * (b_alpha + b_beta)
    if bbar >= bbar0_rs(P, M, b_beta - b_alpha):
        return 1.0
    c = (E - 2.0) / 2.0
    la = interference_scale(P, M, b_alpha)
    lb = interference_scale(P, M, b_beta)
    r = math.sqrt((la - c) * (lb - c)) - c
    return min(1.0, 1.0 / r)


# ---------------------------------------------------------------------------
# distribution functions
# ---------------------------------------------------------------------------

def joint_cdf(x1: float, x2: float, M: int) -> float:
    """Joint CDF of the two correlated unit-mean exponential gains
    |h^H w_c|^2 and |h^H w|^2 sharing the same M-antenna channel h.

    Evaluated with exact integer binomials and the incomplete-gamma
    recurrence; terms are combined with compensated summation to control
    the alternating-sign cancellation, and the raw value is verified to sit
    within [-1e-8, 1 + 1e-8] before clamping.
    """
    if x1 < 0.0 or x2 < 0.0:
        raise ValueError("joint_cdf requires non-negative arguments")
    if M < 2:
        raise ValueError("joint_cdf requires M >= 2")
    if x1 == 0.0 or x2 == 0.0:
        return 0.0
    xmax = max(x1, x2)
    orders = range(2 - M, M + 1)
    gamma_tab = {r: upper_incomplete_gamma(r, xmax) for r in orders}
    inv_gamma_m = 1.0 / math.factorial(M - 1)
    terms = []
    for i in range(M):
        ci = binomial(M - 1, i) * (-x1) ** (M - 1 - i)
        for j in range(M):
            cj = binomial(M - 1, j) * (-x2) ** (M - 1 - j)
            terms.append(ci * cj * gamma_tab[i + j + 2 - M])
    xi = inv_gamma_m * math.fsum(terms)
    raw = 1.0 - math.exp(-x1) - math.exp(-x2) + xi
    if raw < -1e-8 or raw > 1.0 + 1e-8:
        raise PrecisionError(
            f"joint_cdf lost precision: raw={raw!r} at x1={x1!r}, x2={x2!r}, M={M}"
        )
    return min(1.0, max(0.0, raw))


def cdf_yk_approx(y, P: float, t: float):
    """Independence approximation of the CDF of the per-receiver common-SINR
    kernel Y_k: 1 - e^(-y) / (1 + (Pt/2) y)."""
    y = np.asarray(y, dtype=float)
    out = 1.0 - np.exp(-y) / (1.0 + P * t / 2.0 * y)
    return float(out) if out.ndim == 0 else out


def cdf_y_upper(y, P: float, t: float):
    """Approximate upper bound on the CDF of Y = min(Y_1, Y_2):
    1 - e^(-2y) / (1 + (Pt/2) y)^2."""
    y = np.asarray(y, dtype=float)
    out = 1.0 - np.exp(-2.0 * y) / (1.0 + P * t / 2.0 * y) ** 2
    return float(out) if out.ndim == 0 else out


def expected_ln_y_lower(P: float, t: float) -> float:
    """Lower bound on E[ln Y]: (4/(Pt) - 1) phi(Pt/4) - gamma - ln2 - 1."""
    if P <= 0.0 or not 0.0 < t <= 1.0:
        raise ValueError("need P > 0 and t in (0, 1]")
    return (4.0 / (P * t) - 1.0) * phi(P * t / 4.0) - EULER_GAMMA - LN2 - 1.0


# ---------------------------------------------------------------------------
# equal feedback qualities: loss bound and bit law
# ---------------------------------------------------------------------------

def bound_rs_s_eq(P: float, M: int, bits: float, t: float, regime: str = "exact") -> float:
    """Upper bound (bps/Hz) on the sum-rate loss of single-use splitting with
    ratio t versus perfect-CSIT ZFBF, equal feedback qualities.

    regime "exact" is valid at any SNR; "high-snr" is the P -> inf form at
    the same t; "high-snr-opt" evaluates the P -> inf form at its own
    optimal ratio (t is ignored; only meaningful for bits < b0_eq).
    """
    lam = interference_scale(P, M, bits)
    if regime == "exact":
        return 2.0 * _eps_loss(P, t) + 2.0 * math.log2(1.0 + t * lam) \
            - math.log2(_common_term(P, t))
    if regime == "high-snr":
        return 2.0 * math.log2(1.0 / t + lam) \
            - math.log2(1.0 + 2.0 / (t * E) - 2.0 / E)
    if regime == "high-snr-opt":
        arg = 2.0 * lam + 2.0 - E
        if arg <= 0.0:
            raise InfeasibleError("high-snr-opt form needs 2*Lambda + 2 - e > 0")
        return math.log2(E) + math.log2(arg)
    raise ValueError(f"unknown regime {regime!r}")


def feedback_bits_rs_s_eq(delta: float, t: float, P: float, M: int, regime: str = "exact") -> float:
    """Bits per receiver so the splitting scheme at ratio t loses at most
    log2(delta) bps/Hz versus perfect-CSIT ZFBF (inverse of the loss bound)."""
    if delta <= 1.0:
        raise ValueError("delta must exceed 1")
    if regime == "exact":
        inner = math.sqrt(delta) * math.sqrt(_common_term(P, t)) \
            / (t * 2.0 ** _eps_loss(P, t)) - 1.0 / t
    elif regime == "high-snr":
        inner = math.sqrt(delta * (1.0 + 2.0 / (t * E) - 2.0 / E)) - 1.0 / t
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if inner <= 0.0:
        raise InfeasibleError(
            f"no bit budget reaches the target: sqrt-term {inner + 1.0 / t:.6g} "
            f"does not exceed 1/t = {1.0 / t:.6g}"
        )
    return (M - 1) * (math.log2(P * M / (2.0 * (M - 1))) - math.log2(inner))


def overhead_reduction_eq(delta: float, M: int) -> float:
    """High-SNR feedback saving of splitting over plain ZFBF with quantized
    CSIT: (M-1) log2((delta/(2e) + e/2 - 1) / (sqrt(delta) - 1)), delta >= e^2."""
    if delta < E * E:
        raise ValueError("overhead_reduction_eq is stated for delta >= e^2")
    return (M - 1) * math.log2(
        (delta / (2.0 * E) + E / 2.0 - 1.0) / (math.sqrt(delta) - 1.0)
    )


# ---------------------------------------------------------------------------
# receiver-specific feedback qualities: loss bound and bit law
# ---------------------------------------------------------------------------

def bound_rs_s_rs(P: float, M: int, b_alpha: float, b_beta: float, t: float,
                  regime: str = "exact") -> float:
    """Upper bound (bps/Hz) on the sum-rate loss of single-use splitting when
    the two receivers feed back b_alpha <= b_beta bits.

    regimes: "exact"; "high-snr" (P -> inf at the given t); "high-snr-opt"
    (P -> inf at its own optimal ratio, t ignored); "high-snr-cap"
    (quantitative cap, within log2(e/2) of "high-snr-opt", t ignored).
    """
    if b_alpha > b_beta:
        raise ValueError("b_alpha must not exceed b_beta")
    la = interference_scale(P, M, b_alpha)
    lb = interference_scale(P, M, b_beta)
    if regime == "exact":
        return 2.0 * _eps_loss(P, t) + math.log2(1.0 + t * la) + math.log2(1.0 + t * lb) \
            - math.log2(_common_term(P, t))
    if regime == "high-snr":
        return math.log2(1.0 / t + la) + math.log2(1.0 / t + lb) \
            - math.log2(1.0 + 2.0 / (t * E) - 2.0 / E)
    if regime == "high-snr-opt":
        ts = _t_loss_rs(P, M, b_alpha, b_beta)
        eta = math.sqrt(la * lb)
        return math.log2(ts * (eta - 1.0 / ts) ** 2 + (math.sqrt(la) + math.sqrt(lb)) ** 2) \
            - math.log2(2.0 / E + (1.0 - 2.0 / E) * ts)
    if regime == "high-snr-cap":
        th = theta(b_beta - b_alpha, M)
        eta = interference_scale(P, M, 0.5 * (b_alpha + b_beta))
        return math.log2(eta * th) + math.log2(E / 2.0)
    raise ValueError(f"unknown regime {regime!r}")


def feedback_bits_rs_s_rs(delta: float, t: float, tau: float, P: float, M: int) -> float:
    """Average bits per receiver so single-use splitting at ratio t, with a
    per-use quality gap tau, loses at most log2(delta) bps/Hz (exact inverse
    of the receiver-specific loss bound)."""
    if delta <= 1.0:
        raise ValueError("delta must exceed 1")
    th = theta(tau, M)
    eps = _eps_loss(P, t)
    arg = (th * th - 4.0 * th) / (4.0 * t * t) \
        + delta * _common_term(P, t) / (t * t * 2.0 ** (2.0 * eps))
    if arg < 0.0:
        raise InfeasibleError("negative discriminant in the bit law")
    inner = math.sqrt(arg) - (th - 2.0) / (2.0 * t)
    if inner <= 0.0:
        raise InfeasibleError(
            f"no average bit budget reaches the target: sqrt {math.sqrt(arg):.6g} "
            f"does not exceed (theta-2)/(2t) = {(th - 2.0) / (2.0 * t):.6g}"
        )
    return (M - 1) * (math.log2(P * M / (2.0 * (M - 1))) - math.log2(inner))


# ---------------------------------------------------------------------------
# space-time scheme: loss bound, SNR gain, bit law
# ---------------------------------------------------------------------------

def bound_rs_st(P: float, M: int, b_alpha: float, b_beta: float,
                t_alpha: float, t_beta: float, regime: str = "exact") -> float:
    """Upper bound (bps/Hz) on the sum-rate loss of the space-time scheme
    with per-use ratios t_alpha <= t_beta and budgets b_alpha <= b_beta.

    regimes: "exact"; "high-snr" (P -> inf at the given ratios);
    "high-snr-cap" (cap independent of the quality gap, ratios ignored).
    """
    if b_alpha > b_beta:
        raise ValueError("b_alpha must not exceed b_beta")
    if not 0.0 < t_alpha <= t_beta <= 1.0:
        raise ValueError("need 0 < t_alpha <= t_beta <= 1")
    la = interference_scale(P, M, b_alpha)
    lb = interference_scale(P, M, b_beta)
    if regime == "exact":
        mu = (2.0 * phi(P / 2.0) - phi(P * t_beta / 2.0) - phi(P * t_alpha / 2.0)) / LN2
        rho = (phi(P * t_beta / 2.0) - 0.5 * phi(P * t_beta / 4.0)
               - phi(P * t_alpha / 2.0) + 0.5 * phi(P * t_alpha / 4.0)) / LN2
        return mu - rho + math.log2(1.0 + t_alpha * la) + math.log2(1.0 + t_beta * lb) \
            - math.log2(_common_term(P, t_beta))
    if regime == "high-snr":
        return math.log2(1.0 / t_beta + lb) + math.log2(1.0 / t_alpha + la) \
            - 0.5 * math.log2(t_beta / t_alpha) \
            - math.log2(1.0 + 2.0 / (t_beta * E) - 2.0 / E)
    if regime == "high-snr-cap":
        eta = interference_scale(P, M, 0.5 * (b_alpha + b_beta))
        return math.log2(eta) + 2.0 + math.log2(E / 2.0)
    raise ValueError(f"unknown regime {regime!r}")


def st_gain_db(tau: float, M: int) -> float:
    """SNR gain (dB) of the space-time scheme over single-use splitting at a
    per-use quality gap tau: 3 * log2(theta/4) dB."""
    return DB_PER_BPS * math.log2(theta(tau, M) / 4.0)


def st_gain_db_large_tau(tau: float, M: int) -> float:
    """Large-tau simplification of the space-time SNR gain: 3(tau/(2(M-1)) - 2)."""
    return DB_PER_BPS * (tau / (2.0 * (M - 1)) - 2.0)


def st_overhead_reduction(tau: float, M: int) -> float:
    """Average feedback saving (bits) of the space-time scheme over single-use
    splitting at equal loss targets: (M-1) log2(theta/4)."""
    return (M - 1) * math.log2(theta(tau, M) / 4.0)


def st_overhead_reduction_large_tau(tau: float, M: int) -> float:
    """Large-tau form of the space-time feedback saving: tau/2 - 2(M-1)."""
    return tau / 2.0 - 2.0 * (M - 1)


def feedback_bits_rs_st(delta: float, tau: float, P: float, M: int) -> float:
    """Average bits per receiver for the space-time scheme to lose at most
    log2(delta) bps/Hz: the single-use law at its high-SNR optimal ratio
    minus the space-time overhead reduction."""
    th = theta(tau, M)
    t = _t_rs_delta(delta, th)
    return feedback_bits_rs_s_rs(delta, t, tau, P, M) - st_overhead_reduction(tau, M)
