"""Transmission-scheme evaluation: power policies, precoder sets, exact
per-realization SINRs and instantaneous rates for every scheme, and the
closed-form power splitting ratios.

SINRs are always the exact expressions (no high-SNR approximation); the
approximated forms live in :mod:`rsmiso.analytics` only. All functions
broadcast over leading axes of the channel/precoder arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytics

__all__ = [
    "PowerPolicy",
    "PrecoderSet",
    "SinrBundle",
    "SinrBundleST",
    "sinr_rs_s",
    "sinr_rs_st",
    "rate_zfbf_perfect",
    "rate_tdma",
    "rate_sumu",
    "power_split_eq",
    "power_split_eq_delta",
    "power_split_rs",
    "power_split_rs_delta",
    "power_split_st",
]

E = math.e
T_MIN = 1e-9  # full-power-on-common (t = 0) is excluded; ratios are clamped


def _clamp_t(t: float) -> float:
    if t > 1.0:
        raise ValueError("power splitting ratio must not exceed 1")
    return max(float(t), T_MIN)


@dataclass(frozen=True)
class PowerPolicy:
    """Total power plus either a single split t or a per-use pair (t_alpha, t_beta).

    Single split: common gets P(1-t), each private gets Pt/2.
    Pair: per channel use the four streams get P(1-t_beta),
    P(t_beta-t_alpha)/2 and Pt_alpha/2, Pt_beta/2 for the privates.
    """

    total_power: float
    split: float | tuple[float, float]

    def __post_init__(self):
        if self.total_power <= 0.0:
            raise ValueError("total power must be positive")
        if isinstance(self.split, tuple):
            ta, tb = self.split
            if ta > tb:
                raise ValueError("t_alpha must not exceed t_beta")
            object.__setattr__(self, "split", (_clamp_t(ta), _clamp_t(tb)))
        else:
            object.__setattr__(self, "split", _clamp_t(self.split))

    @property
    def is_pair(self) -> bool:
        return isinstance(self.split, tuple)

    @property
    def t(self) -> float:
        if self.is_pair:
            raise ValueError("pair policy has no single ratio")
        return self.split

    @property
    def t_alpha(self) -> float:
        return self.split[0] if self.is_pair else self.split

    @property
    def t_beta(self) -> float:
        return self.split[1] if self.is_pair else self.split

    def components(self) -> tuple[float, ...]:
        """Per-channel-use stream powers (common first), summing to the total."""
        P = self.total_power
        if not self.is_pair:
            t = self.split
            return (P - P * t, P * t / 2.0, P * t / 2.0)
        ta, tb = self.split
        return (P - P * tb, (P * tb - P * ta) / 2.0, P * ta / 2.0, P * tb / 2.0)


@dataclass
class PrecoderSet:
    """Unit-norm common and private beamformers plus the construction tag."""

    common: np.ndarray
    private: tuple[np.ndarray, np.ndarray]
    strategy: str = "random-nullspace"


def _abs2(h: np.ndarray, w: np.ndarray) -> np.ndarray:
    """|h^H w|^2 along the last axis."""
    return np.abs(np.sum(np.conj(h) * w, axis=-1)) ** 2


def _check_dims(*vecs: np.ndarray) -> None:
    dims = {np.asarray(v).shape[-1] for v in vecs}
    if len(dims) != 1:
        raise ValueError(f"mismatched vector dimensions: {sorted(dims)}")


# ---------------------------------------------------------------------------
# single-use scheme (common message superposed on ZF-precoded privates)
# ---------------------------------------------------------------------------

@dataclass
class SinrBundle:
    """Exact SINRs of the single-use scheme: common per receiver, the common
    minimum actually decodable by both, and the two private SINRs."""

    scheme: str
    common_rx: tuple[np.ndarray, np.ndarray]
    common: np.ndarray
    private: tuple[np.ndarray, np.ndarray]


def rs_s_gains(h1: np.ndarray, h2: np.ndarray, prec: PrecoderSet) -> dict:
    """Channel-precoder power gains consumed by the single-use SINRs."""
    w1, w2 = prec.private
    _check_dims(h1, h2, prec.common, w1, w2)
    return {
        "ac1": _abs2(h1, prec.common),
        "ac2": _abs2(h2, prec.common),
        "a11": _abs2(h1, w1),
        "a12": _abs2(h1, w2),
        "a21": _abs2(h2, w1),
        "a22": _abs2(h2, w2),
    }


def sinr_rs_s_from_gains(g: dict, pol: PowerPolicy) -> SinrBundle:
    P = pol.total_power
    t = pol.t
    pc = P * (1.0 - t)
    pp = P * t / 2.0
    sc1 = g["ac1"] * pc / (1.0 + pp * (g["a11"] + g["a12"]))
    sc2 = g["ac2"] * pc / (1.0 + pp * (g["a21"] + g["a22"]))
    s1 = g["a11"] * pp / (1.0 + g["a12"] * pp)
    s2 = g["a22"] * pp / (1.0 + g["a21"] * pp)
    return SinrBundle("rs-s", (sc1, sc2), np.minimum(sc1, sc2), (s1, s2))


def sinr_rs_s(h1: np.ndarray, h2: np.ndarray, prec: PrecoderSet, pol: PowerPolicy) -> SinrBundle:
    """Exact single-use SINRs: the common message sees both ZF-precoded
    privates as interference; each private sees only the cross precoder."""
    return sinr_rs_s_from_gains(rs_s_gains(h1, h2, prec), pol)


# ---------------------------------------------------------------------------
# space-time scheme (extra common message spanning two channel uses)
# ---------------------------------------------------------------------------

@dataclass
class SinrBundleST:
    """Exact SINRs of the space-time scheme over both channel uses.

    c1/c2 are the per-use common messages, c0 the cross-use common message
    (beamformed on the shared private precoder); privates are indexed
    (receiver, channel use).
    """

    c0_rx: tuple[np.ndarray, np.ndarray]
    c1_rx: tuple[np.ndarray, np.ndarray]
    c2_rx: tuple[np.ndarray, np.ndarray]
    private: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]  # u11 u12 u21 u22
    scheme: str = "rs-st"
    c0: np.ndarray = field(init=False)
    c1: np.ndarray = field(init=False)
    c2: np.ndarray = field(init=False)

    def __post_init__(self):
        self.c0 = np.minimum(*self.c0_rx)
        self.c1 = np.minimum(*self.c1_rx)
        self.c2 = np.minimum(*self.c2_rx)


def rs_st_gains(channels, precs) -> dict:
    """Power gains for the space-time SINRs.

    channels: ((h11, h21), (h12, h22)) with h_kl the receiver-k channel in
    use l; precs: per-use PrecoderSet pair. The cross-use common message
    rides on w11 in use 1 and on w22 in use 2, so its gains are computed
    from those shared beamformers explicitly.
    """
    (h11, h21), (h12, h22) = channels
    p1, p2 = precs
    w11, w21 = p1.private
    w12, w22 = p2.private
    w01 = w11
    w02 = w22
    _check_dims(h11, h21, h12, h22, p1.common, p2.common, w11, w21, w12, w22)
    return {
        "g11c": _abs2(h11, p1.common), "g110": _abs2(h11, w01),
        "g111": _abs2(h11, w11), "g112": _abs2(h11, w21),
        "g21c": _abs2(h21, p1.common), "g211": _abs2(h21, w11), "g212": _abs2(h21, w21),
        "g12c": _abs2(h12, p2.common), "g121": _abs2(h12, w12), "g122": _abs2(h12, w22),
        "g22c": _abs2(h22, p2.common), "g220": _abs2(h22, w02),
        "g221": _abs2(h22, w12), "g222": _abs2(h22, w22),
    }


def sinr_rs_st_from_gains(g: dict, pol: PowerPolicy) -> SinrBundleST:
    if not pol.is_pair:
        raise ValueError("space-time scheme needs a (t_alpha, t_beta) pair policy")
    P = pol.total_power
    ta, tb = pol.t_alpha, pol.t_beta
    pc = P * (1.0 - tb)
    p0 = P * (tb - ta) / 2.0
    pa = P * ta / 2.0
    pb = P * tb / 2.0
    # channel use 1: receiver 1 decodes c1 then c0 before its private;
    # receiver 2 sees c1 after having removed c0 (decoded in use 2)
    c1_1 = g["g11c"] * pc / (1.0 + g["g110"] * p0 + g["g111"] * pa + g["g112"] * pb)
    c1_2 = g["g21c"] * pc / (1.0 + g["g211"] * pa + g["g212"] * pb)
    c0_1 = g["g110"] * p0 / (1.0 + g["g111"] * pa + g["g112"] * pb)
    u11 = g["g111"] * pa / (1.0 + g["g112"] * pb)
    u21 = g["g212"] * pb / (1.0 + g["g211"] * pa)
    # channel use 2: roles swap (receiver 2 decodes c2 then c0 first)
    c2_2 = g["g22c"] * pc / (1.0 + g["g220"] * p0 + g["g222"] * pa + g["g221"] * pb)
    c2_1 = g["g12c"] * pc / (1.0 + g["g121"] * pb + g["g122"] * pa)
    c0_2 = g["g220"] * p0 / (1.0 + g["g222"] * pa + g["g221"] * pb)
    u12 = g["g121"] * pb / (1.0 + g["g122"] * pa)
    u22 = g["g222"] * pa / (1.0 + g["g221"] * pb)
    return SinrBundleST((c0_1, c0_2), (c1_1, c1_2), (c2_1, c2_2), (u11, u12, u21, u22))


def sinr_rs_st(channels, precs, pol: PowerPolicy) -> SinrBundleST:
    """Exact space-time SINRs with the sequential decoding order: own-use
    common, cross-use common, other-use common, then the privates."""
    return sinr_rs_st_from_gains(rs_st_gains(channels, precs), pol)


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def rate_zfbf_perfect(h: np.ndarray, w_perp: np.ndarray, P: float):
    """Instantaneous per-user rate of perfect-CSIT ZFBF at even power split:
    log2(1 + |h^H w|^2 P/2), w unit-norm in the other true channel's null space."""
    return np.log2(1.0 + _abs2(h, w_perp) * P / 2.0)


def _direction(csit) -> np.ndarray:
    return getattr(csit, "direction", csit)


def rate_tdma(h1: np.ndarray, h2: np.ndarray, csit1, csit2, P: float):
    """Single-user rate with full power to the better quantized beam:
    log2(1 + P max_k |h_k^H d_k|^2); the gain keeps the channel magnitude."""
    d1 = _abs2(h1, _direction(csit1))
    d2 = _abs2(h2, _direction(csit2))
    return np.log2(1.0 + P * np.maximum(d1, d2))


def zfbf_rvq_sum_rate_from_gains(a11, a12, a21, a22, P: float):
    """Two-user ZFBF sum rate at even split P/2 with residual interference."""
    pp = P / 2.0
    s1 = a11 * pp / (1.0 + a12 * pp)
    s2 = a22 * pp / (1.0 + a21 * pp)
    return np.log2(1.0 + s1) + np.log2(1.0 + s2)


def rate_sumu(h1: np.ndarray, h2: np.ndarray, csit1, csit2, prec: PrecoderSet, P: float):
    """Per-realization single-user / multiuser switching: the max of the
    single-user rate and the two-user ZFBF sum rate."""
    w1, w2 = prec.private
    zf = zfbf_rvq_sum_rate_from_gains(
        _abs2(h1, w1), _abs2(h1, w2), _abs2(h2, w1), _abs2(h2, w2), P
    )
    return np.maximum(rate_tdma(h1, h2, csit1, csit2, P), zf)


# ---------------------------------------------------------------------------
# closed-form power splitting ratios
# ---------------------------------------------------------------------------

def power_split_eq(P: float, M: int, bits: float) -> float:
    """High-SNR optimal split for single-use splitting with equal feedback
    qualities; returns 1 (no common message) above the bit threshold."""
    if P <= 0.0 or M < 2 or bits < 0:
        raise ValueError("need P > 0, M >= 2, bits >= 0")
    return analytics._t_loss_eq(P, M, bits)


def power_split_eq_delta(delta: float) -> float:
    """High-SNR split minimizing the equal-quality bit law at loss target
    log2(delta); stays at 1 for delta below e^2."""
    return analytics._t_eq_delta(delta)


def power_split_rs(P: float, M: int, b_alpha: float, b_beta: float) -> float:
    """High-SNR optimal split for single-use splitting with receiver-specific
    budgets b_alpha <= b_beta; 1 above the average-bit threshold."""
    if b_alpha > b_beta:
        raise ValueError("b_alpha must not exceed b_beta")
    if P <= 0.0 or M < 2 or b_alpha < 0:
        raise ValueError("need P > 0, M >= 2, bits >= 0")
    return analytics._t_loss_rs(P, M, b_alpha, b_beta)


def power_split_rs_delta(delta: float, tau: float, M: int) -> float:
    """High-SNR split minimizing the receiver-specific bit law at loss target
    log2(delta) and quality gap tau; degenerates to the equal-quality form
    at tau = 0."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return analytics._t_rs_delta(delta, analytics.theta(tau, M))


def power_split_st(P: float, M: int, b_alpha: float, b_beta: float) -> tuple[float, float]:
    """Space-time splits (t_alpha, t_beta) = (min(1/Lambda_alpha, 1),
    min(1/Lambda_beta, 1)): private power chosen so residual interference is
    drowned by noise; t_alpha <= t_beta holds by construction."""
    if b_alpha > b_beta:
        raise ValueError("b_alpha must not exceed b_beta")
    la = analytics.interference_scale(P, M, b_alpha)
    lb = analytics.interference_scale(P, M, b_beta)
    return (min(1.0 / la, 1.0), min(1.0 / lb, 1.0))
