"""Monte Carlo engine: determinism, pairing, estimator contracts."""

import math

import numpy as np
import pytest

from rsmiso import analytics
from rsmiso.montecarlo import (
    ConfigurationError,
    ExperimentSpec,
    collect_gains,
    estimate_ergodic_rates,
    estimate_rate_loss,
    grid_search_t,
    sweep,
)
from rsmiso.numerics import phi
from rsmiso.schemes import PowerPolicy, sinr_rs_s, sinr_rs_st


def spec_for(scheme="rs-s", M=4, bits=10.0, trials=4000, seed=11, **kw):
    return ExperimentSpec(scheme=scheme, M=M, snr_db=(20.0,), bits=bits,
                          trials=trials, master_seed=seed, **kw)


class TestSpecValidation:
    def test_rs_st_needs_bit_pair(self):
        with pytest.raises(ConfigurationError):
            ExperimentSpec("rs-st", 4, (20.0,), bits=10.0)

    def test_missing_bits(self):
        with pytest.raises(ConfigurationError):
            ExperimentSpec("rs-s", 4, (20.0,), bits=None)

    def test_perfect_needs_no_bits(self):
        ExperimentSpec("zfbf-perfect", 4, (20.0,))

    def test_bad_resolution(self):
        with pytest.raises(ConfigurationError):
            ExperimentSpec("rs-s", 4, (20.0,), bits=10.0, split=("grid", 0.7))

    def test_bits_pair_is_sorted(self):
        s = ExperimentSpec("rs-st", 4, (20.0,), bits=(13.0, 7.0))
        assert s.bits == (7.0, 13.0)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigurationError):
            ExperimentSpec("dirty-paper", 4, (20.0,), bits=10.0)


class TestPerfectCsitOracle:
    def test_per_user_rate_matches_phi(self):
        # E[log2(1 + Exp(1) * P/2)] = phi(P/2)/ln2
        spec = ExperimentSpec("zfbf-perfect", 4, (20.0,), trials=20000, master_seed=3)
        est = estimate_ergodic_rates(spec, 20.0)
        target = 2.0 * phi(50.0) / math.log(2.0)
        assert abs(est.mean - target) < 3.0 * est.stderr
        assert est.breakdown["rate_private_1"] == pytest.approx(phi(50.0) / math.log(2.0),
                                                                abs=3.0 * est.stderr)

    def test_loss_is_identically_zero(self):
        spec = ExperimentSpec("zfbf-perfect", 4, (10.0,), trials=2000, master_seed=4)
        est = estimate_rate_loss(spec, 10.0)
        assert est.mean == 0.0
        assert est.stderr == 0.0


class TestDegeneracyAndPairing:
    def test_rs_s_full_private_equals_zfbf_rvq(self):
        rs = estimate_ergodic_rates(spec_for("rs-s", split=1.0), 20.0)
        zf = estimate_ergodic_rates(spec_for("zfbf-rvq"), 20.0)
        assert rs.mean == zf.mean  # same seed, same realizations, same formula
        assert rs.breakdown["rate_common"] == 0.0

    def test_paired_loss_matches_unpaired_difference(self):
        spec = spec_for(trials=20000, seed=5)
        paired = estimate_rate_loss(spec, 20.0)
        scheme_est = estimate_ergodic_rates(spec, 20.0)
        perfect_est = estimate_ergodic_rates(
            ExperimentSpec("zfbf-perfect", 4, (20.0,), trials=20000, master_seed=1234), 20.0)
        unpaired = perfect_est.mean - scheme_est.mean
        tol = 3.0 * math.hypot(paired.stderr, perfect_est.stderr, scheme_est.stderr)
        assert abs(paired.mean - unpaired) < tol

    def test_stderr_scales_with_trials(self):
        a = estimate_ergodic_rates(spec_for(trials=4000, seed=6), 20.0)
        b = estimate_ergodic_rates(spec_for(trials=16000, seed=6), 20.0)
        ratio = a.stderr / b.stderr
        assert abs(ratio - 2.0) < 0.4  # 1/sqrt(n) within 20%

    def test_breakdown_sums_to_mean(self):
        for scheme, bits in (("rs-s", 10.0), ("rs-st", (7.0, 13.0)),
                             ("tdma", 10.0), ("sumu", 10.0)):
            spec = ExperimentSpec(scheme, 4, (25.0,), bits=bits, trials=1000, master_seed=7)
            est = estimate_ergodic_rates(spec, 25.0)
            total = (est.breakdown["rate_common"] + est.breakdown["rate_private_1"]
                     + est.breakdown["rate_private_2"])
            assert total == pytest.approx(est.mean, abs=1e-9)


class TestDeterminism:
    def test_worker_count_invariance(self):
        spec = spec_for(trials=10000, seed=8)
        a = estimate_ergodic_rates(spec, 20.0, workers=1)
        b = estimate_ergodic_rates(spec, 20.0, workers=4)
        assert a.mean == b.mean and a.stderr == b.stderr

    def test_sweep_repeatable(self):
        spec = ExperimentSpec("rs-s", 4, (0.0, 10.0, 20.0), bits=10.0,
                              trials=2000, master_seed=9)
        assert sweep(spec) == sweep(spec, workers=3)

    def test_seed_changes_result(self):
        a = estimate_ergodic_rates(spec_for(seed=1), 20.0)
        b = estimate_ergodic_rates(spec_for(seed=2), 20.0)
        assert a.mean != b.mean


class TestGridSearch:
    def test_two_point_grid(self):
        spec = spec_for(trials=2000, seed=10)
        t_star, est = grid_search_t(spec, 20.0, 0.5)
        assert t_star in (0.5, 1.0)
        gains = collect_gains(spec)
        means = {}
        for t in (0.5, 1.0):
            means[t] = estimate_ergodic_rates(
                spec_for(trials=2000, seed=10, split=t), 20.0, gains=gains).mean
        assert est.mean == max(means.values())
        assert t_star == min(t for t, m in means.items() if m == est.mean)

    def test_zfbf_favourable_regime_prefers_full_private_power(self):
        # huge bit budget at high SNR: splitting cannot help (B = 40 would
        # still leave enough residual interference for an interior optimum)
        spec = ExperimentSpec("rs-s", 4, (40.0,), bits=60.0, trials=4000, master_seed=12)
        t_star, _ = grid_search_t(spec, 40.0, 0.05)
        assert t_star >= 0.95

    def test_interior_optimum_when_feedback_is_coarse(self):
        spec = ExperimentSpec("rs-s", 4, (40.0,), bits=6.0, trials=4000, master_seed=13)
        t_star, _ = grid_search_t(spec, 40.0, 0.05)
        assert t_star < 0.5

    def test_rejects_rs_st(self):
        spec = ExperimentSpec("rs-st", 4, (20.0,), bits=(7.0, 13.0), trials=100, master_seed=1)
        with pytest.raises(ConfigurationError):
            grid_search_t(spec, 20.0, 0.1)


class TestSweep:
    def test_single_point_matches_estimate(self):
        spec = spec_for(trials=2000, seed=14)
        rows = sweep(spec)
        est = estimate_ergodic_rates(spec, 20.0)
        assert len(rows) == 1
        assert rows[0]["sum_rate"] == est.mean
        assert rows[0]["bits"] == "10"

    def test_perfect_sum_rate_monotone_in_snr(self):
        spec = ExperimentSpec("zfbf-perfect", 4, tuple(range(0, 45, 5)),
                              trials=4000, master_seed=15)
        rows = sweep(spec)
        rates = [r["sum_rate"] for r in rows]
        assert len(rows) == 9
        assert all(b > a for a, b in zip(rates, rates[1:]))

    def test_rs_st_rows_have_pair_columns(self):
        spec = ExperimentSpec("rs-st", 2, (30.0,), bits=(7.0, 13.0),
                              trials=500, master_seed=16)
        rows = sweep(spec)
        assert "t_alpha" in rows[0] and "t_beta" in rows[0]
        assert rows[0]["bits"] == "7,13"


class TestEngineMatchesSchemeFormulas:
    def test_single_use_gains_against_stored_vectors(self):
        spec = spec_for(trials=128, seed=17)
        g = collect_gains(spec, return_vectors=True)
        vecs = g["_vectors"][0]
        bundle_direct = sinr_rs_s(vecs["h1"], vecs["h2"], vecs["prec"], PowerPolicy(100.0, 0.3))
        from rsmiso.schemes import sinr_rs_s_from_gains
        bundle_gains = sinr_rs_s_from_gains(g, PowerPolicy(100.0, 0.3))
        np.testing.assert_allclose(bundle_direct.common, bundle_gains.common[:128], rtol=1e-12)
        np.testing.assert_allclose(bundle_direct.private[0], bundle_gains.private[0][:128],
                                   rtol=1e-12)

    def test_two_use_gains_against_stored_vectors(self):
        spec = ExperimentSpec("rs-st", 2, (30.0,), bits=(7.0, 13.0),
                              trials=128, master_seed=18)
        g = collect_gains(spec, return_vectors=True)
        vecs = g["_vectors"][0]
        pol = PowerPolicy(1000.0, (0.1, 0.6))
        direct = sinr_rs_st(vecs["channels"], vecs["precs"], pol)
        from rsmiso.schemes import sinr_rs_st_from_gains
        from_gains = sinr_rs_st_from_gains(g, pol)
        np.testing.assert_allclose(direct.c0, from_gains.c0[:128], rtol=1e-12)
        np.testing.assert_allclose(direct.private[3], from_gains.private[3][:128], rtol=1e-12)

    def test_quantized_direction_gain_bound(self):
        # residual interference after nullspace ZF obeys the quantization law
        spec = spec_for(trials=20000, seed=19, bits=8.0)
        g = collect_gains(spec)
        # a12 = |h1^H w2|^2 with w2 in the complement of receiver 1's report
        h_norm_sq_mean = 4.0  # E||h||^2 = M
        assert g["a12"].mean() < h_norm_sq_mean * 2.0 ** (-8.0 / 3.0) / 3.0

    def test_rate_loss_bounded_by_analytics(self):
        from rsmiso.schemes import power_split_eq
        spec = spec_for(trials=20000, seed=20, bits=10.0)
        est = estimate_rate_loss(spec, 30.0)
        P = 10.0 ** 3.0
        bound = analytics.bound_rs_s_eq(P, 4, 10.0, power_split_eq(P, 4, 10.0))
        assert est.mean <= bound + 2.0 * est.stderr


class TestAlternatingQualities:
    def test_single_use_scheme_accepts_bit_pair(self):
        spec = ExperimentSpec("rs-s", 2, (30.0,), bits=(7.0, 13.0),
                              trials=2000, master_seed=21)
        est = estimate_ergodic_rates(spec, 30.0)
        assert est.mean > 0.0
        assert est.breakdown["t"] == 1.0  # 30 dB sits below the splitting threshold

    def test_rs_st_runs_and_splits(self):
        spec = ExperimentSpec("rs-st", 2, (40.0,), bits=(5.0, 15.0),
                              trials=2000, master_seed=22)
        est = estimate_ergodic_rates(spec, 40.0)
        assert est.breakdown["t_alpha"] == pytest.approx(2.0 ** 5 / 1e4)
        assert est.breakdown["t_beta"] == 1.0
        assert est.mean > 0.0
