"""Command-line surface: Monte Carlo sweeps, closed-form bound tables and
figure-preset bundles (plot-ready CSV plus a JSON manifest).

Exit codes: 0 success, 2 configuration error, 3 numerical / infeasibility
error. Every emitted file records the tool version, the result-affecting
flags and the seed; execution knobs (worker count) are excluded so reruns
with different parallelism stay byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytics, schemes
from .channel import DegenerateGeometryError, sample_channel, sample_isotropic_unit, substream
from .montecarlo import (
    ConfigurationError,
    ExperimentSpec,
    collect_gains,
    estimate_ergodic_rates,
    estimate_rate_loss,
    grid_search_t,
    sweep,
)

PRESETS = (
    "cdf-joint", "cdf-yk",
    "rateloss-eq", "sumrate-eq", "overhead-eq", "sumrate-scaled-eq",
    "overhead-vs-tau", "rateloss-rs", "sumrate-rs",
    "overhead-st", "sumrate-scaled-st",
    "compare-sumu-eq", "compare-sumu-rs",
)

DEFAULT_TRIALS = 20000
DEFAULT_SEED = 1234


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return "" if v is None else str(v)


def _parse_grid(text: str) -> list[float]:
    """Inclusive 'a:step:b' range, comma list, or single number."""
    if ":" in text:
        a, step, b = (float(p) for p in text.split(":"))
        if step <= 0:
            raise ConfigurationError("range step must be positive")
        out = []
        v = a
        while v <= b + 1e-9:
            out.append(round(v, 12))
            v += step
        return out
    if "," in text:
        return [float(p) for p in text.split(",")]
    return [float(text)]


def _parse_bits(text: str):
    if text == "perfect":
        return None
    if "," in text:
        a, b = text.split(",")
        return (float(a), float(b))
    return float(text)


def _parse_split(text: str):
    if text == "auto":
        return "auto"
    if text.startswith("fixed="):
        body = text[len("fixed="):]
        if "," in body:
            a, b = body.split(",")
            return (float(a), float(b))
        return float(body)
    if text.startswith("grid="):
        return ("grid", float(text[len("grid="):]))
    raise ConfigurationError(f"unknown split policy {text!r}")


def _write_rows(path: str, fmt: str, header_meta: dict, fieldnames: list[str], rows: list[dict]):
    """Serialize finished rows; nothing touches disk until the data is complete."""
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in header_meta.items():
            buf.write(f"# {k}: {v}\n")
        writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k)) for k in fieldnames})
        Path(path).write_text(buf.getvalue())
    else:
        doc = {"meta": header_meta, "rows": rows}
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _meta(command: str, config: dict) -> dict:
    return {
        "tool": "rsmiso",
        "version": __version__,
        "command": command,
        "config": " ".join(f"{k}={v}" for k, v in config.items()),
    }


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    spec = ExperimentSpec(
        scheme=args.scheme,
        M=args.M,
        snr_db=tuple(_parse_grid(args.snr_db)),
        bits=_parse_bits(args.bits) if args.bits is not None else None,
        split=_parse_split(args.split),
        quantizer=args.quantizer,
        precoder=args.precoder,
        trials=args.trials,
        master_seed=args.seed,
    )
    rows = sweep(spec, workers=args.workers)
    split_cols = ["t_alpha", "t_beta"] if spec.scheme == "rs-st" else ["t"]
    fields = ["scheme", "M", "snr_db", "bits"] + split_cols + [
        "sum_rate", "stderr", "rate_common", "rate_private_1", "rate_private_2",
        "trials", "seed",
    ]
    config = {
        "scheme": args.scheme, "M": args.M, "snr_db": args.snr_db,
        "bits": args.bits if args.bits is not None else "perfect",
        "split": args.split, "quantizer": args.quantizer,
        "precoder": args.precoder, "trials": args.trials, "seed": args.seed,
        "format": args.format,
    }
    _write_rows(args.out, args.format, _meta("simulate", config), fields, rows)
    return 0


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def _bounds_rows(args) -> list[dict]:
    formula = args.formula
    M = args.M
    rows = []

    def row(**kw):
        base = {"formula": formula, "regime": args.regime, "M": M,
                "snr_db": None, "bits": None, "delta": None, "tau": None,
                "t": None, "value": None, "error": ""}
        base.update(kw)
        return base

    if formula in ("theta", "delta0", "st-gain"):
        for tau in _parse_grid(args.tau):
            if formula == "theta":
                rows.append(row(tau=tau, value=analytics.theta(tau, M), regime=""))
            elif formula == "delta0":
                rows.append(row(tau=tau, value=analytics.delta0(tau, M), regime=""))
            else:
                rows.append(row(tau=tau, value=analytics.st_gain_db(tau, M), regime="",
                                value_large_tau=analytics.st_gain_db_large_tau(tau, M)))
        return rows

    snrs = _parse_grid(args.snr_db)
    for snr in snrs:
        P = 10.0 ** (snr / 10.0)
        try:
            if formula == "prop1":
                bits = _parse_bits(args.bits)
                t = args.t if args.t is not None else (
                    1.0 if args.split == "fixed=1" else schemes.power_split_eq(P, M, bits))
                if isinstance(args_split := _parse_split(args.split), float):
                    t = args_split
                rows.append(row(snr_db=snr, bits=f"{bits:g}", t=t,
                                value=analytics.bound_rs_s_eq(P, M, bits, t, args.regime)))
            elif formula == "prop2":
                t = args.t if args.t is not None else schemes.power_split_eq_delta(args.delta)
                rows.append(row(snr_db=snr, delta=args.delta, t=t,
                                value=analytics.feedback_bits_rs_s_eq(args.delta, t, P, M, args.regime)))
            elif formula == "prop3":
                ba, bb = _parse_bits(args.bits)
                t = args.t if args.t is not None else schemes.power_split_rs(P, M, ba, bb)
                if isinstance(args_split := _parse_split(args.split), float):
                    t = args_split
                rows.append(row(snr_db=snr, bits=f"{ba:g},{bb:g}", t=t,
                                value=analytics.bound_rs_s_rs(P, M, ba, bb, t, args.regime)))
            elif formula == "prop4":
                t = args.t if args.t is not None else schemes.power_split_rs_delta(
                    args.delta, float(args.tau), M)
                rows.append(row(snr_db=snr, delta=args.delta, tau=float(args.tau), t=t,
                                value=analytics.feedback_bits_rs_s_rs(
                                    args.delta, t, float(args.tau), P, M)))
            elif formula == "prop5":
                ba, bb = _parse_bits(args.bits)
                split = _parse_split(args.split)
                if split == "auto":
                    ta, tb = schemes.power_split_st(P, M, ba, bb)
                else:
                    ta, tb = split
                rows.append(row(snr_db=snr, bits=f"{ba:g},{bb:g}", t=f"{ta:.12g},{tb:.12g}",
                                value=analytics.bound_rs_st(P, M, ba, bb, ta, tb, args.regime)))
            elif formula == "bst":
                rows.append(row(snr_db=snr, delta=args.delta, tau=float(args.tau), regime="",
                                value=analytics.feedback_bits_rs_st(
                                    args.delta, float(args.tau), P, M)))
            else:
                raise ConfigurationError(f"unknown formula {formula!r}")
        except (analytics.InfeasibleError, analytics.PrecisionError) as exc:
            rows.append(row(snr_db=snr, error=str(exc)))
    return rows


def cmd_bounds(args) -> int:
    rows = _bounds_rows(args)
    failed = [r for r in rows if r["error"]]
    fields = ["formula", "regime", "M", "snr_db", "bits", "delta", "tau", "t", "value"]
    if args.formula == "st-gain":
        fields.append("value_large_tau")
    fields.append("error")
    config = {k: v for k, v in vars(args).items()
              if k not in ("func", "out", "workers") and v is not None}
    _write_rows(args.out, args.format, _meta("bounds", config), fields, rows)
    if failed and len(failed) == len(rows):
        print("all rows infeasible", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

def _curve(name: str, xs, ys, errs=None):
    rows = []
    for i, (x, y) in enumerate(zip(xs, ys)):
        row = {"curve": name, "x": float(x), "y": float(y)}
        if errs is not None:
            row["stderr"] = float(errs[i])
        rows.append(row)
    return rows


def _sim_curve(name, spec, snrs, workers, loss=False):
    gains = collect_gains(spec, workers=workers)
    means, errs = [], []
    for snr in snrs:
        est = (estimate_rate_loss if loss else estimate_ergodic_rates)(spec, snr, gains=gains)
        means.append(est.mean)
        errs.append(est.stderr)
    return _curve(name, snrs, means, errs)


def _figure_payload(preset: str, args):
    trials, seed, workers = args.trials, args.seed, args.workers
    rows: list[dict] = []
    params: dict = {"trials": trials, "seed": seed}

    if preset == "cdf-joint":
        xs = np.linspace(0.25, 6.0, 24)
        rng = substream(seed, 0)
        for M in (2, 4):
            h = sample_channel(M, rng, size=trials)
            v1 = sample_isotropic_unit(M, rng, size=trials)
            v2 = sample_isotropic_unit(M, rng, size=trials)
            x1 = np.abs(np.sum(np.conj(h) * v1, axis=-1)) ** 2
            x2 = np.abs(np.sum(np.conj(h) * v2, axis=-1)) ** 2
            rows += _curve(f"analytic-M{M}", xs, [analytics.joint_cdf(x, x, M) for x in xs])
            rows += _curve(f"independent-M{M}", xs, [(1 - np.exp(-x)) ** 2 for x in xs])
            rows += _curve(f"empirical-M{M}", xs,
                           [float(np.mean((x1 <= x) & (x2 <= x))) for x in xs])
        params.update({"M": [2, 4]})
        return rows, "gain threshold", "joint CDF", params

    if preset == "cdf-yk":
        M, snr, t, bits = 4, 30.0, 0.2, 10.0
        P = 10.0 ** (snr / 10.0)
        spec = ExperimentSpec("rs-s", M, (snr,), bits=bits, split=t,
                              trials=trials, master_seed=seed)
        g = collect_gains(spec, workers=workers)
        yk = g["ac1"] / (1.0 + g["a11"] * P * t / 2.0)
        ys = np.linspace(0.0, 0.08, 33)
        rows += _curve("empirical", ys, [float(np.mean(yk <= y)) for y in ys])
        rows += _curve("independent-approx", ys, [analytics.cdf_yk_approx(y, P, t) for y in ys])
        params.update({"M": M, "snr_db": snr, "t": t, "bits": bits})
        return rows, "kernel value", "CDF", params

    if preset == "rateloss-eq":
        M, bits = 4, 10.0
        snrs = _parse_grid("0:5:40")
        zf = ExperimentSpec("zfbf-rvq", M, tuple(snrs), bits=bits, trials=trials, master_seed=seed)
        rs = ExperimentSpec("rs-s", M, tuple(snrs), bits=bits, split="auto",
                            trials=trials, master_seed=seed)
        rows += _sim_curve("zfbf-rvq-sim", zf, snrs, workers, loss=True)
        rows += _sim_curve("rs-s-sim", rs, snrs, workers, loss=True)
        for name, tfun in (("zfbf-rvq-bound", lambda P: 1.0),
                           ("rs-s-bound", lambda P: schemes.power_split_eq(P, M, bits))):
            ys = [analytics.bound_rs_s_eq(10 ** (s / 10), M, bits, tfun(10 ** (s / 10)), "exact")
                  for s in snrs]
            rows += _curve(name, snrs, ys)
        params.update({"M": M, "bits": bits})
        return rows, "SNR (dB)", "sum-rate loss (bps/Hz)", params

    if preset == "sumrate-eq":
        M = 4
        snrs = _parse_grid("0:5:40")
        for bits in (10.0, 15.0):
            rs = ExperimentSpec("rs-s", M, tuple(snrs), bits=bits, split="auto",
                                trials=trials, master_seed=seed)
            zf = ExperimentSpec("zfbf-rvq", M, tuple(snrs), bits=bits,
                                trials=trials, master_seed=seed)
            rows += _sim_curve(f"rs-s-B{bits:g}", rs, snrs, workers)
            rows += _sim_curve(f"zfbf-rvq-B{bits:g}", zf, snrs, workers)
        pf = ExperimentSpec("zfbf-perfect", M, tuple(snrs), trials=trials, master_seed=seed)
        rows += _sim_curve("zfbf-perfect", pf, snrs, workers)
        params.update({"M": M, "bits": [10, 15]})
        return rows, "SNR (dB)", "sum rate (bps/Hz)", params

    if preset == "overhead-eq":
        M, delta = 4, 64.0
        snrs = _parse_grid("10:2.5:40")
        t2 = schemes.power_split_eq_delta(delta)
        rows += _curve("zfbf-rvq", snrs,
                       [analytics.feedback_bits_rs_s_eq(delta, 1.0, 10 ** (s / 10), M)
                        for s in snrs])
        rows += _curve("rs-s", snrs,
                       [analytics.feedback_bits_rs_s_eq(delta, t2, 10 ** (s / 10), M)
                        for s in snrs])
        params.update({"M": M, "delta": delta, "t_rs": t2})
        return rows, "SNR (dB)", "feedback bits", params

    if preset == "sumrate-scaled-eq":
        M, delta = 4, 64.0
        snrs = _parse_grid("10:5:40")
        t2 = schemes.power_split_eq_delta(delta)
        for name, t in (("zfbf-rvq-scaled", 1.0), ("rs-s-scaled", t2)):
            means, errs = [], []
            for s in snrs:
                P = 10 ** (s / 10)
                bits = max(0.0, analytics.feedback_bits_rs_s_eq(delta, t, P, M))
                scheme = "zfbf-rvq" if t == 1.0 else "rs-s"
                spec = ExperimentSpec(scheme, M, (s,), bits=bits,
                                      split=("auto" if t == 1.0 else t),
                                      trials=trials, master_seed=seed)
                est = estimate_ergodic_rates(spec, s, workers=workers)
                means.append(est.mean)
                errs.append(est.stderr)
            rows += _curve(name, snrs, means, errs)
        pf = ExperimentSpec("zfbf-perfect", M, tuple(snrs), trials=trials, master_seed=seed)
        rows += _sim_curve("zfbf-perfect", pf, snrs, workers)
        params.update({"M": M, "delta": delta})
        return rows, "SNR (dB)", "sum rate (bps/Hz)", params

    if preset == "overhead-vs-tau":
        M, delta, snr = 4, 64.0, 30.0
        P = 10 ** (snr / 10)
        taus = _parse_grid("0:2:16")
        rows += _curve("zfbf-rvq", taus,
                       [analytics.feedback_bits_rs_s_rs(delta, 1.0, tau, P, M) for tau in taus])
        rows += _curve("rs-s", taus,
                       [analytics.feedback_bits_rs_s_rs(
                           delta, schemes.power_split_rs_delta(delta, tau, M), tau, P, M)
                        for tau in taus])
        params.update({"M": M, "delta": delta, "snr_db": snr})
        return rows, "per-use bit gap tau", "average feedback bits", params

    if preset == "rateloss-rs":
        M, bbar, tau = 2, args.bbar, 6.0
        ba, bb = bbar - tau / 2, bbar + tau / 2
        snrs = _parse_grid("0:5:40")
        rs = ExperimentSpec("rs-s", M, tuple(snrs), bits=(ba, bb), split="auto",
                            trials=trials, master_seed=seed)
        st = ExperimentSpec("rs-st", M, tuple(snrs), bits=(ba, bb), split="auto",
                            trials=trials, master_seed=seed)
        rows += _sim_curve("rs-s-sim", rs, snrs, workers, loss=True)
        rows += _sim_curve("rs-st-sim", st, snrs, workers, loss=True)
        bound_s, bound_st = [], []
        for s in snrs:
            P = 10 ** (s / 10)
            t = schemes.power_split_rs(P, M, ba, bb)
            ta, tb = schemes.power_split_st(P, M, ba, bb)
            bound_s.append(analytics.bound_rs_s_rs(P, M, ba, bb, t, "exact"))
            bound_st.append(analytics.bound_rs_st(P, M, ba, bb, ta, tb, "exact"))
        rows += _curve("rs-s-bound", snrs, bound_s)
        rows += _curve("rs-st-bound", snrs, bound_st)
        params.update({"M": M, "bbar": bbar, "tau": tau})
        return rows, "SNR (dB)", "sum-rate loss (bps/Hz)", params

    if preset == "sumrate-rs":
        M, bbar = 2, args.bbar
        snrs = _parse_grid("0:5:45")
        for tau in (6.0, 10.0):
            ba, bb = bbar - tau / 2, bbar + tau / 2
            for scheme, split in (("zfbf-rvq", "auto"), ("rs-s", "auto"), ("rs-st", "auto")):
                spec = ExperimentSpec(scheme, M, tuple(snrs), bits=(ba, bb), split=split,
                                      trials=trials, master_seed=seed)
                rows += _sim_curve(f"{scheme}-tau{tau:g}", spec, snrs, workers)
        params.update({"M": M, "bbar": bbar, "tau": [6, 10]})
        return rows, "SNR (dB)", "sum rate (bps/Hz)", params

    if preset == "overhead-st":
        M, tau, delta = 4, 14.0, 64.0
        snrs = _parse_grid("10:2.5:40")
        rows += _curve("zfbf-rvq", snrs,
                       [analytics.feedback_bits_rs_s_rs(delta, 1.0, tau, 10 ** (s / 10), M)
                        for s in snrs])
        rows += _curve("rs-s", snrs,
                       [analytics.feedback_bits_rs_s_rs(
                           delta, schemes.power_split_rs_delta(delta, tau, M), tau,
                           10 ** (s / 10), M) for s in snrs])
        rows += _curve("rs-st", snrs,
                       [analytics.feedback_bits_rs_st(delta, tau, 10 ** (s / 10), M)
                        for s in snrs])
        params.update({"M": M, "tau": tau, "delta": delta})
        return rows, "SNR (dB)", "average feedback bits", params

    if preset == "sumrate-scaled-st":
        M, tau, delta = 4, 14.0, 64.0
        snrs = _parse_grid("10:5:40")

        def pair_for(bbar):
            ba = max(0.0, bbar - tau / 2)
            return (ba, max(ba, 2 * bbar - ba))

        specs = []
        for s in snrs:
            P = 10 ** (s / 10)
            t4 = schemes.power_split_rs_delta(delta, tau, M)
            b_zf = analytics.feedback_bits_rs_s_rs(delta, 1.0, tau, P, M)
            b_rs = analytics.feedback_bits_rs_s_rs(delta, t4, tau, P, M)
            b_st = analytics.feedback_bits_rs_st(delta, tau, P, M)
            specs.append((s, b_zf, b_rs, b_st, t4))
        for name, idx, scheme, split_of in (
            ("zfbf-rvq-scaled", 1, "zfbf-rvq", lambda rec: "auto"),
            ("rs-s-scaled", 2, "rs-s", lambda rec: rec[4]),
            ("rs-st-scaled", 3, "rs-st", lambda rec: "auto"),
        ):
            means, errs = [], []
            for rec in specs:
                s, bbar = rec[0], max(0.0, rec[idx])
                spec = ExperimentSpec(scheme, M, (s,), bits=pair_for(bbar),
                                      split=split_of(rec), trials=trials, master_seed=seed)
                est = estimate_ergodic_rates(spec, s, workers=workers)
                means.append(est.mean)
                errs.append(est.stderr)
            rows += _curve(name, snrs, means, errs)
        pf = ExperimentSpec("zfbf-perfect", M, tuple(snrs), trials=trials, master_seed=seed)
        rows += _sim_curve("zfbf-perfect", pf, snrs, workers)
        params.update({"M": M, "tau": tau, "delta": delta})
        return rows, "SNR (dB)", "sum rate (bps/Hz)", params

    if preset == "compare-sumu-eq":
        M = 4
        snrs = _parse_grid("0:5:40")
        for bits in (10.0, 15.0):
            rs = ExperimentSpec("rs-s", M, tuple(snrs), bits=bits, split="auto",
                                precoder="pseudo-inverse+svd", trials=trials, master_seed=seed)
            su = ExperimentSpec("sumu", M, tuple(snrs), bits=bits,
                                precoder="pseudo-inverse+svd", trials=trials, master_seed=seed)
            rows += _sim_curve(f"rs-s-B{bits:g}", rs, snrs, workers)
            rows += _sim_curve(f"sumu-B{bits:g}", su, snrs, workers)
        params.update({"M": M, "bits": [10, 15], "precoder": "pseudo-inverse+svd"})
        return rows, "SNR (dB)", "sum rate (bps/Hz)", params

    if preset == "compare-sumu-rs":
        M, tau, bbar = 4, 18.0, args.bbar
        ba, bb = max(0.0, bbar - tau / 2), bbar + tau / 2
        snrs = _parse_grid("0:5:45")
        for scheme in ("rs-s", "rs-st", "sumu"):
            spec = ExperimentSpec(scheme, M, tuple(snrs), bits=(ba, bb), split="auto",
                                  precoder="pseudo-inverse+svd", trials=trials, master_seed=seed)
            rows += _sim_curve(scheme, spec, snrs, workers)
        params.update({"M": M, "tau": tau, "bbar": bbar, "precoder": "pseudo-inverse+svd"})
        return rows, "SNR (dB)", "sum rate (bps/Hz)", params

    raise ConfigurationError(f"unknown preset {preset!r}; choose one of {', '.join(PRESETS)}")


def cmd_figure(args) -> int:
    if args.preset not in PRESETS:
        print(f"unknown preset {args.preset!r}; presets: {', '.join(PRESETS)}", file=sys.stderr)
        return 2
    rows, x_axis, y_axis, params = _figure_payload(args.preset, args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"{args.preset}.csv"
    fields = ["curve", "x", "y"] + (["stderr"] if any("stderr" in r for r in rows) else [])
    meta = _meta("figure", {"preset": args.preset, "trials": args.trials, "seed": args.seed})
    _write_rows(str(csv_path), "csv", meta, fields, rows)
    manifest = {
        "tool": "rsmiso",
        "version": __version__,
        "preset": args.preset,
        "x_axis": x_axis,
        "y_axis": y_axis,
        "parameters": params,
        "curves": sorted({r["curve"] for r in rows}),
        "csv": csv_path.name,
    }
    (outdir / f"{args.preset}.manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rsmiso", description=__doc__)
    p.add_argument("--version", action="version", version=f"rsmiso {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo sweep over an SNR grid")
    sim.add_argument("--scheme", required=True,
                     choices=["zfbf-perfect", "zfbf-rvq", "tdma", "sumu", "rs-s", "rs-st"])
    sim.add_argument("--M", type=int, required=True)
    sim.add_argument("--snr-db", required=True, help="a:step:b, comma list, or single value")
    sim.add_argument("--bits", default=None, help="B, Ba,Bb, or 'perfect'")
    sim.add_argument("--split", default="auto", help="auto | fixed=<v[,v]> | grid=<res>")
    sim.add_argument("--quantizer", default="statistical", choices=["explicit", "statistical"])
    sim.add_argument("--precoder", default="random-nullspace",
                     choices=["random-nullspace", "pseudo-inverse+svd"])
    sim.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", required=True)
    sim.add_argument("--format", default="csv", choices=["csv", "json"])
    sim.set_defaults(func=cmd_simulate)

    bnd = sub.add_parser("bounds", help="tabulate a closed form over a grid")
    bnd.add_argument("--formula", required=True,
                     choices=["prop1", "prop2", "prop3", "prop4", "prop5",
                              "theta", "delta0", "st-gain", "bst"])
    bnd.add_argument("--M", type=int, required=True)
    bnd.add_argument("--snr-db", default="30")
    bnd.add_argument("--bits", default=None)
    bnd.add_argument("--delta", type=float, default=None)
    bnd.add_argument("--tau", default="0")
    bnd.add_argument("--t", type=float, default=None)
    bnd.add_argument("--split", default="auto")
    bnd.add_argument("--regime", default="exact",
                     choices=["exact", "high-snr", "high-snr-opt", "high-snr-cap"])
    bnd.add_argument("--out", default="bounds.csv")
    bnd.add_argument("--format", default="csv", choices=["csv", "json"])
    bnd.set_defaults(func=cmd_bounds)

    fig = sub.add_parser("figure", help="reproduce a preset figure as CSV + manifest")
    fig.add_argument("preset")
    fig.add_argument("--out", default="figures")
    fig.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    fig.add_argument("--seed", type=int, default=DEFAULT_SEED)
    fig.add_argument("--workers", type=int, default=1)
    fig.add_argument("--bbar", type=float, default=10.0,
                     help="average bit budget for the receiver-specific presets")
    fig.set_defaults(func=cmd_figure)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (analytics.InfeasibleError, analytics.PrecisionError,
            DegenerateGeometryError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
