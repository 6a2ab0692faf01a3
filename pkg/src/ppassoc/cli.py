"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 degenerate data under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .glrt import run_test
from .io import InputError, parse_events, read_intensity, read_pairs, write_events, write_intensity
from .measure import ObservationWindow, align_to_source, transform, uniform_intensity
from .multiplicity import screen, triggering_report
from .simulate import CalibrationConfig, calibration_experiment, figure1_experiment, load_config, synthetic_grid

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def default_threads() -> int:
    env = os.environ.get("PPASSOC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _single_stream(path, name, jitter, seed):
    streams = parse_events(path, jitter, seed)
    if name is not None:
        if name not in streams:
            raise InputError(f"{path}: no stream {name!r}")
        return streams[name]
    if len(streams) != 1:
        raise InputError(f"{path}: {len(streams)} streams present; pick one with --a-stream/--b-stream")
    return next(iter(streams.values()))


def _intensity(args, first: float):
    if args.intensity:
        return read_intensity(args.intensity)
    if args.end is None:
        raise InputError("--end is required when --intensity is not given")
    start = args.start if args.start is not None else first
    return uniform_intensity(ObservationWindow(start, args.end))


def _check_inside(times, intensity, label):
    w = intensity.window
    if times.size and (times[0] < w.start or times[-1] >= w.end):
        raise InputError(f"{label} events fall outside the window [{w.start}, {w.end})")


def _pair_inputs(args):
    a = _single_stream(args.a, args.a_stream, args.jitter, args.seed)
    b = _single_stream(args.b, args.b_stream, args.jitter, args.seed)
    if a.times.size == 0:
        raise InputError("A has no events")
    mode = getattr(args, "mode", None) or ("correlation" if args.command == "correlate" else "triggering")
    first = a.times[0] if mode == "triggering" else min(a.times[0], b.times[0] if b.times.size else a.times[0])
    intensity = _intensity(args, float(first))
    _check_inside(a.times, intensity, "A")
    _check_inside(b.times, intensity, "B")
    return a, b, intensity, mode


def cmd_test(args) -> int:
    a, b, intensity, mode = _pair_inputs(args)
    dropped = 0
    B = b.times
    b_payloads = b.payloads
    if mode == "triggering":
        keep = B >= a.times[0]
        dropped = int(np.count_nonzero(~keep))
        B = B[keep]
        b_payloads = [p for p, k in zip(b_payloads, keep) if k]
    outcome = run_test(a.times, B, intensity, mode, args.tau_max, align=True)
    payload = {
        "outcome": outcome.to_dict(),
        "dropped_before_first_a": dropped,
        "intensity_rescaled": bool(intensity.rescaled),
    }
    if mode == "triggering":
        payload["report"] = triggering_report(a.times, B, outcome, a.payloads, b_payloads).to_dict()
    _emit(payload, args.out)
    return EXIT_DEGENERATE if (args.strict and outcome.degenerate) else EXIT_OK


def cmd_diagnose(args) -> int:
    a, b, intensity, mode = _pair_inputs(args)
    B = b.times
    if mode == "triggering":
        B, intensity, _ = align_to_source(a.times, B, intensity)
    sample = transform(a.times, B, intensity, mode, args.tau_max)
    cfg = diag.KsConfig(args.gamma1, args.gamma2)
    payload = {"n": sample.n, "mode": mode, "u": sample.u.tolist(), "degenerate": sample.degenerate}
    if sample.n:
        fisher = diag.fisher_combine(sample.u)
        table = diag.ecdf_table(sample.u)
        payload.update(
            fisher=fisher._asdict(),
            ecdf=[list(r) for r in table],
            weighted_ks_plus=diag.weighted_ks_plus(sample.u, cfg),
            restricted_statistic=diag.restricted_statistic(sample.u, cfg),
            scaled_restricted_statistic=diag.scaled_restricted_statistic(sample.u, cfg),
        )
        if args.ecdf_out:
            diag.write_ecdf_csv(table, args.ecdf_out)
    _emit(payload, args.out)
    return EXIT_DEGENERATE if (args.strict and sample.degenerate) else EXIT_OK


def cmd_screen(args) -> int:
    streams = parse_events(args.events, args.jitter, args.seed)
    pairs = read_pairs(args.pairs)
    for s, t in pairs:
        for name in (s, t):
            if name not in streams:
                raise InputError(f"{args.pairs}: stream {name!r} not found in {args.events}")
    all_times = np.concatenate([s.times for s in streams.values()])
    intensity = _intensity(args, float(all_times.min()))
    for name, s in streams.items():
        _check_inside(s.times, intensity, f"stream {name!r}")
    items = [(s, t, streams[s].times, streams[t].times) for s, t in pairs]
    result = screen(items, intensity, args.q, args.mode, args.tau_max, args.threads or default_threads())
    payload = result.to_dict()
    if args.mode == "triggering":
        payload["reports"] = [
            {
                "source": result.entries[i].source,
                "target": result.entries[i].target,
                **triggering_report(
                    streams[result.entries[i].source].times,
                    streams[result.entries[i].target].times,
                    result.entries[i].outcome,
                    streams[result.entries[i].source].payloads,
                    streams[result.entries[i].target].payloads,
                ).to_dict(),
            }
            for i in result.rejected
        ]
    if args.matrix_out:
        result.write_matrix_csv(args.matrix_out)
    _emit(payload, args.out)
    degenerate = any(e.outcome.degenerate for e in result.entries)
    return EXIT_DEGENERATE if (args.strict and degenerate) else EXIT_OK


def cmd_simulate(args) -> int:
    grid = synthetic_grid(args.size, args.seed, ratio=args.ratio, tau=args.tau, diagonal=not args.null)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    streams = {**grid.sources, **grid.targets}
    payloads = {name: [f"{name}#{k}" for k in range(len(t))] for name, t in streams.items()}
    write_events(outdir / "events.csv", streams, payloads)
    write_intensity(outdir / "intensity.csv", grid.intensity)
    with open(outdir / "pairs.csv", "w") as fh:
        fh.write("source,target\n")
        for s, t in grid.pairs():
            fh.write(f"{s},{t}\n")
    _emit(
        {
            "events": str(outdir / "events.csv"),
            "intensity": str(outdir / "intensity.csv"),
            "pairs": str(outdir / "pairs.csv"),
            "effects": sorted([list(e) for e in grid.effects]),
            "counts": {k: int(len(v)) for k, v in streams.items()},
        },
        args.out,
    )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    config = load_config(args.config) if args.config else CalibrationConfig()
    for key in ("replicates", "m", "mean_n", "tau_max"):
        val = getattr(args, key)
        if val is not None:
            setattr(config, key, val)
    config.workers = args.threads or default_threads()
    intensity = read_intensity(args.intensity) if args.intensity else None
    summary = calibration_experiment(config, args.seed, intensity)
    payload = summary.to_dict()
    payload["seed"] = args.seed
    payload["ks_below_critical"] = summary.ks_statistic < summary.ks_critical_1pct
    _emit(payload, args.out)
    return EXIT_OK


def cmd_figure1(args) -> int:
    res = figure1_experiment(args.n, args.gamma1, args.gamma2, args.replicates, args.seed)
    if args.csv_out:
        with open(args.csv_out, "w") as fh:
            fh.write("x,ecdf_scaled_T,ecdf_weighted_ks\n")
            for x, fa, fb in res.ecdf_rows():
                fh.write(f"{x!r},{fa!r},{fb!r}\n")
    _emit(
        {
            "n": args.n,
            "gamma1": args.gamma1,
            "gamma2": args.gamma2,
            "replicates": args.replicates,
            "seed": args.seed,
            "sup_distance": res.sup_distance,
        },
        args.out,
    )
    return EXIT_OK


def _pair_args(p: argparse.ArgumentParser, with_mode: bool = False) -> None:
    p.add_argument("--a", required=True, help="CSV of A (source) events")
    p.add_argument("--b", required=True, help="CSV of B (response) events")
    p.add_argument("--a-stream", help="stream id to use from a multi-stream A file")
    p.add_argument("--b-stream", help="stream id to use from a multi-stream B file")
    if with_mode:
        p.add_argument("--mode", choices=["triggering", "correlation"], default="triggering")


def _window_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--intensity", help="CSV with header breakpoint,density (default: uniform)")
    p.add_argument("--start", type=float, help="window start when no intensity file is given")
    p.add_argument("--end", type=float, help="window end when no intensity file is given")
    p.add_argument("--tau-max", type=float, help="time-limited mode: maximum response range")
    p.add_argument("--jitter", type=float, help="break duplicate timestamps with offsets in [0, jitter)")
    p.add_argument("--seed", type=int, default=0)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--strict", action="store_true", help="exit 3 on degenerate data")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppassoc", description="Exact likelihood-ratio tests for point-process association.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("test", "test A triggering B"), ("correlate", "test B clustering around A")):
        p = sub.add_parser(name, help=help_)
        _pair_args(p)
        _window_args(p)
        _common(p)
        p.set_defaults(func=cmd_test)

    p = sub.add_parser("diagnose", help="u-values, ECDF, Fisher and weighted K-S diagnostics")
    _pair_args(p, with_mode=True)
    _window_args(p)
    _common(p)
    p.add_argument("--gamma1", type=float, default=0.01)
    p.add_argument("--gamma2", type=float, default=0.99)
    p.add_argument("--ecdf-out", help="write the ECDF table as CSV u,ecdf")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("screen", help="test many stream pairs with FDR control")
    p.add_argument("--events", required=True, help="CSV time,stream[,payload]")
    p.add_argument("--pairs", required=True, help="CSV source,target")
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--mode", choices=["triggering", "correlation"], default="triggering")
    p.add_argument("--matrix-out", help="write the tier matrix as CSV")
    p.add_argument("--threads", type=int)
    _window_args(p)
    _common(p)
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("simulate", help="write a synthetic screening log")
    p.add_argument("--outdir", required=True)
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--ratio", type=float, default=10.0)
    p.add_argument("--tau", type=float, default=1e-4)
    p.add_argument("--null", action="store_true", help="no injected effects")
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="null calibration of the exact p-value")
    p.add_argument("--config", help="key = value file of calibration settings")
    p.add_argument("--replicates", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--mean-n", type=float)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--intensity")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("figure1", help="weighted K-S versus restricted GLR statistic")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--gamma1", type=float, default=0.01)
    p.add_argument("--gamma2", type=float, default=0.99)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv-out")
    _common(p)
    p.set_defaults(func=cmd_figure1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
