"""``pod-eval`` command line interface.

Subcommands::

    pod-eval fit      --input trials.csv [--config cfg.txt] --out dir/
    pod-eval evaluate --traces traces.csv [--negatives neg.csv] --mode shm|mhm|both --out dir/
    pod-eval compare  --manifest results.csv --out dir/
    pod-eval synth    --model logit --axis cart --b0 F --b1 F --seed N --out traces.csv

Errors are printed to stderr as one JSON object ``{"error", "code",
"message"}``; the exit status is the code (2 bad input, 3 degenerate fit,
4 no valid model). All output files are written after the computation
finishes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config
from .ensemble import (
    comparison_csv,
    comparison_table,
    format_comparison,
    format_winners,
    read_manifest,
    winner_table,
    winners_csv,
)
from .errors import MisalignedTrace, PodError
from .fap import count_false_alarms, fap_50
from .glm import Axis, Link, TrialSet, read_trials_csv, write_trials_csv
from .mhm import average_traces, modified_hit_miss, read_traces_csv, standard_hit_miss, write_traces_csv
from .pod import curve_csv_text, summarize
from .svgplot import render_pod_svg
from .synth import GroundTruth, draw_trials, synth_traces

__all__ = ["main", "build_parser"]

LINKS = {"logit": Link.LOGIT, "probit": Link.PROBIT}
AXES = {"cart": Axis.CARTESIAN, "log": Axis.LOGARITHMIC}


def _clean(value):
    """Make a value JSON-safe: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _dump_json(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _error_record(exc):
    return {"error": exc.name, "code": exc.code, "message": str(exc)}


class _Outputs:
    """Collects files and writes them together once the computation is done."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.files = {}

    def add(self, name, text):
        self.files[name] = text

    def flush(self):
        self.directory.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (self.directory / name).write_text(text)


def _grid(cfg, lo, hi):
    return float(lo), float(hi), cfg.curve_points


def _summary_files(out, prefix, summary, data, title, x_label):
    out.add(f"{prefix}summary.json", _dump_json(summary.to_dict()))
    out.add(f"{prefix}curve.csv", curve_csv_text(summary))
    fraction = data.hits / data.trials
    out.add(f"{prefix}pod.svg", render_pod_svg(summary.a, summary.pod, summary.lower,
                                               points=(data.a, fraction), a90=summary.a90,
                                               a90_95=summary.a90_95, title=title, x_label=x_label))


# ---------------------------------------------------------------------------
# commands


def cmd_fit(args):
    cfg = load_config(args.config)
    data = read_trials_csv(args.input)
    summary = summarize(data, _grid(cfg, data.a.min(), data.a.max()), cfg.lr_level)
    out = _Outputs(args.out or cfg.output_dir)
    _summary_files(out, "", summary, data, f"POD ({summary.model.describe()})", "a")
    out.flush()
    return 0


def _shm_block(avg, cfg, out):
    summary = standard_hit_miss(avg, _grid(cfg, avg.t.min(), avg.t.max()), cfg.shm_threshold, cfg.lr_level)
    outcomes = (avg.p_mean > cfg.shm_threshold).astype(int)
    data = TrialSet.from_binary(avg.t, outcomes)
    _summary_files(out, "shm_", summary, data, "Standard hit/miss", "t [s]")
    return {
        "a90_95": summary.a90_95,
        "seconds_before": None if summary.a90_95 is None else -summary.a90_95,
        "a90": summary.a90,
        "model": summary.model.describe(),
    }


def _mhm_block(avg, cfg, out):
    result = modified_hit_miss(avg, _grid(cfg, avg.t.min(), avg.t.max()), cfg.experiments,
                               cfg.rounding, cfg.lr_level)
    per = []
    for r, summary in enumerate(result.per_experiment):
        record = {"experiment": r + 1, "excluded": result.excluded.get(r)}
        if summary is not None:
            record.update(summary.to_dict())
        out.add(f"experiment_{r + 1:02d}.json", _dump_json(record))
        per.append(None if summary is None else summary.a90_95)
    return {
        "a90_95": result.a90_95_mean,
        "seconds_before": -result.a90_95_mean,
        "per_experiment_a90_95": per,
        "excluded": {str(r + 1): reason for r, reason in sorted(result.excluded.items())},
        "experiments": cfg.experiments,
        "rounding": cfg.rounding,
    }


def cmd_evaluate(args):
    cfg = load_config(args.config)
    out = _Outputs(args.out or cfg.output_dir)
    traces = read_traces_csv(args.traces)
    negatives = read_traces_csv(args.negatives) if args.negatives else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", MisalignedTrace)
        avg = average_traces(traces, cfg.window, cfg.grid_step)
    report = {
        "mode": args.mode,
        "config": asdict(cfg),
        "n_events": avg.n_events,
        "skipped_traces": list(avg.skipped),
        "warnings": [str(w.message) for w in caught],
        "results": {},
    }
    status = 0
    modes = ("shm", "mhm") if args.mode == "both" else (args.mode,)
    blocks = {"shm": _shm_block, "mhm": _mhm_block}
    for mode in modes:
        try:
            report["results"][mode] = blocks[mode](avg, cfg, out)
        except PodError as exc:
            report["results"][mode] = {"a90_95": None, "seconds_before": None, **_error_record(exc)}
            status = status or exc.code
    if negatives is not None:
        n, x = count_false_alarms(negatives, cfg.fap_threshold, cfg.fap_mode)
        report["fap"] = {"n": n, "x": x, "fap": fap_50(n, x).fap, "mode": cfg.fap_mode,
                         "threshold": cfg.fap_threshold}
    out.add("report.json", _dump_json(report))
    out.add("trace_mean.csv", "t_seconds,p_mean\n" + "".join(
        f"{t:.10g},{p:.10g}\n" for t, p in zip(avg.t, avg.p_mean)))
    out.flush()
    for mode in modes:
        block = report["results"][mode]
        if "error" in block:
            _report_error(block)
    return status


def cmd_compare(args):
    cfg = load_config(args.config)
    results = read_manifest(args.manifest)
    rows = comparison_table(results)
    winners = winner_table(results, cfg.tie_tolerance)
    out = _Outputs(args.out or cfg.output_dir)
    out.add("comparison.csv", comparison_csv(rows))
    out.add("comparison.txt", format_comparison(rows))
    out.add("winners.csv", winners_csv(winners))
    out.add("winners.txt", format_winners(winners))
    out.flush()
    return 0


def cmd_synth(args):
    gt = GroundTruth(LINKS[args.model], AXES[args.axis], args.b0, args.b1, args.seed)
    if args.trials_per_point:
        lo, hi = args.a_range
        a = np.linspace(lo, hi, args.points)
        data = draw_trials(gt, a, args.trials_per_point, args.seed)
        write_trials_csv(data, args.out)
        return 0
    traces = synth_traces(gt, args.events, (args.window[0], args.window[1]), args.step,
                          args.jitter, args.seed)
    write_traces_csv(traces, args.out)
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    parser = argparse.ArgumentParser(prog="pod-eval", description="Probability-of-detection analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a POD curve to a,hits,trials data")
    p.add_argument("--input", required=True)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="standard and/or modified hit/miss on probability traces")
    p.add_argument("--traces", required=True)
    p.add_argument("--negatives")
    p.add_argument("--mode", choices=("shm", "mhm", "both"), default="mhm")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="diff and winner-take-all tables from a results manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("synth", help="synthetic traces (or trials) from a known POD model")
    p.add_argument("--model", choices=sorted(LINKS), default="logit")
    p.add_argument("--axis", choices=sorted(AXES), default="cart")
    p.add_argument("--b0", type=float, required=True)
    p.add_argument("--b1", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--events", type=int, default=1)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--window", type=float, nargs=2, default=(-7.0, 0.0), metavar=("START", "STOP"))
    p.add_argument("--trials-per-point", type=int, default=0,
                   help="write a,hits,trials data instead of traces")
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--a-range", type=float, nargs=2, default=(-7.0, 0.0), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_synth)
    return parser


def _report_error(record):
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PodError as exc:
        _report_error(_error_record(exc))
        return exc.code
    except OSError as exc:
        _report_error({"error": "io", "code": 2, "message": str(exc)})
        return 2


if __name__ == "__main__":
    sys.exit(main())
