"""Command-line entry point: ``physarum-adder <command> ...``."""
import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import adder, analysis, engine, plotting
from .config import KEY_TYPES, build_run_config, convert, load_config, write_config
from .errors import AdderError, CalibrationFailure
from .lattice import save_pgm
from .spectral import write_spectrum_csv

log = logging.getLogger("physarum_adder")

DEFAULT_FRACTIONS = (1.0, 0.75, 0.5, 0.25)


def _bit(text):
    if text not in ("0", "1"):
        raise argparse.ArgumentTypeError(f"bits must be 0 or 1, got {text!r}")
    return int(text)


def _key_value(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    k, v = (p.strip() for p in text.split("=", 1))
    if k not in KEY_TYPES:
        raise argparse.ArgumentTypeError(f"unknown config key {k!r}")
    try:
        return k, convert(k, v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value {v!r} for {k}") from None


def _fraction_list(text):
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from None


def run_config(args):
    """Defaults <- config file <- --set overrides <- explicit flags."""
    values = load_config(args.config) if args.config else {}
    values.update(dict(args.set or []))
    for key in ("fraction", "total_steps", "warmup_steps", "population"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if args.seed is not None:
        values["seed"] = args.seed
    return build_run_config(values)


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _frac_tag(f):
    return f"{f:g}".replace(".", "p")


def cmd_simulate(args):
    cfg = run_config(args)
    out = _outdir(args)
    print(f"seed {cfg.seed} fraction {cfg.fraction:g}")
    series = engine.run_experiment(cfg, snapshot_steps=args.snapshot or ())
    spec = engine.flux_spectrum(series, cfg.warmup_steps, pad=args.pad)
    dom = engine.dominant_flux_frequency(series, cfg.warmup_steps, pad=args.pad)
    engine.write_flux_csv(os.path.join(out, "flux.csv"), series)
    write_spectrum_csv(os.path.join(out, "spectrum.csv"), spec)
    write_config(os.path.join(out, "config.txt"), cfg)
    for step, fld in sorted(series.snapshots.items()):
        save_pgm(os.path.join(out, f"field_{step:06d}.pgm"), fld)
    plotting.plot_flux(os.path.join(out, "flux.svg"), series, cfg.warmup_steps,
                       title=f"fraction {cfg.fraction:g}, seed {cfg.seed}")
    print(f"dominant frequency {dom.frequency!r} cycles/step (period {1 / dom.frequency:.1f} steps)")
    return 0


def _run_sweep(args, cfg, fractions):
    runs = engine.sweep(fractions, args.runs, cfg, workers=args.workers)
    rows = []
    for r in runs:
        f = engine.dominant_flux_frequency(r.series, cfg.warmup_steps).frequency
        rows.append((r, f))
    return rows


def _write_sweep(out, rows):
    sdir = os.path.join(out, "series")
    os.makedirs(sdir, exist_ok=True)
    manifest = []
    for r, f in rows:
        rel = os.path.join("series", f"flux_f{_frac_tag(r.fraction)}_s{r.seed}.csv")
        engine.write_flux_csv(os.path.join(out, rel), r.series)
        manifest.append((r.fraction, r.seed, rel, f))
    engine.write_manifest_csv(os.path.join(out, "manifest.csv"), manifest)


def cmd_sweep(args):
    cfg = run_config(args)
    out = _outdir(args)
    print(f"seeds {cfg.seed}..{cfg.seed + args.runs - 1}")
    rows = _run_sweep(args, cfg, args.fractions)
    _write_sweep(out, rows)
    for frac in args.fractions:
        fs = [f for r, f in rows if r.fraction == frac]
        print(f"fraction {frac:g}: mean {np.mean(fs):.6g} over {len(fs)} run(s)")
    return 0


def cmd_calibrate(args):
    cfg = run_config(args)
    out = _outdir(args)
    print(f"seeds {cfg.seed}..{cfg.seed + args.runs - 1}")
    fmap = adder.FRACTION_MAP
    fractions = [fmap[b] for b in range(4)]
    # everything is computed before any file is written, so an interrupted
    # sweep leaves nothing behind
    rows = _run_sweep(args, cfg, fractions)
    results = [(r.fraction, f) for r, f in rows]
    stds = [float(np.std([f for fr, f in results if fr == frac], ddof=1)) if args.runs > 1 else 0.0
            for frac in fractions]
    try:
        cal = adder.calibrate(results, fmap, min_runs=1)
    except CalibrationFailure:
        _write_sweep(out, rows)
        raise
    _write_sweep(out, rows)
    adder.write_calibration_csv(os.path.join(out, "calibration.csv"), cal)
    plotting.plot_calibration(os.path.join(out, "calibration.svg"), fractions, cal.means, stds,
                              cal.thresholds)
    for b, (frac, m) in enumerate(zip(cal.fractions, cal.means)):
        print(f"bin {b} fraction {frac:g}: mean {m!r}")
    print("thresholds " + " ".join(repr(t) for t in cal.thresholds))
    if cal.low_confidence:
        print("warning: low confidence calibration (fewer than 2 runs per fraction)")
    return 0


def cmd_add(args):
    cfg = run_config(args)
    out = _outdir(args)
    cal = adder.read_calibration_csv(args.calibration)
    inp = adder.AdderInput(args.x, args.y, args.cin)
    res = adder.physical_full_add(inp, cal, cfg, cfg.seed, votes=args.votes)
    with open(os.path.join(out, "add_report.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["run", "seed", "fraction", "dominant_frequency", "bin"])
        for i, (s, f, b) in enumerate(zip(res.seeds, res.frequencies, res.bins)):
            w.writerow([i, s, repr(res.fraction), repr(f), b])
    print(f"seeds {res.seeds[0]}..{res.seeds[-1]} fraction {res.fraction:g} bins {res.bins}",
          file=sys.stderr)
    print(res.output)
    return 0


def cmd_analyze(args):
    out = _outdir(args)
    traces = analysis.load_traces(args.traces)
    study = analysis.length_frequency_study(traces)
    analysis.write_summary_csv(os.path.join(out, "summary.csv"), study.summary)
    analysis.write_fit_csv(os.path.join(out, "fit.csv"), study.fit)
    plotting.plot_length_fit(os.path.join(out, "fit.svg"), study.frequencies, study.summary,
                             study.fit)
    for i, reason in study.excluded:
        print(f"excluded trace {i}: {reason}")
    fit = study.fit
    print(f"slope {fit.slope!r} Hz/cm intercept {fit.intercept!r} Hz r2 {fit.r2!r}"
          + (" (degenerate)" if fit.degenerate else ""))
    return 0


def cmd_truth_table(args):
    print(adder.format_truth_table())
    return 0


def _add_run_flags(p):
    p.add_argument("--set", action="append", type=_key_value, metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--total-steps", dest="total_steps", type=int)
    p.add_argument("--warmup-steps", dest="warmup_steps", type=int)
    p.add_argument("--population", type=int)


def build_parser():
    def common_flags(suppress):
        # the sub-command copy must not reset values given before the command
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--config", default=d(None), help="flat key = value config file")
        c.add_argument("--seed", type=int, default=d(None), help="base RNG seed")
        c.add_argument("--out", default=d("out"), help="output directory (default: out)")
        c.add_argument("-v", "--verbose", action="store_true", default=d(False))
        return c

    common = common_flags(suppress=True)

    p = argparse.ArgumentParser(prog="physarum-adder", parents=[common_flags(suppress=False)],
                                description="Full adder by arena-length oscillation frequency.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="one run: flux, spectrum, plot")
    _add_run_flags(s)
    s.add_argument("--fraction", type=float)
    s.add_argument("--snapshot", type=int, action="append", metavar="STEP",
                   help="save the field as PGM at this step (repeatable)")
    s.add_argument("--pad", type=int, default=1, help="zero-padding factor for the spectrum")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[common], help="runs over fractions and seeds")
    _add_run_flags(s)
    s.add_argument("--fractions", type=_fraction_list, default=list(DEFAULT_FRACTIONS))
    s.add_argument("--runs", type=int, default=10)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("calibrate", parents=[common], help="frequency thresholds per bin")
    _add_run_flags(s)
    s.add_argument("--runs", type=int, default=10)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("add", parents=[common], help="evaluate the adder by simulation")
    _add_run_flags(s)
    s.add_argument("x", type=_bit)
    s.add_argument("y", type=_bit)
    s.add_argument("cin", type=_bit)
    s.add_argument("--calibration", required=True, help="calibration CSV from 'calibrate'")
    s.add_argument("--votes", type=int, default=1)
    s.set_defaults(func=cmd_add)

    s = sub.add_parser("analyze", parents=[common], help="frequency vs length regression")
    s.add_argument("traces")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("truth-table", parents=[common], help="print the full adder table")
    s.set_defaults(func=cmd_truth_table)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "runs", 1) < 1:
        parser.error("--runs must be at least 1")
    if getattr(args, "votes", 1) < 1:
        parser.error("--votes must be at least 1")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CalibrationFailure as exc:
        print(f"error: calibration failed: {exc}", file=sys.stderr)
        return 3
    except AdderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
