"""Command-line surface: path dumps, theory curves, ensembles, signal traces.

Flag values override file values which override built-in defaults. Exit
codes: 0 success/PASS, 1 check FAIL, 2 usage or configuration error, 3 I/O.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, config as cfgmod, montecarlo, theory
from .channel import SampleGrid, enumerate_paths, synthesize_signal
from .errors import ConfigError
from .theory import SceneSummary, TheoryCurve

_FMT = "{:.17g}".format

_THEORY_CURVES = ("count", "rate", "pds", "mixing")


def _build_scene(doc: dict, need_direct_delay: bool = False) -> SceneSummary:
    room = cfgmod.build_room(doc)
    radio = cfgmod.build_radio(doc)
    tx = cfgmod.build_pattern(doc, "tx")
    rx = cfgmod.build_pattern(doc, "rx")
    tx_pos = rx_pos = None
    if "positions" in doc:
        tx_pos, rx_pos = cfgmod.positions_from(doc)
    elif need_direct_delay:
        raise ConfigError("positions: required for the deterministic spectrum")
    try:
        return SceneSummary.from_components(room, radio, tx, rx, tx_pos, rx_pos)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _synthesis_grid(radio, tau_max: float) -> SampleGrid:
    pad = 20.0 / radio.bandwidth
    return SampleGrid.spanning(-pad, tau_max + pad, 1.0 / (4.0 * radio.bandwidth))


def _cmd_paths(args) -> int:
    doc = cfgmod.load_document(args.config)
    room = cfgmod.build_room(doc)
    radio = cfgmod.build_radio(doc)
    tx_pos, rx_pos = cfgmod.positions_from(doc)
    tx_pattern, rx_pattern = cfgmod.aimed_patterns(doc, tx_pos, rx_pos)
    tau_max = args.tau_max if args.tau_max is not None else doc["mc"]["tau_max_s"]
    paths = enumerate_paths(room, tx_pos, tx_pattern, rx_pos, rx_pattern, radio, tau_max)
    paths.to_csv(args.out)
    return 0


def _cmd_theory(args) -> int:
    doc = cfgmod.load_document(args.config)
    curves = [c.strip() for c in args.curves.split(",") if c.strip()]
    for name in curves:
        if name not in _THEORY_CURVES:
            raise ConfigError(f"unknown curve {name!r}; choose from {_THEORY_CURVES}")
    scene = _build_scene(doc, need_direct_delay=("pds" in curves and args.pds_mode == "deterministic"))

    start, stop, step = (float(v) for v in args.grid.split(","))
    taus = SampleGrid.spanning(start, stop, step).times()
    os.makedirs(args.out_dir, exist_ok=True)

    for name in curves:
        out_path = os.path.join(args.out_dir, f"{name}.csv")
        if name == "count":
            TheoryCurve(taus, theory.mean_count(scene, taus), "count").to_csv(out_path)
        elif name == "rate":
            TheoryCurve(taus, theory.mean_rate(scene, taus), "rate_per_second").to_csv(out_path)
        elif name == "pds":
            theory.pds(scene, taus, mode=args.pds_mode, corrected=args.corrected).to_csv(out_path)
        else:
            with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("tau_mix_seconds\n")
                fh.write(_FMT(theory.mixing_time(scene)) + "\n")
    return 0


def _cmd_mc(args) -> int:
    doc = cfgmod.load_document(args.config)
    cfg = cfgmod.build_mc_config(doc, runs=args.runs, seed=args.seed)
    out_dir = args.out_dir or doc.get("output", {}).get("directory")
    if out_dir is None:
        raise ConfigError("output directory required (--out-dir or output.directory)")

    result = montecarlo.run_ensemble(cfg, workers=args.threads)
    try:
        scene = SceneSummary.from_components(cfg.room, cfg.radio, cfg.tx_pattern, cfg.rx_pattern)
        report = montecarlo.compare_with_theory(result, scene)
    except ValueError as exc:
        report = {
            "mode": cfg.mode,
            "runs": cfg.runs,
            "missing_moment_runs": result.missing_moments,
            "checks": {},
            "pass": True,
            "note": f"no closed-form comparison: {exc}",
        }

    resolved = dict(doc)
    resolved["mc"] = dict(doc["mc"])
    resolved["mc"]["runs"] = cfg.runs
    resolved["mc"]["seed"] = cfg.seed
    manifest = {"package_version": __version__, "seed": cfg.seed, "config": resolved}
    montecarlo.write_bundle(result, out_dir, manifest, report)

    if args.check and not report["pass"]:
        return 1
    return 0


def _cmd_signal(args) -> int:
    doc = cfgmod.load_document(args.config)
    room = cfgmod.build_room(doc)
    radio = cfgmod.build_radio(doc)
    tx_pos, rx_pos = cfgmod.positions_from(doc)
    tx_pattern, rx_pattern = cfgmod.aimed_patterns(doc, tx_pos, rx_pos)
    tau_max = args.tau_max if args.tau_max is not None else doc["mc"]["tau_max_s"]
    paths = enumerate_paths(room, tx_pos, tx_pattern, rx_pos, rx_pattern, radio, tau_max)
    rng = None
    if args.phase_mode == "random":
        rng = np.random.Generator(np.random.Philox(key=[args.seed, 0]))
    trace = synthesize_signal(paths, radio, _synthesis_grid(radio, tau_max), args.phase_mode, rng)
    trace.to_csv(args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roomchan",
        description="Mirror-source in-room radio channel simulator and analytic toolkit",
    )
    parser.add_argument("--config", metavar="FILE", default=None, help="JSON run configuration")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("paths", help="dump the path list of a fixed scene as CSV")
    p.add_argument("--tau-max", type=float, default=None, help="delay horizon in seconds")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(handler=_cmd_paths)

    p = sub.add_parser("theory", help="write closed-form curves as CSV")
    p.add_argument("--curves", default="count,rate,pds,mixing", help="comma list: count,rate,pds,mixing")
    p.add_argument("--grid", default="0,120e-9,0.25e-9", help="delay grid start,stop,step in seconds")
    p.add_argument("--pds-mode", choices=("deterministic", "randomized"), default="randomized")
    p.add_argument("--corrected", action="store_true", help="apply the interaction-spread correction to the tail")
    p.add_argument("--out-dir", default=".", help="directory for the curve files")
    p.set_defaults(handler=_cmd_theory)

    p = sub.add_parser("mc", help="run a Monte Carlo ensemble and write the results bundle")
    p.add_argument("--runs", type=int, default=None, help="number of runs (overrides config)")
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    p.add_argument("--out-dir", default=None, help="bundle directory")
    p.add_argument("--check", action="store_true", help="exit 1 when the report fails its tolerances")
    p.add_argument("--threads", type=int, default=1, help="worker process cap")
    p.set_defaults(handler=_cmd_mc)

    p = sub.add_parser("signal", help="synthesize a received signal trace as CSV")
    p.add_argument("--tau-max", type=float, default=None, help="delay horizon in seconds")
    p.add_argument("--phase-mode", choices=("carrier", "random"), default="carrier")
    p.add_argument("--seed", type=int, default=0, help="seed for random phases")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(handler=_cmd_signal)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and usage errors
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
