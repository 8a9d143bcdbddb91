"""Command-line entry point.

    cavsim run SCENARIO -o OUT [--plot] [--checkpoint M] [--force]
    cavsim compare BASELINE ATTACKED -o OUT [--plot] [--checkpoint M] [--force]

Exit status: 0 clean run, 1 configuration or I/O error, 2 the (attacked)
run ended with at least one collision.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .engine import Scenario, run
from .errors import ConfigError
from .metrics import RunSummary, summarize
from .plot import render_timeseries_svg
from .scenario_io import load_scenario, summary_to_json, write_trajectory_csv

log = logging.getLogger("cavsim")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COLLISION = 2


class _OutputExists(Exception):
    pass


def _load(path: str, checkpoint: float | None) -> Scenario:
    scenario = load_scenario(path)
    if checkpoint is not None:
        scenario = dataclasses.replace(scenario, checkpoint=checkpoint)
    return scenario


def _write_all(out_dir: Path, outputs: dict[str, str], force: bool):
    # refuse before writing anything so a partial overwrite never happens
    if not force:
        for name in outputs:
            if (out_dir / name).exists():
                raise _OutputExists(f"{out_dir / name} exists (use --force to overwrite)")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in outputs.items():
        (out_dir / name).write_text(text, encoding="utf-8")
        log.debug("wrote %s", out_dir / name)


def _one_line(summary: RunSummary) -> str:
    max_delay = summary.max_delay
    delay = "n/a" if max_delay is None else f"{max_delay:.3f} s"
    return f"collisions={len(summary.collisions)} max_delay={delay}"


def cmd_run(args) -> int:
    scenario = _load(args.scenario, args.checkpoint)
    traj, events, summary = run(scenario)
    outputs = {"trajectory.csv": write_trajectory_csv(traj), "summary.json": summary_to_json(summary)}
    if args.plot:
        outputs["figure.svg"] = render_timeseries_svg(traj, events)
    _write_all(Path(args.out), outputs, args.force)
    print(_one_line(summary))
    return EXIT_COLLISION if summary.collisions else EXIT_OK


def cmd_compare(args) -> int:
    baseline = _load(args.baseline, args.checkpoint)
    attacked = _load(args.attacked, args.checkpoint)
    for name in ("n_vehicles", "params", "dt"):
        if getattr(baseline, name) != getattr(attacked, name):
            raise ConfigError(
                f"baseline and attacked scenarios describe different platoons: {name} "
                f"{getattr(baseline, name)!r} != {getattr(attacked, name)!r}"
            )
    base_log, _, _ = run(baseline)
    att_log, events, _ = run(attacked)
    summary = summarize(att_log, events, attacked.checkpoint, baseline=base_log)
    outputs = {
        "baseline_trajectory.csv": write_trajectory_csv(base_log),
        "attacked_trajectory.csv": write_trajectory_csv(att_log),
        "summary.json": summary_to_json(summary),
    }
    if args.plot:
        outputs["figure.svg"] = render_timeseries_svg(att_log, events)
    _write_all(Path(args.out), outputs, args.force)
    print(_one_line(summary))
    return EXIT_COLLISION if summary.collisions else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavsim", description="CAV platoon cyberattack simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--out", required=True, help="output directory (created if absent)")
        p.add_argument("--plot", action="store_true", help="also write figure.svg")
        p.add_argument("--checkpoint", type=float, default=None, help="arrival checkpoint in m")
        p.add_argument("--force", action="store_true", help="overwrite existing output files")

    p_run = sub.add_parser("run", help="simulate one scenario")
    p_run.add_argument("scenario")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="simulate a baseline and an attacked scenario and report delays")
    p_cmp.add_argument("baseline")
    p_cmp.add_argument("attacked")
    common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, _OutputExists, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
