"""Command-line interface.

Verbs:
    run       execute a scenario, write JSONL/CSV logs and a metrics report
    sweep     grid the proximity index over two pose coordinates, write CSV
    serve     run an interactive session with the WebSocket telemetry server
    metrics   recompute the metrics report from a stored JSONL log
    validate  check a scenario file and exit
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, ScenarioError, parse_scenario
from .geometry import Pose
from .kinematics import DegeneratePoseError, jacobians
from .logio import read_jsonl, write_csv, write_jsonl, write_metrics
from .loop import run_scenario
from .metrics import metrics_report
from .screws import omega_indices

POSE_AXES = ("x", "z", "theta", "psi")


def _load_config(args) -> ScenarioConfig:
    if args.config:
        config = parse_scenario(args.config)
    else:
        config = ScenarioConfig()
    if getattr(args, "mode", None):
        config.mode = args.mode
        config.validate()
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    return config


def cmd_run(args) -> int:
    config = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pacer = None
    if args.realtime:
        import time

        def pacer(period, deadline=[None]):
            now = time.monotonic()
            if deadline[0] is None:
                deadline[0] = now
            deadline[0] += period
            if deadline[0] > now:
                time.sleep(deadline[0] - now)

    result = run_scenario(config, pacer=pacer)
    write_jsonl(result.records, out / "log.jsonl")
    write_csv(result.records, out / "log.csv")
    write_metrics(result.report, out / "metrics.json")
    print(json.dumps(result.report, indent=2, sort_keys=True))
    if result.fault:
        print(f"scenario halted on fault: {result.fault}", file=sys.stderr)
        return 2
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args)
    geometry = config.geometry
    if args.axis_a not in POSE_AXES or args.axis_b not in POSE_AXES:
        print(f"axes must be from {POSE_AXES}", file=sys.stderr)
        return 2
    base = config.reference_pose.as_array()
    grid_a = np.linspace(args.min_a, args.max_a, args.steps_a)
    grid_b = np.linspace(args.min_b, args.max_b, args.steps_b)
    ia, ib = POSE_AXES.index(args.axis_a), POSE_AXES.index(args.axis_b)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([args.axis_a, args.axis_b, "min_omega_deg", "det_jd", "pair"])
        for a in grid_a:
            for b in grid_b:
                coords = base.copy()
                coords[ia], coords[ib] = a, b
                pose = Pose.from_array(coords)
                try:
                    om = omega_indices(pose, geometry)
                    det = float(np.linalg.det(jacobians(pose, geometry)[0]))
                    writer.writerow(
                        [repr(float(a)), repr(float(b)), repr(om.min_value),
                         repr(det), om.pair_label()]
                    )
                except DegeneratePoseError:
                    writer.writerow([repr(float(a)), repr(float(b)), "", "", ""])
    print(f"wrote {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import make_app

    config = _load_config(args)
    if config.force_source != "interactive":
        print("note: scenario has a scripted force source; commands are ignored "
              "until a scenario with force_source.type='interactive' is loaded",
              file=sys.stderr)
    app = make_app(config, realtime=not args.no_realtime)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_metrics(args) -> int:
    records = read_jsonl(args.log)
    report = metrics_report(records)
    if args.out:
        write_metrics(report, args.out)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    try:
        config = parse_scenario(args.config)
    except ScenarioError as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return 1
    print(f"OK: mode={config.mode} duration={config.duration}s "
          f"seed={config.seed} force_source={config.force_source}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="upsrpu",
        description="Admittance control with real-time Type II singularity "
        "avoidance for a 3UPS+RPU parallel robot, simulated.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="run a scenario to completion")
    run.add_argument("--config", help="scenario JSON (defaults apply if omitted)")
    run.add_argument("--mode", choices=("conventional", "complemented"))
    run.add_argument("--seed", type=int)
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--realtime", action="store_true",
                     help="pace the loop to wall clock instead of free-running")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="proximity-index heatmap over a pose grid")
    sweep.add_argument("--config", help="scenario JSON for geometry and base pose")
    sweep.add_argument("--axis-a", default="psi")
    sweep.add_argument("--min-a", type=float, default=-1.2)
    sweep.add_argument("--max-a", type=float, default=1.2)
    sweep.add_argument("--steps-a", type=int, default=61)
    sweep.add_argument("--axis-b", default="z")
    sweep.add_argument("--min-b", type=float, default=0.68)
    sweep.add_argument("--max-b", type=float, default=0.82)
    sweep.add_argument("--steps-b", type=int, default=15)
    sweep.add_argument("--out", default="sweep.csv")
    sweep.set_defaults(func=cmd_sweep)

    serve = sub.add_parser("serve", help="interactive WebSocket session")
    serve.add_argument("--config", help="scenario JSON (interactive force source)")
    serve.add_argument("--mode", choices=("conventional", "complemented"))
    serve.add_argument("--seed", type=int)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8234)
    serve.add_argument("--no-realtime", action="store_true",
                       help="run the loop as fast as possible (batch pacing)")
    serve.set_defaults(func=cmd_serve)

    metrics = sub.add_parser("metrics", help="recompute metrics from a JSONL log")
    metrics.add_argument("log", help="path to log.jsonl")
    metrics.add_argument("--out", help="write the report JSON here as well")
    metrics.set_defaults(func=cmd_metrics)

    validate = sub.add_parser("validate", help="check a scenario file")
    validate.add_argument("config")
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
