"""Command-line entry point: ``streamplan <command> <config.json> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .config import load_config
from .errors import StreamPlanError
from .flowfield import advect, stream_value, stream_value_quadrature
from .harness import export_trajectory, run_bench, run_plan, shooting_solver, streamline_solver, summary_json

EXIT_NO_PATH = 2
EXIT_ERROR = 1


def _edge_payload(res) -> dict:
    counts: dict[str, int] = {}
    for s in res.outcomes:
        counts[s.value] = counts.get(s.value, 0) + 1
    out = {
        "status": res.status,
        "cost_s": res.cost if res.solved else None,
        "best_control": list(res.best_control) if res.solved else None,
        "best_index": res.best_index,
        "integrations": res.integrations_performed,
        "outcomes": counts,
    }
    if res.line is not None:
        out["kappa"] = res.line.kappa
        out["line"] = res.line.kind.value
    return out


def cmd_stream_value(args, cfg) -> int:
    field = cfg.build_field()
    p, q = (args.px, args.py), (args.qx, args.qy)
    xf = stream_value_quadrature(field, p, q, x_first=True)
    yf = stream_value_quadrature(field, p, q, x_first=False)
    print(json.dumps({"psi": stream_value(field, p, q), "psi_x_first": xf, "psi_y_first": yf,
                      "path_discrepancy": abs(xf - yf)}, indent=2))
    return 0


def cmd_edge(args, cfg) -> int:
    field = cfg.build_field()
    solver = streamline_solver(cfg) if args.method == "streamline" else shooting_solver(cfg)
    res = solver(field, (args.px, args.py), (args.qx, args.qy), cfg.integrator_params())
    print(json.dumps(_edge_payload(res), indent=2))
    return 0


def cmd_plan(args, cfg) -> int:
    outcome = run_plan(cfg, out_dir=args.out, threads=args.threads)
    sys.stdout.write(summary_json(outcome.summary))
    return 0 if outcome.plan is not None else EXIT_NO_PATH


def cmd_bench(args, cfg) -> int:
    report = run_bench(cfg, seeds=args.seeds, threads=args.threads)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_advect(args, cfg) -> int:
    field = cfg.build_field()
    dt = cfg.dt if args.dt is None else args.dt
    drift = advect(field, (args.px, args.py), dt, args.steps, args.method)
    p0 = tuple(drift.trajectory[0])
    psi = [stream_value(field, p0, tuple(x)) for x in drift.trajectory]
    payload = {
        "steps": len(drift.trajectory) - 1,
        "left_domain": drift.left_domain,
        "final": list(drift.trajectory[-1]),
        "max_abs_psi_drift": max(abs(v) for v in psi),
    }
    if args.out:
        export_trajectory(drift.trajectory, args.out, dt)
    print(json.dumps(payload, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="scenario JSON file")
    common.add_argument("--threads", type=int, default=1, help="parallel edge evaluations")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="streamplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stream-value", parents=[common], help="stream value between two points")
    for name in ("px", "py", "qx", "qy"):
        p.add_argument(name, type=float)
    p.set_defaults(func=cmd_stream_value)

    p = sub.add_parser("edge", parents=[common], help="solve one directed edge")
    for name in ("px", "py", "qx", "qy"):
        p.add_argument(name, type=float)
    p.add_argument("--method", choices=("streamline", "shooting"), default="streamline")
    p.set_defaults(func=cmd_edge)

    p = sub.add_parser("plan", parents=[common], help="roadmap plan from start to goal")
    p.add_argument("--out", default=None, help="directory for summary.json and CSV files")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", parents=[common], help="streamline vs shooting comparison")
    p.add_argument("--seeds", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("advect", parents=[common], help="idle drift and stream-value conservation")
    p.add_argument("px", type=float)
    p.add_argument("py", type=float)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--dt", type=float, default=None, help="step size (default: config dt)")
    p.add_argument("--method", choices=("rk4", "euler"), default="rk4")
    p.add_argument("--out", default=None, help="optional trajectory CSV")
    p.set_defaults(func=cmd_advect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        return args.func(args, cfg)
    except (StreamPlanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
