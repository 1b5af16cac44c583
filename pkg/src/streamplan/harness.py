"""Scenario runners: plan, streamline-vs-shooting benchmark, CSV export."""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ScenarioConfig
from .errors import NoPath, ValidationError
from .flowfield import FlowField
from .planner import (
    Plan,
    Roadmap,
    ShootingSolver,
    StreamlineSolver,
    build_roadmap,
    connection_radius,
    extract_plan,
    sample_nodes,
    shortest_path,
)


def streamline_solver(config: ScenarioConfig) -> StreamlineSolver:
    return StreamlineSolver(v_max=config.v_max, c=config.c)


def shooting_solver(config: ScenarioConfig) -> ShootingSolver:
    return ShootingSolver(config.disc_sampling())


def endpoint_fraction(roadmap: Roadmap) -> float | None:
    """Share of solved streamline edges whose best sample is v_A or v_B."""
    hits = total = 0
    for res in roadmap.edges.values():
        if res.line is None or res.best_index is None:
            continue
        total += 1
        if res.best_index in (0, len(res.outcomes) - 1):
            hits += 1
    return hits / total if total else None


@dataclass
class PlanOutcome:
    status: str
    plan: Plan | None
    roadmap: Roadmap
    summary: dict


def _prepare(config: ScenarioConfig, field: FlowField | None):
    field = config.build_field() if field is None else field
    nodes = sample_nodes(field, config.n, config.seed, config.start, config.goal)
    r = connection_radius(len(nodes), field.domain, config.gamma, config.eps)
    return field, nodes, r


def plan_with(
    config: ScenarioConfig,
    solver,
    field: FlowField,
    nodes,
    r: float,
    threads: int = 1,
) -> PlanOutcome:
    roadmap = build_roadmap(field, nodes, r, solver, config.integrator_params(), threads=threads)
    try:
        path = shortest_path(roadmap)
    except NoPath:
        plan = None
    else:
        plan = extract_plan(roadmap, path)
    summary = {
        "status": "Solved" if plan else "NoPath",
        "total_time_s": plan.total_time if plan else None,
        "control_changes": plan.control_changes if plan else None,
        "integrations": roadmap.total_integrations,
        "nodes": len(nodes),
        "edges_solved": len(roadmap.edges),
        "endpoint_fraction": endpoint_fraction(roadmap),
    }
    return PlanOutcome(summary["status"], plan, roadmap, summary)


def summary_json(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True, indent=2) + "\n"


def run_plan(
    config: ScenarioConfig,
    out_dir: str | Path | None = None,
    threads: int = 1,
    field: FlowField | None = None,
) -> PlanOutcome:
    """Sample nodes, build the streamline roadmap, search it, and export files.

    Writes ``summary.json`` always (when ``out_dir`` is given) and
    ``trajectory.csv`` / ``waypoints.csv`` when a plan exists.
    """
    field, nodes, r = _prepare(config, field)
    outcome = plan_with(config, streamline_solver(config), field, nodes, r, threads)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.json").write_text(summary_json(outcome.summary), encoding="utf-8")
        if outcome.plan is not None:
            export_trajectory(outcome.plan.trajectory, out / "trajectory.csv", config.dt)
            export_waypoints(outcome.plan.waypoints, out / "waypoints.csv")
    return outcome


@dataclass
class MethodRun:
    status: str
    cost_s: float | None
    integrations: int
    wall_s: float
    control_changes: int | None
    attempted_edges: int
    edges_solved: int
    samples_per_edge: int


@dataclass
class BenchReport:
    seeds: list[int]
    streamline: list[MethodRun] = field(default_factory=list)
    shooting: list[MethodRun] = field(default_factory=list)
    endpoint_fraction: list[float | None] = field(default_factory=list)
    baseline_sampling: dict = field(default_factory=dict)

    def _median_cost(self, runs: Sequence[MethodRun]) -> float | None:
        costs = [r.cost_s for r in runs if r.cost_s is not None]
        return statistics.median(costs) if costs else None

    def aggregate(self) -> dict:
        sl_int = sum(r.integrations for r in self.streamline)
        sh_int = sum(r.integrations for r in self.shooting)
        wins = solved = 0
        for a, b in zip(self.streamline, self.shooting):
            ca = math.inf if a.cost_s is None else a.cost_s
            cb = math.inf if b.cost_s is None else b.cost_s
            if math.isinf(ca) and math.isinf(cb):
                continue
            solved += 1
            wins += ca <= cb
        fracs = [f for f in self.endpoint_fraction if f is not None]
        return {
            "median_cost_s": {
                "streamline": self._median_cost(self.streamline),
                "shooting": self._median_cost(self.shooting),
            },
            "integrations": {"streamline": sl_int, "shooting": sh_int},
            "integration_ratio": sh_int / sl_int if sl_int else None,
            "wall_s": {
                "streamline": sum(r.wall_s for r in self.streamline),
                "shooting": sum(r.wall_s for r in self.shooting),
            },
            "streamline_not_worse": wins,
            "instances_solved": solved,
            "endpoint_fraction_mean": sum(fracs) / len(fracs) if fracs else None,
        }

    def to_dict(self) -> dict:
        return {
            "seeds": self.seeds,
            "baseline_sampling": self.baseline_sampling,
            "streamline": [asdict(r) for r in self.streamline],
            "shooting": [asdict(r) for r in self.shooting],
            "endpoint_fraction": self.endpoint_fraction,
            "aggregate": self.aggregate(),
        }


def _method_run(outcome: PlanOutcome, wall: float, samples: int) -> MethodRun:
    plan = outcome.plan
    return MethodRun(
        status=outcome.status,
        cost_s=plan.total_time if plan else None,
        integrations=outcome.roadmap.total_integrations,
        wall_s=wall,
        control_changes=plan.control_changes if plan else None,
        attempted_edges=outcome.roadmap.attempted_pairs,
        edges_solved=len(outcome.roadmap.edges),
        samples_per_edge=samples,
    )


def run_bench(
    config: ScenarioConfig,
    seeds: int = 1,
    threads: int = 1,
    field: FlowField | None = None,
    configs: Sequence[ScenarioConfig] | None = None,
) -> BenchReport:
    """Run both edge solvers on identical nodes, radius and integrator settings.

    By default seeds ``config.seed .. config.seed + seeds - 1`` are used;
    pass ``configs`` to benchmark an explicit list of scenarios instead.
    Nothing is asserted; the report carries the measurements.
    """
    scenarios = list(configs) if configs is not None else [
        config.with_seed(config.seed + k) for k in range(seeds)
    ]
    sampling = config.disc_sampling()
    report = BenchReport(
        seeds=[c.seed for c in scenarios],
        baseline_sampling={**asdict(sampling), "samples": len(sampling)},
    )
    for cfg in scenarios:
        fld, nodes, r = _prepare(cfg, field)
        t0 = time.perf_counter()
        sl = plan_with(cfg, streamline_solver(cfg), fld, nodes, r, threads)
        t1 = time.perf_counter()
        sh = plan_with(cfg, shooting_solver(cfg), fld, nodes, r, threads)
        t2 = time.perf_counter()
        report.streamline.append(_method_run(sl, t1 - t0, cfg.c))
        report.shooting.append(_method_run(sh, t2 - t1, len(cfg.disc_sampling())))
        report.endpoint_fraction.append(sl.summary["endpoint_fraction"])
    return report


# ------------------------------------------------------------------ export


def export_trajectory(traj, destination: str | Path, dt: float) -> None:
    """CSV rows ``t,x,y`` at ``dt`` spacing (12 significant digits)."""
    traj = np.asarray(traj, dtype=float)
    if traj.ndim != 2 or traj.shape[0] == 0 or traj.shape[1] != 2:
        raise ValidationError("trajectory must be a non-empty (n, 2) array")
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y"])
        for k, (x, y) in enumerate(traj):
            w.writerow([f"{k * dt:.12g}", f"{x:.12g}", f"{y:.12g}"])


def export_waypoints(waypoints, destination: str | Path) -> None:
    if len(waypoints) == 0:
        raise ValidationError("no waypoints to export")
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "x", "y"])
        for i, (x, y) in enumerate(waypoints):
            w.writerow([i, f"{x:.12g}", f"{y:.12g}"])


def read_trajectory(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`export_trajectory`; returns ``(t, xy)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:3]
