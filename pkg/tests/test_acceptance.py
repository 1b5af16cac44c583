"""Acceptance gate: one test per criterion, each logging a PASS/FAIL line."""

import itertools
import json
import math
import time

import numpy as np
import pytest

from helpers import crossflow
from streamplan.cli import main
from streamplan.config import ScenarioConfig, config_from_dict
from streamplan.flowfield import (
    Domain,
    GriddedField,
    GyreLattice,
    LinearSaddle,
    Uniform,
    advect,
    hessian_det_psi,
    stream_value,
    stream_value_quadrature,
)
from streamplan.harness import _prepare, plan_with, run_bench, run_plan, shooting_solver, streamline_solver
from streamplan.planner import (
    StreamlineSolver,
    build_roadmap,
    connection_radius,
    extract_plan,
    path_cost,
    replay_plan,
    sample_nodes,
    shortest_path,
)
from streamplan.errors import NoPath
from streamplan.shooting import DiscSampling, solve_edge_shooting
from streamplan.streamline import IntegratorParams, LineKind, Status, control_line, integrate, solve_edge

V = 0.3


# ------------------------------------------------------------------ 1


def test_c01_endpoint_correctness(record):
    rng = np.random.default_rng(1)
    fields = [
        Uniform(0.1, -0.2, Domain(-5e4, 5e4, -5e4, 5e4)),
        LinearSaddle(1e-5, Domain(-5e4, 5e4, -5e4, 5e4)),
        GyreLattice(1.0, 25000.0, 4, 4),
    ]
    t0 = time.perf_counter()
    worst_res = worst_speed = 0.0
    checked = 0
    while checked < 1000:
        f = fields[checked % 3]
        x0, x1, y0, y1 = f.domain.bounds
        p = (rng.uniform(x0, x1), rng.uniform(y0, y1))
        q = (rng.uniform(x0, x1), rng.uniform(y0, y1))
        line = control_line(f, p, q, V)
        if line.kind is LineKind.EMPTY:
            continue
        checked += 1
        for v in (line.v_a, line.v_b):
            worst_res = max(worst_res, abs(line.residual(v)) / (V * line.distance))
            worst_speed = max(worst_speed, abs(math.hypot(*v) - V))
    elapsed = time.perf_counter() - t0
    ok = worst_res < 1e-9 and worst_speed < 1e-12 and elapsed < 1.0
    record(1, "endpoint correctness",
           ok, f"max residual/(V|PQ|)={worst_res:.2e} max speed err={worst_speed:.2e} {elapsed:.2f}s")


# ------------------------------------------------------------------ 2


def test_c02_crossflow_worked_example(record):
    field = crossflow(0.15)
    line = control_line(field, (0, 0), (10000, 0), V)
    vb_err = max(abs(line.v_b[0] - 0.259808), abs(line.v_b[1] + 0.15))
    # arrival radius tight enough that early capture stays inside one step
    res = solve_edge(field, (0, 0), (10000, 0), V, 19, IntegratorParams(arrival_eps=150.0))
    target = 10000 / 0.259808
    default = solve_edge(field, (0, 0), (10000, 0), V, 19, IntegratorParams())
    ok = vb_err < 1e-6 and res.solved and abs(res.cost - target) <= 750.0
    record(2, "crossflow worked example", ok,
           f"v_B err={vb_err:.1e} cost={res.cost:.0f}s target={target:.0f}s "
           f"(default eps cost={default.cost:.0f}s)")


# ------------------------------------------------------------------ 3


def test_c03_drift_conservation(record):
    g = GyreLattice(1.0, 1000.0, 2, 2)
    p0 = (300.0, 450.0)
    drift = advect(g, p0, dt=1.0, steps=10_000, method="rk4")
    worst = max(abs(stream_value(g, p0, x)) for x in drift.trajectory)
    bound = 1e-4 * g.v_peak * g.cell_size
    record(3, "drift conservation", worst < bound and not drift.left_domain,
           f"max |dpsi|={worst:.2e} bound={bound:.1e}")


# ------------------------------------------------------------------ 4


def test_c04_saddle_detection(record):
    run = integrate(LinearSaddle(1e-4), (0.0, 0.0), (-1000.0, 0.0), (5000.0, 5000.0),
                    IntegratorParams(stall_speed_frac=0.003), V)
    dist = math.hypot(*run.final)
    s = 1000.0
    g = GyreLattice(1.0, s, 2, 2, domain=Domain(-s, 3 * s, -s, 3 * s))
    expected = -(g.v_peak * math.pi / s) ** 2
    corners = [(i * s, j * s) for i in range(3) for j in range(3)]
    rel = max(abs(hessian_det_psi(g, c, s / 100) - expected) / abs(expected) for c in corners)
    ok = run.status is Status.STALLED and dist < 10.0 and rel < 0.05
    record(4, "saddle detection", ok,
           f"status={run.status.value} |final|={dist:.2f}m corner det rel err={rel:.1e}")


# ------------------------------------------------------------------ 5


def test_c05_path_independence(record):
    g = GyreLattice(1.0, 1000.0, 2, 2)
    grid = GriddedField.sample(g, (0.0, 0.0), 10.0, 10.0, 201, 201)
    scale = g.v_peak * g.cell_size / math.pi  # peak stream value
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        p, q = tuple(rng.uniform(0, 2000, 2)), tuple(rng.uniform(0, 2000, 2))
        a = stream_value_quadrature(grid, p, q, x_first=True)
        b = stream_value_quadrature(grid, p, q, x_first=False)
        worst = max(worst, abs(a - b) / scale)
    record(5, "path independence", worst < 1e-3, f"max |xfirst-yfirst|/psi_scale={worst:.2e}")


# ------------------------------------------------------------------ 6


def test_c06_pruning_guarantee(record):
    params = IntegratorParams(horizon=200)
    sampling = DiscSampling.polar(20, 18)
    rng = np.random.default_rng(6)
    counts = []
    for _ in range(10):
        vy = rng.uniform(0.31, 1.0) * rng.choice([-1, 1])
        field = crossflow(vy)
        line = control_line(field, (0, 0), (10000, 0), V)
        assert abs(line.kappa) > 1
        sl = solve_edge(field, (0, 0), (10000, 0), V, 19, params)
        sh = solve_edge_shooting(field, (0, 0), (10000, 0), sampling, params)
        counts.append((sl.integrations_performed, sh.integrations_performed))
    ok = all(a == 0 and b == len(sampling) for a, b in counts)
    record(6, "pruning guarantee", ok, f"(streamline, shooting) counts={sorted(set(counts))}")


# ------------------------------------------------------------------ 7


@pytest.mark.slow
def test_c07_work_ratio(record):
    cfg = ScenarioConfig(gamma=2.0)
    assert (cfg.n, cfg.c, len(cfg.disc_sampling())) == (49, 19, 361)
    field, nodes, r = _prepare(cfg, None)
    sl = plan_with(cfg, streamline_solver(cfg), field, nodes, r)
    sh = plan_with(cfg, shooting_solver(cfg), field, nodes, r)
    expected = {LineKind.SEGMENT: 19, LineKind.TANGENT: 1, LineKind.EMPTY: 0}
    per_edge_ok = all(
        res.integrations_performed == expected[res.line.kind]
        for res in [*sl.roadmap.edges.values(), *sl.roadmap.unreachable.values()]
    )
    segments = sum(
        res.line.kind is LineKind.SEGMENT
        for res in [*sl.roadmap.edges.values(), *sl.roadmap.unreachable.values()]
    )
    shooting_ok = all(
        res.integrations_performed == 361
        for res in [*sh.roadmap.edges.values(), *sh.roadmap.unreachable.values()]
    )
    ratio = sh.roadmap.total_integrations / sl.roadmap.total_integrations
    ok = per_edge_ok and shooting_ok and ratio >= 15
    record(7, "work ratio", ok,
           f"attempted={sl.roadmap.attempted_pairs} segment edges at 19={segments} "
           f"integrations {sl.roadmap.total_integrations} vs {sh.roadmap.total_integrations} ratio={ratio:.1f}x")


# ------------------------------------------------------------------ 8


def gyre_ensemble(count=20):
    s, cells = 100000.0, 4
    side = s * cells
    rng = np.random.default_rng(123)
    base = {
        "field": {"type": "gyre", "v_peak": 1.0, "cell_size": s, "n_x": cells, "n_y": cells},
        "gamma": 3.0,
        # equal per-edge budget: 2 rings x 9 + centre = 19 = C
        "baseline": {"scheme": "polar", "n_r": 2, "n_theta": 9},
    }
    configs = []
    for k in range(count):
        while True:
            a, b = rng.uniform(0.05 * side, 0.95 * side, 2), rng.uniform(0.05 * side, 0.95 * side, 2)
            if math.dist(a, b) > 0.5 * side:
                break
        configs.append(config_from_dict({**base, "start": list(a), "goal": list(b), "seed": k}))
    return configs


@pytest.mark.slow
def test_c08_quality_comparison(record):
    configs = gyre_ensemble()
    assert len(configs[0].disc_sampling()) == configs[0].c
    t0 = time.perf_counter()
    report = run_bench(configs[0], configs=configs)
    elapsed = time.perf_counter() - t0
    agg = report.aggregate()
    solved, wins = agg["instances_solved"], agg["streamline_not_worse"]
    share = wins / solved if solved else 0.0
    ok = solved > 0 and share >= 0.7 and elapsed < 300
    med = agg["median_cost_s"]
    record(8, "quality comparison", ok,
           f"streamline<=shooting in {wins}/{solved} solved ({share:.0%}); median cost "
           f"{med['streamline']} vs {med['shooting']} s; {elapsed:.0f}s")


# ------------------------------------------------------------------ 9


def brute_force(roadmap, start=0, goal=1):
    n = len(roadmap.nodes)
    others = [i for i in range(n) if i not in (start, goal)]
    best = math.inf
    for k in range(len(others) + 1):
        for mid in itertools.permutations(others, k):
            path = (start, *mid, goal)
            if all(e in roadmap.edges for e in zip(path, path[1:])):
                best = min(best, path_cost(roadmap, path))
    return best


def test_c09_dijkstra_oracle(record):
    g = GyreLattice(1.0, 100000.0, 2, 2)
    params = IntegratorParams()
    checked = mismatches = 0
    for seed in range(12):
        for n in range(0, 7):
            nodes = sample_nodes(g, n, seed, (30000.0, 40000.0), (170000.0, 150000.0))
            r = connection_radius(len(nodes), g.domain, 4.0, params.eps(V)) if len(nodes) > 1 else 0
            rm = build_roadmap(g, nodes, r, StreamlineSolver(V, 7), params)
            best = brute_force(rm)
            try:
                got = path_cost(rm, shortest_path(rm))
            except NoPath:
                got = math.inf
            checked += 1
            mismatches += got != best
    record(9, "dijkstra oracle", mismatches == 0, f"{checked} roadmaps of <=8 nodes, {mismatches} mismatches")


# ------------------------------------------------------------------ 10


def replay_ok(field, plan, cfg):
    params = cfg.integrator_params()
    runs = replay_plan(field, plan, params, cfg.v_max)
    eps = params.eps(cfg.v_max)
    hits = all(
        run.status is Status.REACHED and math.dist(run.final, w) <= eps
        for run, w in zip(runs, plan.waypoints[1:])
    )
    goal_ok = math.dist(runs[-1].final, plan.waypoints[-1]) <= eps
    changes_ok = plan.control_changes == len(plan.path) - 1
    return hits and goal_ok and changes_ok


@pytest.mark.slow
def test_c10_plan_replay(record):
    scenarios = [ScenarioConfig()] + [c for c in gyre_ensemble(6)] + [
        config_from_dict({"field": {"type": "uniform", "v": 0.15}, "start": [0, 0], "goal": [30000, 0], "n": 10}),
    ]
    plans = failures = 0
    for cfg in scenarios:
        out = run_plan(cfg)
        if out.plan is None:
            continue
        plans += 1
        failures += not replay_ok(cfg.build_field(), out.plan, cfg)
    record(10, "plan replay", plans > 0 and failures == 0, f"{plans} plans replayed, {failures} failures")


# ------------------------------------------------------------------ 11


def test_c11_endpoint_hypothesis_reported(record):
    cfg = config_from_dict({"field": {"type": "gyre", "cell_size": 100000.0, "n_x": 2, "n_y": 2},
                            "start": [30000, 40000], "goal": [170000, 150000], "n": 15,
                            "baseline": {"n_r": 2, "n_theta": 9}})
    report = run_bench(cfg)
    frac = report.to_dict()["endpoint_fraction"][0]
    ok = frac is not None and 0.0 <= frac <= 1.0
    record(11, "endpoint hypothesis (reported)", ok, f"fraction of solved edges at index 0 or C-1 = {frac}")


# ------------------------------------------------------------------ 12


def test_c12_determinism(record, tmp_path, capsys):
    cfg = tmp_path / "gyre.json"
    cfg.write_text(json.dumps({"n": 30}))
    outputs = []
    for k, threads in enumerate((1, 1, 4)):
        code = main(["plan", str(cfg), "--out", str(tmp_path / f"run{k}"), "--threads", str(threads)])
        capsys.readouterr()
        assert code in (0, 2)
        outputs.append((tmp_path / f"run{k}" / "summary.json").read_bytes())
    ok = outputs[0] == outputs[1] == outputs[2]
    record(12, "determinism", ok, f"3 runs (threads 1,1,4) {'identical' if ok else 'differ'}; "
                                  f"status={json.loads(outputs[0])['status']}")
