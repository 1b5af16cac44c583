"""PRM*-style roadmap over directed edges, Dijkstra search and plan extraction."""

from __future__ import annotations

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import MaskRejectionExhausted, NoPath, StreamPlanError, ValidationError
from .flowfield import Domain, FlowField, Vec2, as_vec2
from .shooting import DiscSampling, solve_edge_shooting
from .streamline import (
    DEFAULT_C,
    DEFAULT_V_MAX,
    EdgeSolveResult,
    IntegrationResult,
    IntegratorParams,
    integrate,
    solve_edge,
)

log = logging.getLogger(__name__)

START, GOAL = 0, 1

EdgeSolver = Callable[[FlowField, Vec2, Vec2, IntegratorParams], EdgeSolveResult]


@dataclass(frozen=True)
class StreamlineSolver:
    v_max: float = DEFAULT_V_MAX
    c: int = DEFAULT_C
    name: str = "streamline"

    def __call__(self, field, p, q, params):
        return solve_edge(field, p, q, self.v_max, self.c, params)


@dataclass(frozen=True)
class ShootingSolver:
    sampling: DiscSampling = DiscSampling()
    name: str = "shooting"

    @property
    def v_max(self) -> float:
        return self.sampling.v_max

    def __call__(self, field, p, q, params):
        return solve_edge_shooting(field, p, q, self.sampling, params)


@dataclass
class Roadmap:
    nodes: list[Vec2]
    connection_radius: float
    edges: dict[tuple[int, int], EdgeSolveResult] = field(default_factory=dict)
    unreachable: dict[tuple[int, int], EdgeSolveResult] = field(default_factory=dict)
    failures: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def attempted_pairs(self) -> int:
        return len(self.edges) + len(self.unreachable) + len(self.failures)

    @property
    def total_integrations(self) -> int:
        return sum(r.integrations_performed for r in self.edges.values()) + sum(
            r.integrations_performed for r in self.unreachable.values()
        )

    def neighbours(self) -> dict[int, list[tuple[int, float]]]:
        adj: dict[int, list[tuple[int, float]]] = {i: [] for i in range(len(self.nodes))}
        for (i, j), res in sorted(self.edges.items()):
            adj[i].append((j, res.cost))
        return adj


@dataclass(frozen=True)
class PersistentControl:
    a: Vec2
    tau: float


@dataclass(eq=False)
class Plan:
    waypoints: list[Vec2]
    controls: list[PersistentControl]
    total_time: float
    trajectory: np.ndarray
    path: list[int]

    @property
    def control_changes(self) -> int:
        return len(self.controls)


def sample_nodes(
    field: FlowField,
    n: int,
    seed: int | None,
    start: Sequence[float],
    goal: Sequence[float],
    max_attempts: int | None = None,
) -> list[Vec2]:
    """Start, goal, then ``n`` uniform free-space samples (seeded rejection)."""
    start, goal = as_vec2(start), as_vec2(goal)
    for name, pt in (("start", start), ("goal", goal)):
        if not field.is_free(pt):
            raise ValidationError(f"{name} {pt} is outside the domain or masked")
    if n < 0:
        raise ValidationError("n must be >= 0")
    rng = np.random.default_rng(seed)
    d = field.domain
    budget = max_attempts if max_attempts is not None else 100 * n + 1000
    nodes = [start, goal]
    attempts = 0
    while len(nodes) < n + 2:
        if attempts >= budget:
            raise MaskRejectionExhausted(
                f"only {len(nodes) - 2} of {n} free samples after {attempts} attempts"
            )
        attempts += 1
        pt = (float(rng.uniform(d.x_min, d.x_max)), float(rng.uniform(d.y_min, d.y_max)))
        if field.is_free(pt):
            nodes.append(pt)
    return nodes


def connection_radius(
    n_total: int, domain: Domain, gamma: float = 2.0, arrival_eps: float = 0.0
) -> float:
    """PRM* radius ``gamma * sqrt(area / pi) * sqrt(log n / n)``, at least ``3 * eps``."""
    if n_total < 2:
        raise ValidationError("n_total must be >= 2")
    r = gamma * math.sqrt(domain.area / math.pi) * math.sqrt(math.log(n_total) / n_total)
    return max(r, 3.0 * arrival_eps)


def candidate_pairs(nodes: Sequence[Vec2], r: float) -> list[tuple[int, int]]:
    pairs = []
    for i, a in enumerate(nodes):
        for j, b in enumerate(nodes):
            if i != j and math.hypot(b[0] - a[0], b[1] - a[1]) <= r:
                pairs.append((i, j))
    return pairs


def build_roadmap(
    field: FlowField,
    nodes: Sequence[Vec2],
    r: float,
    edge_solver: EdgeSolver,
    params: IntegratorParams,
    threads: int = 1,
) -> Roadmap:
    """Evaluate every ordered pair within ``r``; only solved pairs become edges.

    Solver errors (e.g. a degenerate pair) are logged and the pair is left
    unconnected. The result does not depend on ``threads``.
    """
    if not nodes:
        raise ValidationError("roadmap needs at least one node")
    nodes = [as_vec2(p) for p in nodes]
    pairs = candidate_pairs(nodes, r)

    def work(pair):
        i, j = pair
        try:
            return edge_solver(field, nodes[i], nodes[j], params)
        except StreamPlanError as exc:
            return exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, pairs))
    else:
        results = [work(p) for p in pairs]

    roadmap = Roadmap(nodes=nodes, connection_radius=r)
    for pair, res in zip(pairs, results):
        if isinstance(res, Exception):
            log.debug("edge %s skipped: %s", pair, res)
            roadmap.failures[pair] = f"{type(res).__name__}: {res}"
        elif res.solved:
            roadmap.edges[pair] = res
        else:
            roadmap.unreachable[pair] = res
    return roadmap


def shortest_path(roadmap: Roadmap, start: int = START, goal: int = GOAL) -> list[int]:
    """Dijkstra on total time; ties go to fewer edges, then lexicographic indices."""
    adj = roadmap.neighbours()
    best: dict[int, tuple[float, int, tuple[int, ...]]] = {start: (0.0, 0, (start,))}
    heap = [(0.0, 0, (start,))]
    done = set()
    while heap:
        cost, hops, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == goal:
            return list(path)
        for v, w in adj[u]:
            if v in done:
                continue
            label = (cost + w, hops + 1, path + (v,))
            if v not in best or label < best[v]:
                best[v] = label
                heapq.heappush(heap, label)
    raise NoPath(f"goal node {goal} is not reachable from node {start}")


def path_cost(roadmap: Roadmap, path: Sequence[int]) -> float:
    total = 0.0
    for i, j in zip(path, path[1:]):
        total += roadmap.edges[(i, j)].cost
    return total


def extract_plan(roadmap: Roadmap, path: Sequence[int]) -> Plan:
    """Turn a node path into persistent controls and a stitched trajectory.

    Each edge trajectory starts exactly at its waypoint; the stitched
    trajectory drops that first point for every edge after the first, so its
    rows are spaced one time step apart.
    """
    if len(path) < 2:
        raise ValidationError("a plan needs at least two nodes")
    controls = []
    pieces = []
    total = 0.0
    for k, (i, j) in enumerate(zip(path, path[1:])):
        edge = roadmap.edges[(i, j)]
        controls.append(PersistentControl(edge.best_control, edge.cost))
        total += edge.cost
        pieces.append(edge.trajectory if k == 0 else edge.trajectory[1:])
    return Plan(
        waypoints=[roadmap.nodes[i] for i in path],
        controls=controls,
        total_time=total,
        trajectory=np.vstack(pieces),
        path=list(path),
    )


def replay_plan(
    field: FlowField, plan: Plan, params: IntegratorParams, v_max: float = DEFAULT_V_MAX
) -> list[IntegrationResult]:
    """Re-integrate each persistent control from its start waypoint."""
    return [
        integrate(field, ctl.a, a, b, params, v_max)
        for ctl, a, b in zip(plan.controls, plan.waypoints, plan.waypoints[1:])
    ]
