"""Streamline-based edge search between two sample points.

For a constant control ``v_g`` the superimposed stream value between P and
Q is ``psi_v(P, Q) + u_g dy - v_g dx``. Only controls on the line where
that vanishes can carry the vehicle from P to Q, so the search reduces to
sampling the chord of that line inside the speed disc.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .errors import DegeneratePair, EmptyLine, ValidationError
from .flowfield import FlowField, Vec2, as_vec2, stream_value

DEFAULT_V_MAX = 0.3
DEFAULT_DT = 750.0
DEFAULT_HORIZON = 2000
DEFAULT_C = 19
TANGENT_TOL = 1e-12


class LineKind(enum.Enum):
    EMPTY = "Empty"
    TANGENT = "Tangent"
    SEGMENT = "Segment"


class Status(enum.Enum):
    REACHED = "Reached"
    HORIZON_EXCEEDED = "HorizonExceeded"
    STALLED = "Stalled"
    LEFT_DOMAIN = "LeftDomain"


_STATUS_FROM_CODE = {
    K.REACHED: Status.REACHED,
    K.HORIZON_EXCEEDED: Status.HORIZON_EXCEEDED,
    K.STALLED: Status.STALLED,
    K.LEFT_DOMAIN: Status.LEFT_DOMAIN,
}


@dataclass(frozen=True)
class ControlLine:
    p: Vec2
    q: Vec2
    delta: float
    kappa: float
    v_max: float
    psi_v: float
    kind: LineKind
    v_a: Vec2 | None = None
    v_b: Vec2 | None = None

    @property
    def distance(self) -> float:
        return math.hypot(self.q[0] - self.p[0], self.q[1] - self.p[1])

    def residual(self, v_g: Sequence[float]) -> float:
        """Superimposed stream value ``psi_v + psi_g``; zero on the line."""
        return self.psi_v + psi_g(v_g, self.p, self.q)


@dataclass(frozen=True)
class IntegratorParams:
    """Integration settings shared by both edge solvers.

    ``arrival_eps`` defaults to ``1.5 * v_max * dt`` and ``hessian_h`` to the
    field's own default stencil when left as ``None``.
    """

    dt: float = DEFAULT_DT
    horizon: int = DEFAULT_HORIZON
    arrival_eps: float | None = None
    stall_speed_frac: float = 0.01
    hessian_h: float | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValidationError("horizon must be an integer >= 1")
        if self.arrival_eps is not None and not self.arrival_eps > 0:
            raise ValidationError("arrival_eps must be positive")
        if not 0 < self.stall_speed_frac < 1:
            raise ValidationError("stall_speed_frac must lie in (0, 1)")
        if self.hessian_h is not None and not self.hessian_h > 0:
            raise ValidationError("hessian_h must be positive")

    def eps(self, v_max: float) -> float:
        return 1.5 * v_max * self.dt if self.arrival_eps is None else self.arrival_eps


@dataclass(frozen=True, eq=False)
class IntegrationResult:
    status: Status
    trajectory: np.ndarray
    dt: float
    closest_approach: float

    @property
    def steps(self) -> int:
        return len(self.trajectory) - 1

    @property
    def elapsed(self) -> float:
        return self.steps * self.dt

    @property
    def final(self) -> Vec2:
        return float(self.trajectory[-1, 0]), float(self.trajectory[-1, 1])


@dataclass(eq=False)
class EdgeSolveResult:
    solved: bool
    best_control: Vec2 | None
    best_index: int | None
    cost: float
    integrations_performed: int
    outcomes: list[Status] = field(default_factory=list)
    controls: list[Vec2] = field(default_factory=list)
    trajectory: np.ndarray | None = None
    line: ControlLine | None = None

    @property
    def status(self) -> str:
        return "Solved" if self.solved else "Unreachable"


def psi_g(v_g: Sequence[float], p: Sequence[float], q: Sequence[float]) -> float:
    """Stream value of the uniform 'flow due to control' between p and q."""
    return v_g[0] * (q[1] - p[1]) - v_g[1] * (q[0] - p[0])


def control_line(
    field: FlowField, p: Sequence[float], q: Sequence[float], v_max: float, arrival_eps: float = 0.0
) -> ControlLine:
    """Feasible-control locus for the directed pair (p, q) and its disc endpoints."""
    p = as_vec2(p)
    q = as_vec2(q)
    if not v_max > 0:
        raise ValidationError("v_max must be positive")
    dist = math.hypot(q[0] - p[0], q[1] - p[1])
    if dist == 0.0 or dist < arrival_eps:
        raise DegeneratePair(f"|PQ| = {dist:.6g} m is below the arrival threshold {arrival_eps:.6g} m")
    psi_v = stream_value(field, p, q)
    delta = math.atan2(q[1] - p[1], q[0] - p[0])
    kappa = psi_v / (v_max * dist)
    if abs(kappa) > 1.0 + TANGENT_TOL:
        return ControlLine(p, q, delta, kappa, v_max, psi_v, LineKind.EMPTY)
    if abs(abs(kappa) - 1.0) <= TANGENT_TOL:
        kind = LineKind.TANGENT
        spread = 0.0 if kappa > 0 else math.pi
    else:
        kind = LineKind.SEGMENT
        spread = math.acos(kappa)
    theta_a = delta + math.pi / 2 + spread
    theta_b = delta + math.pi / 2 - spread
    v_a = (v_max * math.cos(theta_a), v_max * math.sin(theta_a))
    v_b = (v_max * math.cos(theta_b), v_max * math.sin(theta_b))
    if kind is LineKind.TANGENT:
        v_a = v_b
    return ControlLine(p, q, delta, kappa, v_max, psi_v, kind, v_a, v_b)


def sample_controls(line: ControlLine, c: int) -> list[Vec2]:
    """``c`` controls evenly spaced along the chord from v_A to v_B inclusive."""
    if line.kind is LineKind.EMPTY:
        raise EmptyLine("control line misses the speed disc (|kappa| > 1)")
    if line.kind is LineKind.TANGENT:
        if c < 1:
            raise ValidationError("need c >= 1")
        return [line.v_a] * c
    if c < 2:
        raise ValidationError("a segment needs c >= 2 samples to include both endpoints")
    (ax, ay), (bx, by) = line.v_a, line.v_b
    out = []
    for i in range(c):
        if i == 0:
            out.append((ax, ay))
        elif i == c - 1:
            out.append((bx, by))
        else:
            t = i / (c - 1)
            out.append(((1 - t) * ax + t * bx, (1 - t) * ay + t * by))
    return out


def integrate(
    field: FlowField,
    v_g: Sequence[float],
    p: Sequence[float],
    q: Sequence[float],
    params: IntegratorParams,
    v_max: float = DEFAULT_V_MAX,
) -> IntegrationResult:
    """Forward-Euler shoot ``x <- x + (F(x) + v_g) dt`` from p towards q.

    After every step the checks run in order: arrival within eps of q,
    stall (net speed below ``stall_speed_frac * v_max`` while the
    stream-function Hessian determinant is negative), leaving the free
    domain, and finally the step horizon.
    """
    ux, uy = as_vec2(v_g)
    px, py = as_vec2(p)
    qx, qy = as_vec2(q)
    h = field.default_hessian_h if params.hessian_h is None else params.hessian_h
    traj = np.empty((params.horizon + 1, 2))
    code, steps, closest = K.euler_shoot(
        *field._kargs, px, py, qx, qy, ux, uy,
        float(params.dt), int(params.horizon), float(params.eps(v_max)),
        float(params.stall_speed_frac * v_max), float(h), traj,
    )
    return IntegrationResult(_STATUS_FROM_CODE[code], traj[: steps + 1].copy(), params.dt, closest)


def best_of(
    field: FlowField,
    controls: Sequence[Vec2],
    p: Vec2,
    q: Vec2,
    params: IntegratorParams,
    v_max: float,
) -> EdgeSolveResult:
    """Shoot every control and keep the fastest arrival (lowest index on ties)."""
    outcomes = []
    best = None
    best_index = None
    for i, a in enumerate(controls):
        run = integrate(field, a, p, q, params, v_max)
        outcomes.append(run.status)
        if run.status is Status.REACHED and (best is None or run.steps < best.steps):
            best, best_index = run, i
    if best is None:
        return EdgeSolveResult(False, None, None, math.inf, len(controls), outcomes, list(controls))
    return EdgeSolveResult(
        True, tuple(controls[best_index]), best_index, best.elapsed, len(controls),
        outcomes, list(controls), best.trajectory,
    )


def solve_edge(
    field: FlowField,
    p: Sequence[float],
    q: Sequence[float],
    v_max: float = DEFAULT_V_MAX,
    c: int = DEFAULT_C,
    params: IntegratorParams | None = None,
) -> EdgeSolveResult:
    """Time-optimal persistent control from p to q over the sampled control line.

    Pairs whose stream-value offset exceeds what the vehicle can cancel
    (``|kappa| > 1``) are rejected without any integration.
    """
    params = IntegratorParams() if params is None else params
    line = control_line(field, p, q, v_max, params.eps(v_max))
    if line.kind is LineKind.EMPTY:
        return EdgeSolveResult(False, None, None, math.inf, 0, line=line)
    n = 1 if line.kind is LineKind.TANGENT else c
    result = best_of(field, sample_controls(line, n), line.p, line.q, params, v_max)
    result.line = line
    return result
