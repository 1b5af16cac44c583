"""Naive shooting baseline: forward-integrate controls covering the whole speed disc."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneratePair, ValidationError
from .flowfield import FlowField, Vec2, as_vec2
from .streamline import DEFAULT_V_MAX, EdgeSolveResult, IntegratorParams, best_of


@dataclass(frozen=True)
class DiscSampling:
    """Layout of baseline controls.

    ``scheme="polar"`` places ``n_theta`` controls on each of ``n_r`` rings
    (outermost at ``v_max``) plus the zero control; ``scheme="square"``
    keeps the points of an ``n x n`` lattice over ``[-v_max, v_max]^2``
    that lie inside the disc.
    """

    scheme: str = "polar"
    n_r: int = 20
    n_theta: int = 18
    n: int = 19
    v_max: float = DEFAULT_V_MAX

    def __post_init__(self):
        if self.scheme not in ("polar", "square"):
            raise ValidationError(f"unknown disc sampling scheme {self.scheme!r}")
        if self.scheme == "polar" and (self.n_r < 1 or self.n_theta < 1):
            raise ValidationError("polar sampling needs n_r, n_theta >= 1")
        if self.scheme == "square" and self.n < 1:
            raise ValidationError("square sampling needs n >= 1")
        if not self.v_max > 0:
            raise ValidationError("v_max must be positive")

    @classmethod
    def polar(cls, n_r: int, n_theta: int, v_max: float = DEFAULT_V_MAX) -> "DiscSampling":
        return cls("polar", n_r=n_r, n_theta=n_theta, v_max=v_max)

    @classmethod
    def square(cls, n: int, v_max: float = DEFAULT_V_MAX) -> "DiscSampling":
        return cls("square", n=n, v_max=v_max)

    def __len__(self) -> int:
        return len(sample_disc_controls(self))


def sample_disc_controls(sampling: DiscSampling) -> list[Vec2]:
    v = sampling.v_max
    if sampling.scheme == "polar":
        out = []
        for r in range(sampling.n_r, 0, -1):
            speed = v * r / sampling.n_r
            for k in range(sampling.n_theta):
                th = 2.0 * math.pi * k / sampling.n_theta
                out.append((speed * math.cos(th), speed * math.sin(th)))
        out.append((0.0, 0.0))
        return out
    if sampling.n == 1:
        return [(0.0, 0.0)]
    axis = np.linspace(-v, v, sampling.n)
    limit = v * (1.0 + 1e-12)
    return [
        (float(a), float(b))
        for b in axis
        for a in axis
        if math.hypot(a, b) <= limit
    ]


def solve_edge_shooting(
    field: FlowField,
    p: Sequence[float],
    q: Sequence[float],
    sampling: DiscSampling,
    params: IntegratorParams | None = None,
) -> EdgeSolveResult:
    """Shoot every disc control (no pruning) and keep the fastest arrival."""
    params = IntegratorParams() if params is None else params
    p = as_vec2(p)
    q = as_vec2(q)
    eps = params.eps(sampling.v_max)
    dist = math.hypot(q[0] - p[0], q[1] - p[1])
    if dist == 0.0 or dist < eps:
        raise DegeneratePair(f"|PQ| = {dist:.6g} m is below the arrival threshold {eps:.6g} m")
    return best_of(field, sample_disc_controls(sampling), p, q, params, sampling.v_max)
