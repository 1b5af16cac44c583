"""Time-invariant incompressible 2D flow fields.

Fields are immutable after construction. Positions are planar metres,
velocities m/s, stream values m^2/s. The stream value between two points
follows the convention ``psi(P, Q) = integral of (u dy - v dx)``, so for a
stream function ``psi(x, y)`` we have ``u = dpsi/dy`` and ``v = -dpsi/dx``.
"""

from __future__ import annotations

import io
import math
from functools import cached_property
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import DimensionMismatch, Masked, OutOfDomain, ParseError, ValidationError

Vec2 = tuple[float, float]


def as_vec2(p: Sequence[float]) -> Vec2:
    """Coerce ``p`` to a finite ``(x, y)`` float tuple."""
    try:
        x, y = float(p[0]), float(p[1])
    except (TypeError, IndexError, ValueError) as exc:
        raise ValidationError(f"not a 2-vector: {p!r}") from exc
    if len(p) != 2:
        raise ValidationError(f"not a 2-vector: {p!r}")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(f"non-finite vector: {p!r}")
    return x, y


@dataclass(frozen=True)
class Domain:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("domain bounds must be finite")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValidationError(f"empty domain {vals}")

    def contains(self, p: Sequence[float]) -> bool:
        return self.x_min <= p[0] <= self.x_max and self.y_min <= p[1] <= self.y_max

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def bounds(self) -> np.ndarray:
        return np.array([self.x_min, self.x_max, self.y_min, self.y_max], dtype=np.float64)


class FlowField:
    """Common surface of analytic and gridded fields.

    Subclasses provide ``domain`` and ``_build_kernel_args()``; everything else is
    evaluated through the compiled kernels so Python-level queries and the
    integrator see bit-identical velocities.
    """

    domain: Domain

    def _build_kernel_args(self) -> tuple:
        raise NotImplementedError

    @cached_property
    def _kargs(self) -> tuple:
        return self._build_kernel_args()

    @property
    def default_hessian_h(self) -> float:
        return 1.0

    def is_free(self, p: Sequence[float]) -> bool:
        """True when ``p`` is inside the domain and not masked."""
        code, _, _ = K.velocity(*self._kargs, float(p[0]), float(p[1]))
        return code == K.OK

    def velocity(self, p: Sequence[float]) -> Vec2:
        return velocity_at(self, p)


def _raise_for(code: int, p) -> None:
    if code == K.OUT_OF_DOMAIN:
        raise OutOfDomain(f"point {tuple(p)} is outside the domain")
    if code == K.MASKED:
        raise Masked(f"point {tuple(p)} is in a masked cell")


class AnalyticField(FlowField):
    def psi(self, x: float, y: float) -> float:
        """Stream function relative to the origin (closed form)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(AnalyticField):
    u0: float
    v0: float
    domain: Domain = Domain(-1e6, 1e6, -1e6, 1e6)

    def _build_kernel_args(self):
        params = np.array([self.u0, self.v0], dtype=np.float64)
        return K.UNIFORM, params, self.domain.bounds, K.DUMMY_GRID, K.DUMMY_GRID, K.DUMMY_MASK

    def psi(self, x, y):
        return self.u0 * y - self.v0 * x


@dataclass(frozen=True)
class LinearSaddle(AnalyticField):
    """Hyperbolic point at the origin, ``F = (-k x, k y)``, ``psi = -k x y``.

    Contracting along the x-axis, expanding along the y-axis.
    """

    k: float
    domain: Domain = Domain(-1e4, 1e4, -1e4, 1e4)

    def _build_kernel_args(self):
        params = np.array([self.k], dtype=np.float64)
        return K.SADDLE, params, self.domain.bounds, K.DUMMY_GRID, K.DUMMY_GRID, K.DUMMY_MASK

    def psi(self, x, y):
        return -self.k * x * y


@dataclass(frozen=True)
class GyreLattice(AnalyticField):
    """Cellular gyres ``psi = (V s / pi) sin(pi x / s) sin(pi y / s)``.

    Adjacent cells rotate in opposite senses; cell corners are saddles and
    cell centres are elliptic points. Peak speed is ``v_peak``.
    """

    v_peak: float
    cell_size: float
    n_x: int = 4
    n_y: int = 4
    domain: Domain | None = None

    def __post_init__(self):
        if self.cell_size <= 0 or self.n_x < 1 or self.n_y < 1:
            raise ValidationError("gyre lattice needs cell_size > 0 and n_x, n_y >= 1")
        if self.domain is None:
            object.__setattr__(
                self, "domain", Domain(0.0, self.n_x * self.cell_size, 0.0, self.n_y * self.cell_size)
            )

    def _build_kernel_args(self):
        params = np.array([self.v_peak, self.cell_size], dtype=np.float64)
        return K.GYRE, params, self.domain.bounds, K.DUMMY_GRID, K.DUMMY_GRID, K.DUMMY_MASK

    @property
    def default_hessian_h(self):
        return self.cell_size / 100.0

    def psi(self, x, y):
        w = math.pi / self.cell_size
        return self.v_peak / w * math.sin(w * x) * math.sin(w * y)


@dataclass(frozen=True, eq=False)
class GriddedField(FlowField):
    """Node-based velocity grid with bilinear interpolation.

    ``u``, ``v`` and ``mask`` have shape ``(n_y, n_x)`` and are indexed
    ``[j, i]``. A point is masked when any corner of its enclosing cell is.
    """

    origin: Vec2
    dx: float
    dy: float
    u: np.ndarray
    v: np.ndarray
    mask: np.ndarray | None = dc_field(default=None)

    def __post_init__(self):
        if not (self.dx > 0 and self.dy > 0):
            raise ValidationError("grid spacing must be positive")
        u = np.array(self.u, dtype=np.float64)
        v = np.array(self.v, dtype=np.float64)
        if u.ndim != 2 or u.shape != v.shape:
            raise DimensionMismatch(f"u {u.shape} and v {v.shape} must be equal 2D arrays")
        if u.shape[0] < 2 or u.shape[1] < 2:
            raise DimensionMismatch("grid needs at least 2x2 nodes")
        mask = np.zeros(u.shape, dtype=np.bool_) if self.mask is None else np.array(self.mask, dtype=np.bool_)
        if mask.shape != u.shape:
            raise DimensionMismatch(f"mask {mask.shape} does not match grid {u.shape}")
        if not (np.isfinite(u[~mask]).all() and np.isfinite(v[~mask]).all()):
            raise ValidationError("unmasked grid velocities must be finite")
        u = np.where(mask, 0.0, u)
        v = np.where(mask, 0.0, v)
        for arr in (u, v, mask):
            arr.setflags(write=False)
        ox, oy = as_vec2(self.origin)
        object.__setattr__(self, "origin", (ox, oy))
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(
            self,
            "domain",
            Domain(ox, ox + (self.n_x - 1) * self.dx, oy, oy + (self.n_y - 1) * self.dy),
        )
        object.__setattr__(
            self, "_params", np.array([ox, oy, self.dx, self.dy], dtype=np.float64)
        )

    @property
    def n_x(self) -> int:
        return self.u.shape[1]

    @property
    def n_y(self) -> int:
        return self.u.shape[0]

    @property
    def default_hessian_h(self):
        return min(self.dx, self.dy)

    def _build_kernel_args(self):
        return K.GRID, self._params, self.domain.bounds, self.u, self.v, self.mask

    @classmethod
    def sample(
        cls,
        source: FlowField | Callable[[float, float], Vec2],
        origin: Sequence[float],
        dx: float,
        dy: float,
        n_x: int,
        n_y: int,
        mask: np.ndarray | None = None,
    ) -> "GriddedField":
        """Build a grid by evaluating ``source`` at every node."""
        fn = source.velocity if isinstance(source, FlowField) else (lambda p: source(*p))
        u = np.empty((n_y, n_x))
        v = np.empty((n_y, n_x))
        for j in range(n_y):
            for i in range(n_x):
                u[j, i], v[j, i] = fn((origin[0] + i * dx, origin[1] + j * dy))
        return cls(origin=tuple(origin), dx=dx, dy=dy, u=u, v=v, mask=mask)


# ---------------------------------------------------------------- operations


def velocity_at(field: FlowField, p: Sequence[float]) -> Vec2:
    x, y = as_vec2(p)
    code, u, v = K.velocity(*field._kargs, x, y)
    _raise_for(code, p)
    return u, v


def _quad_step(field: FlowField) -> float:
    if isinstance(field, GriddedField):
        return min(field.dx, field.dy) / 2.0
    if isinstance(field, GyreLattice):
        return field.cell_size / 200.0
    d = field.domain
    return max(d.x_max - d.x_min, d.y_max - d.y_min) / 1000.0


def stream_value_quadrature(
    field: FlowField,
    p: Sequence[float],
    q: Sequence[float],
    x_first: bool = True,
    max_step: float | None = None,
) -> float:
    """Trapezoidal stream value along an axis-aligned two-segment path.

    With ``x_first`` the path is ``p -> (q.x, p.y) -> q``, otherwise
    ``p -> (p.x, q.y) -> q``.
    """
    px, py = as_vec2(p)
    qx, qy = as_vec2(q)
    h = _quad_step(field) if max_step is None else float(max_step)
    code, val = K.path_flux(*field._kargs, px, py, qx, qy, x_first, h)
    if code == K.OUT_OF_DOMAIN:
        raise OutOfDomain(f"integration path {p} -> {q} leaves the domain")
    if code == K.MASKED:
        raise Masked(f"integration path {p} -> {q} crosses a masked cell")
    return val


def stream_value(field: FlowField, p: Sequence[float], q: Sequence[float]) -> float:
    """Flux ``psi(P, Q)`` through any curve from ``p`` to ``q``.

    Analytic fields use the closed form; gridded fields integrate along the
    x-first canonical path.
    """
    if isinstance(field, AnalyticField):
        px, py = as_vec2(p)
        qx, qy = as_vec2(q)
        for pt in ((px, py), (qx, qy)):
            if not field.domain.contains(pt):
                raise OutOfDomain(f"point {pt} is outside the domain")
        return field.psi(qx, qy) - field.psi(px, py)
    return stream_value_quadrature(field, p, q, x_first=True)


def path_discrepancy(field: FlowField, p: Sequence[float], q: Sequence[float]) -> float:
    """Absolute x-first minus y-first stream value; zero for divergence-free data."""
    return abs(
        stream_value_quadrature(field, p, q, x_first=True)
        - stream_value_quadrature(field, p, q, x_first=False)
    )


def divergence_at(field: FlowField, p: Sequence[float], h: float) -> float:
    x, y = as_vec2(p)
    code, dudx, _, _, dvdy = K.velocity_gradient(*field._kargs, x, y, float(h))
    _raise_for(code, p)
    return dudx + dvdy


def hessian_det_psi(field: FlowField, p: Sequence[float], h: float | None = None) -> float:
    """Determinant of the stream-function Hessian from central differences.

    Uses ``psi_xx = -dv/dx``, ``psi_yy = du/dy``, ``psi_xy = du/dx``. A
    negative value marks a hyperbolic (saddle-type) point.
    """
    x, y = as_vec2(p)
    h = field.default_hessian_h if h is None else float(h)
    code, det = K.hessian_det(*field._kargs, x, y, h)
    _raise_for(code, p)
    return det


@dataclass(frozen=True)
class Drift:
    trajectory: np.ndarray
    left_domain: bool


def advect(field: FlowField, p: Sequence[float], dt: float, steps: int, method: str = "rk4") -> Drift:
    """Passively advect a particle (zero relative velocity)."""
    x, y = as_vec2(p)
    traj = np.empty((steps + 1, 2))
    kernel = {"rk4": K.rk4_drift, "euler": K.euler_drift}[method]
    code, done = kernel(*field._kargs, x, y, float(dt), int(steps), traj)
    return Drift(trajectory=traj[: done + 1].copy(), left_domain=code != K.OK)


# ------------------------------------------------------------------ grid I/O


def _text_lines(source) -> Iterable[str]:
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    elif isinstance(source, str):
        source = io.StringIO(source)
    for raw in source:
        if isinstance(raw, (bytes, bytearray)):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError(f"grid file is not UTF-8: {exc}") from exc
        yield raw


def load_grid(source) -> GriddedField:
    """Parse the ``FLOWGRID`` text format from a stream, bytes or str.

    Header ``FLOWGRID n_x n_y origin_x origin_y dx dy`` followed by
    ``n_x * n_y`` lines ``i j u v mask``. ``#`` starts a comment.
    """
    header = None
    rows = []
    for lineno, raw in enumerate(_text_lines(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if header is None:
            if tok[0] != "FLOWGRID" or len(tok) != 7:
                raise ParseError(f"line {lineno}: expected 'FLOWGRID n_x n_y origin_x origin_y dx dy'")
            try:
                n_x, n_y = int(tok[1]), int(tok[2])
                ox, oy, dx, dy = (float(t) for t in tok[3:])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad header value ({exc})") from exc
            if n_x < 2 or n_y < 2 or not (dx > 0 and dy > 0):
                raise ParseError(f"line {lineno}: need n_x, n_y >= 2 and positive spacing")
            header = (n_x, n_y, ox, oy, dx, dy)
            continue
        if len(tok) != 5:
            raise ParseError(f"line {lineno}: expected 'i j u v mask', got {len(tok)} fields")
        try:
            i, j = int(tok[0]), int(tok[1])
            u, v = float(tok[2]), float(tok[3])
            m = int(tok[4])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if m not in (0, 1):
            raise ParseError(f"line {lineno}: mask must be 0 or 1")
        rows.append((lineno, i, j, u, v, m))
    if header is None:
        raise ParseError("missing FLOWGRID header")
    n_x, n_y, ox, oy, dx, dy = header
    if len(rows) != n_x * n_y:
        raise DimensionMismatch(f"expected {n_x * n_y} data rows for {n_x}x{n_y}, got {len(rows)}")
    u = np.zeros((n_y, n_x))
    v = np.zeros((n_y, n_x))
    mask = np.zeros((n_y, n_x), dtype=np.bool_)
    seen = np.zeros((n_y, n_x), dtype=np.bool_)
    for lineno, i, j, uu, vv, m in rows:
        if not (0 <= i < n_x and 0 <= j < n_y):
            raise DimensionMismatch(f"line {lineno}: index ({i}, {j}) outside {n_x}x{n_y}")
        if seen[j, i]:
            raise ParseError(f"line {lineno}: duplicate node ({i}, {j})")
        seen[j, i] = True
        u[j, i], v[j, i], mask[j, i] = uu, vv, bool(m)
    try:
        return GriddedField(origin=(ox, oy), dx=dx, dy=dy, u=u, v=v, mask=mask)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc


def load_grid_file(path) -> GriddedField:
    with open(path, "rb") as fh:
        return load_grid(fh)


def dump_grid(grid: GriddedField, stream) -> None:
    """Write ``grid`` in the ``FLOWGRID`` text format to a text stream."""
    ox, oy = grid.origin
    stream.write(f"FLOWGRID {grid.n_x} {grid.n_y} {ox!r} {oy!r} {grid.dx!r} {grid.dy!r}\n")
    for j in range(grid.n_y):
        for i in range(grid.n_x):
            stream.write(f"{i} {j} {float(grid.u[j, i])!r} {float(grid.v[j, i])!r} {int(grid.mask[j, i])}\n")
