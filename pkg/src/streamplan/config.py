"""JSON scenario configuration with strict keys and defaults."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field as dc_field, fields, replace
from pathlib import Path
from typing import Any

from .errors import ParseError, ValidationError
from .flowfield import Domain, FlowField, GyreLattice, LinearSaddle, Uniform, Vec2, as_vec2, load_grid_file
from .shooting import DiscSampling
from .streamline import DEFAULT_C, DEFAULT_DT, DEFAULT_HORIZON, DEFAULT_V_MAX, IntegratorParams

DEFAULT_FIELD = {"type": "gyre", "v_peak": 1.0, "cell_size": 100000.0, "n_x": 4, "n_y": 4}
DEFAULT_BASELINE = {"scheme": "polar", "n_r": 20, "n_theta": 18}

_FIELD_KEYS = {
    "gyre": {"type", "v_peak", "cell_size", "n_x", "n_y", "domain"},
    "uniform": {"type", "u", "v", "domain"},
    "saddle": {"type", "k", "domain"},
    "grid": {"type", "path"},
}
_BASELINE_KEYS = {"scheme", "n_r", "n_theta", "n"}


@dataclass(frozen=True)
class ScenarioConfig:
    field: dict = dc_field(default_factory=lambda: dict(DEFAULT_FIELD))
    start: Vec2 = (40000.0, 80000.0)
    goal: Vec2 = (360000.0, 320000.0)
    v_max: float = DEFAULT_V_MAX
    dt: float = DEFAULT_DT
    horizon: int = DEFAULT_HORIZON
    n: int = 49
    c: int = DEFAULT_C
    seed: int = 0
    gamma: float = 3.0
    arrival_eps: float | None = None
    stall_speed_frac: float = 0.01
    hessian_h: float | None = None
    baseline: dict = dc_field(default_factory=lambda: dict(DEFAULT_BASELINE))
    base_dir: str = dc_field(default=".", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "start", as_vec2(self.start))
        object.__setattr__(self, "goal", as_vec2(self.goal))
        if not (isinstance(self.v_max, (int, float)) and self.v_max > 0 and math.isfinite(self.v_max)):
            raise ValidationError(f"v_max must be a positive number, got {self.v_max!r}")
        if not isinstance(self.n, int) or self.n < 0:
            raise ValidationError(f"n must be a non-negative integer, got {self.n!r}")
        if not isinstance(self.c, int) or self.c < 2:
            raise ValidationError(f"c must be an integer >= 2, got {self.c!r}")
        if not isinstance(self.seed, int):
            raise ValidationError(f"seed must be an integer, got {self.seed!r}")
        if not self.gamma > 0:
            raise ValidationError("gamma must be positive")
        if self.start == self.goal:
            raise ValidationError("start and goal coincide")
        self.integrator_params()
        self.disc_sampling()
        _check_field_spec(self.field)

    def integrator_params(self) -> IntegratorParams:
        return IntegratorParams(
            dt=self.dt,
            horizon=self.horizon,
            arrival_eps=self.arrival_eps,
            stall_speed_frac=self.stall_speed_frac,
            hessian_h=self.hessian_h,
        )

    @property
    def eps(self) -> float:
        return self.integrator_params().eps(self.v_max)

    def disc_sampling(self) -> DiscSampling:
        b = dict(self.baseline)
        scheme = b.pop("scheme", "polar")
        return DiscSampling(scheme=scheme, v_max=self.v_max, **b)

    def build_field(self) -> FlowField:
        return build_field(self.field, Path(self.base_dir))

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)


def _check_field_spec(spec: dict) -> None:
    kind = spec.get("type")
    if kind not in _FIELD_KEYS:
        raise ValidationError(f"unknown field type {kind!r}; expected one of {sorted(_FIELD_KEYS)}")
    extra = set(spec) - _FIELD_KEYS[kind]
    if extra:
        raise ParseError(f"unknown key(s) in field: {', '.join(sorted(extra))}")


def _domain(spec: dict, default: Domain | None) -> Domain | None:
    if "domain" not in spec:
        return default
    d = spec["domain"]
    if not (isinstance(d, list) and len(d) == 4):
        raise ValidationError("domain must be [x_min, x_max, y_min, y_max]")
    return Domain(*(float(v) for v in d))


def build_field(spec: dict, base_dir: Path = Path(".")) -> FlowField:
    _check_field_spec(spec)
    kind = spec["type"]
    try:
        if kind == "gyre":
            return GyreLattice(
                v_peak=float(spec.get("v_peak", 1.0)),
                cell_size=float(spec.get("cell_size", 100000.0)),
                n_x=int(spec.get("n_x", 4)),
                n_y=int(spec.get("n_y", 4)),
                domain=_domain(spec, None),
            )
        if kind == "uniform":
            dom = _domain(spec, Uniform.__dataclass_fields__["domain"].default)
            return Uniform(float(spec.get("u", 0.0)), float(spec.get("v", 0.0)), dom)
        if kind == "saddle":
            dom = _domain(spec, LinearSaddle.__dataclass_fields__["domain"].default)
            return LinearSaddle(float(spec["k"]), dom)
    except (TypeError, KeyError) as exc:
        raise ValidationError(f"bad {kind} field spec: {exc}") from exc
    path = Path(spec["path"])
    if not path.is_absolute():
        path = base_dir / path
    return load_grid_file(path)


_TOP_KEYS = {f.name for f in fields(ScenarioConfig)} - {"base_dir"}


def parse_config(source: Any = b"{}", base_dir: str | Path = ".") -> ScenarioConfig:
    """Parse a JSON scenario from bytes, str, or a readable stream.

    Missing keys take the defaults; unknown keys raise ``ParseError``.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"config is not UTF-8: {exc}") from exc
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ParseError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if "field" in raw:
        if not isinstance(raw["field"], dict):
            raise ParseError("'field' must be an object")
        _check_field_spec(raw["field"])
    if "baseline" in raw:
        if not isinstance(raw["baseline"], dict):
            raise ParseError("'baseline' must be an object")
        extra = set(raw["baseline"]) - _BASELINE_KEYS
        if extra:
            raise ParseError(f"unknown key(s) in baseline: {', '.join(sorted(extra))}")
        raw["baseline"] = {**DEFAULT_BASELINE, **raw["baseline"]}
    try:
        return ScenarioConfig(**raw, base_dir=str(base_dir))
    except TypeError as exc:
        raise ValidationError(str(exc)) from exc


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    with open(path, "rb") as fh:
        return parse_config(fh, base_dir=path.parent)


def config_from_dict(raw: dict, base_dir: str | Path = ".") -> ScenarioConfig:
    return parse_config(io.StringIO(json.dumps(raw)), base_dir=base_dir)
