import io
import json

import pytest

from streamplan.config import ScenarioConfig, build_field, config_from_dict, load_config, parse_config
from streamplan.errors import ParseError, ValidationError
from streamplan.flowfield import GriddedField, GyreLattice, LinearSaddle, Uniform


def test_empty_object_gives_defaults():
    cfg = parse_config(b"{}")
    assert (cfg.v_max, cfg.dt, cfg.horizon, cfg.n, cfg.c) == (0.3, 750.0, 2000, 49, 19)
    assert cfg.eps == pytest.approx(337.5)
    assert cfg == ScenarioConfig()


def test_accepts_str_and_stream():
    assert parse_config('{"seed": 4}').seed == 4
    assert parse_config(io.BytesIO(b'{"seed": 5}')).seed == 5


@pytest.mark.parametrize(
    "raw",
    [
        {"v_max": -1},
        {"v_max": 0},
        {"dt": 0},
        {"horizon": 0},
        {"c": 1},
        {"n": -3},
        {"start": [1, 2], "goal": [1, 2]},
        {"start": [1, "a"]},
        {"field": {"type": "vortex"}},
        {"baseline": {"scheme": "polar", "n_r": 0}},
        {"arrival_eps": -5},
    ],
)
def test_validation_errors(raw):
    with pytest.raises(ValidationError):
        config_from_dict(raw)


def test_unknown_key_named():
    with pytest.raises(ParseError, match="colour"):
        parse_config(b'{"colour": 3}')


def test_unknown_nested_keys():
    with pytest.raises(ParseError, match="amplitude"):
        parse_config(b'{"field": {"type": "gyre", "amplitude": 2}}')
    with pytest.raises(ParseError, match="rings"):
        parse_config(b'{"baseline": {"rings": 2}}')


@pytest.mark.parametrize("text", [b"not json", b"[1, 2]", b"\xff\xfe"])
def test_malformed(text):
    with pytest.raises(ParseError):
        parse_config(text)


def test_build_fields(tmp_path):
    assert isinstance(build_field({"type": "uniform", "u": 0.1}), Uniform)
    assert isinstance(build_field({"type": "saddle", "k": 1e-4}), LinearSaddle)
    g = build_field({"type": "gyre", "v_peak": 2.0, "cell_size": 10.0, "n_x": 2, "n_y": 3})
    assert isinstance(g, GyreLattice) and tuple(g.domain.bounds) == (0.0, 20.0, 0.0, 30.0)
    u = build_field({"type": "uniform", "domain": [0, 1, 0, 2]})
    assert u.domain.area == 2.0


def test_grid_path_relative_to_config(tmp_path):
    rows = "\n".join(f"{i} {j} 0.1 0 0" for j in range(2) for i in range(2))
    (tmp_path / "g.txt").write_text(f"FLOWGRID 2 2 0 0 10 10\n{rows}\n")
    (tmp_path / "s.json").write_text(json.dumps({"field": {"type": "grid", "path": "g.txt"},
                                                 "start": [1, 1], "goal": [9, 9]}))
    cfg = load_config(tmp_path / "s.json")
    assert isinstance(cfg.build_field(), GriddedField)


def test_baseline_defaults_merge():
    cfg = config_from_dict({"baseline": {"n_r": 2, "n_theta": 9}})
    assert len(cfg.disc_sampling()) == 19
    assert len(ScenarioConfig().disc_sampling()) == 361


def test_with_seed():
    assert ScenarioConfig().with_seed(7).seed == 7


def test_shipped_configs_parse():
    from pathlib import Path

    shipped = sorted((Path(__file__).parent.parent / "configs").glob("*.json"))
    assert shipped
    for path in shipped:
        load_config(path).build_field()
