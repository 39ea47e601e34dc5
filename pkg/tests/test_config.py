"""Test di configurazione, caricamento e report (src/config, src/data, src/utils)."""

import json

import numpy as np
import pandas as pd
import pytest

from src.config import constants as const
from src.config.experiment import ExperimentConfig, parse_m_range, parse_marked
from src.data.loader import ConfigFactory, ConfigLoader
from src.errors import ParamError
from src.utils.report import build_report, emit, render_csv, render_json, sweep_frame, to_jsonable


def test_constants():
    assert const.DEFAULT_A1 == pytest.approx(1.1)
    assert const.DEFAULT_A2 == 1.0
    assert const.SWEEP_COLUMNS == (
        "records", "m", "runs", "failures", "rate", "wilson_lo", "wilson_hi", "budget", "seed",
    )
    assert [n for n in range(20) if const.is_power_of_two(n)] == [1, 2, 4, 8, 16]


@pytest.mark.parametrize(
    "value,expected",
    [(None, None), ("none", None), ("NONE", None), ("random", "random"), ("7", 7), (3, 3)],
)
def test_parse_marked(value, expected):
    assert parse_marked(value) == expected


@pytest.mark.parametrize("value", ["x", "1.5", True])
def test_parse_marked_invalid(value):
    with pytest.raises(ParamError):
        parse_marked(value)


def test_parse_m_range():
    assert parse_m_range("2..9") == (2, 9)
    assert parse_m_range([1, 1]) == (1, 1)
    for bad in ("5..2", "0..3", "3", "a..b"):
        with pytest.raises(ParamError):
            parse_m_range(bad)


def test_experiment_config_defaults():
    cfg = ExperimentConfig(command="cycle")
    assert cfg.a1 == pytest.approx(1.1)
    assert cfg.output_format == "json"
    assert cfg.engine == "analytic"
    assert cfg.parallelism >= 1
    assert ExperimentConfig(command="sweep").output_format == "csv"
    assert ExperimentConfig(command="cycle", delta=0.5).a1 == pytest.approx(1.5)
    assert ExperimentConfig(command="cycle", delta=0.5, a1=2.0).a1 == 2.0


def test_experiment_config_as_dict():
    cfg = ExperimentConfig(command="sweep", records=8, m_range="1..4")
    out = cfg.as_dict()
    assert out["m_range"] == "1..4"
    assert out["marked"] == "none"
    assert set(out) == set(ExperimentConfig.field_names())


@pytest.mark.parametrize(
    "kwargs",
    [
        {"command": "nope"},
        {"command": "search", "records": 12},
        {"command": "search", "records": 1},
        {"command": "search", "records": 8, "marked": 8},
        {"command": "cycle", "delta": 0.0},
        {"command": "cycle", "runs": 0},
        {"command": "cycle", "parallelism": 0},
        {"command": "cycle", "output_format": "csv"},
        {"command": "cycle", "output_format": "xml"},
        {"command": "distinguish", "truth": "X"},
        {"command": "cycle", "confidence": 1.0},
        {"command": "cycle", "group_tol": 0.0},
        {"command": "cycle", "readout": "bitwise"},
        {"command": "search", "m": 2.5},
        {"command": "search", "records": 8.0},
        {"command": "cycle", "seed": 1.5},
        {"command": "cycle", "trials": True},
        {"command": "distinguish", "copies": "3"},
    ],
)
def test_experiment_config_validation(kwargs):
    with pytest.raises(ParamError):
        ExperimentConfig(**kwargs)


def test_loader_normalizes_keys(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"m-range": "1..3", "records": 16}), encoding="utf-8")
    assert ConfigLoader.load(str(path)) == {"m_range": "1..3", "records": 16}


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", json.dumps({"command": "cycle"})])
def test_loader_rejects_bad_files(tmp_path, content):
    path = tmp_path / "c.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ParamError):
        ConfigLoader.load(str(path))


def test_loader_missing_file(tmp_path):
    with pytest.raises(ParamError, match="non trovato"):
        ConfigLoader.load(str(tmp_path / "missing.json"))


def test_factory_precedence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"records": 16, "runs": 40, "marked": 3}), encoding="utf-8")
    cfg = ConfigFactory.build("search", {"runs": 10, "seed": None}, str(path))
    assert (cfg.records, cfg.runs, cfg.marked) == (16, 10, 3)
    assert ConfigFactory.build("search", {"marked": None}, str(path)).marked is None


def test_factory_rejects_unknown_flag():
    with pytest.raises(ParamError):
        ConfigFactory.build("cycle", {"colour": "red"})


def test_to_jsonable():
    data = {"a": np.float64(0.5), "b": np.arange(3), "c": (np.int64(2), np.bool_(True))}
    assert to_jsonable(data) == {"a": 0.5, "b": [0, 1, 2], "c": [2, True]}
    json.dumps(to_jsonable(data))


def test_build_report():
    report = build_report(ExperimentConfig(command="spectrum", dim=8), {"x": np.float64(1.0)}, 12.34567)
    assert list(report) == ["schema_version", "config", "results", "timing_ms"]
    assert report["timing_ms"] == pytest.approx(12.346)
    assert json.loads(render_json(report))["results"] == {"x": 1.0}


def test_render_csv_schema():
    frame = sweep_frame([{"m": 1, "records": 4, "runs": 10, "failures": 2, "rate": 0.2,
                          "wilson_lo": 0.05, "wilson_hi": 0.5, "budget": 1.0, "seed": 0}])
    text = render_csv(frame)
    lines = text.splitlines()
    assert lines[0] == "# schema_version: 1"
    assert lines[1] == ",".join(const.SWEEP_COLUMNS)
    assert lines[2].startswith("4,1,10,2,")
    assert isinstance(frame, pd.DataFrame)


def test_emit_to_file(tmp_path, capsys):
    emit("hello\n")
    assert capsys.readouterr().out == "hello\n"
    target = tmp_path / "nested" / "out.txt"
    emit("data\n", str(target))
    assert target.read_text(encoding="utf-8") == "data\n"
