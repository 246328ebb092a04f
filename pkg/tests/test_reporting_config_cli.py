"""CSV/SVG emission, config validation, and the CLI contract."""

import json

import numpy as np
import pytest

from stepbias import cli
from stepbias.config import (
    DEFAULT_ETA_GRID,
    canonical_config,
    load_config,
    save_config,
    validate_config,
)
from stepbias.errors import IoError, ParseError, ValidationError
from stepbias.reporting import (
    AxesSpec,
    Series,
    format_value,
    read_csv,
    render_svg,
    write_csv,
)


# ---------------------------------------------------------------- reporting


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(0.1) == "0.1"
    assert format_value(np.float64(0.1)) == "0.1"
    assert format_value(np.bool_(True)) == "true"
    assert format_value(3) == "3"
    assert format_value("x") == "x"


def test_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(0)
    rows = [
        (float(rng.normal()) * 10.0 ** int(rng.integers(-30, 30)), i, f"s{i}")
        for i in range(50)
    ]
    path = tmp_path / "t.csv"
    write_csv(rows, ("value", "index", "name"), path)
    schema, back = read_csv(path)
    assert schema == ["value", "index", "name"]
    for row, got in zip(rows, back):
        assert got[0] == row[0]  # exact float round trip
        assert got[1] == float(row[1])
        assert got[2] == row[2]
    assert b"\r" not in path.read_bytes()


def test_csv_arity_and_io_errors(tmp_path):
    with pytest.raises(ValueError):
        write_csv([(1, 2)], ("a",), tmp_path / "x.csv")
    with pytest.raises(IoError):
        write_csv([], ("a",), tmp_path / "missing" / "x.csv")
    with pytest.raises(IoError):
        read_csv(tmp_path / "missing.csv")


def test_render_svg_deterministic(tmp_path):
    series = [Series("a", (0.0, 1.0, 2.0), (1.0, 4.0, 9.0))]
    axes = AxesSpec(title="t", xlabel="x", ylabel="y", vlines=(0.5,))
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    render_svg(series, axes, p1)
    render_svg(series, axes, p2)
    data = p1.read_bytes()
    assert data == p2.read_bytes()
    text = data.decode()
    assert text.startswith("<svg ")
    assert text.count("<polyline") == 1
    assert "stroke-dasharray" in text  # the vline
    assert "t</text>" in text


def test_render_svg_needs_series(tmp_path):
    with pytest.raises(ValueError):
        render_svg([], AxesSpec(), tmp_path / "x.svg")


# ------------------------------------------------------------------ config


def test_validate_config_defaults():
    cfg = validate_config({"experiment": "eta_sweep"})
    assert cfg.seed == 0
    assert tuple(cfg.eta_grid) == DEFAULT_ETA_GRID
    assert cfg.output_dir == "out"


@pytest.mark.parametrize(
    "raw",
    [
        {},
        {"experiment": "nope"},
        {"experiment": "eta_sweep", "bogus": 1},
        {"experiment": "eta_sweep", "seed": "zero"},
        {"experiment": "eta_sweep", "seed": True},
        {"experiment": "eta_sweep", "n": 0},
        {"experiment": "eta_sweep", "lam": -1.0},
        {"experiment": "toy2d", "sigma1": 0.1, "sigma2": 0.2},
        {"experiment": "eta_sweep", "eta_grid": []},
        {"experiment": "eta_sweep", "eta_grid": [0.5, -1.0]},
        {"experiment": "alpha_sweep", "alpha_grid": [0.1, "x"]},
        "not a dict",
    ],
)
def test_validate_config_rejects(raw):
    with pytest.raises(ValidationError):
        validate_config(raw)


def test_config_file_roundtrip(tmp_path):
    cfg = validate_config({"experiment": "toy2d", "seed": 7, "sigma2": 0.1})
    path = tmp_path / "cfg.json"
    save_config(cfg, path)
    back = load_config(path)
    assert back == cfg
    assert validate_config(canonical_config(cfg)) == cfg


def test_load_config_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\n  broken\n}")
    with pytest.raises(ParseError) as err:
        load_config(path)
    assert "line 2" in str(err.value)


# --------------------------------------------------------------------- CLI


def _write_cfg(tmp_path, **kw):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(kw))
    return str(path)


def test_cli_validate_ok(tmp_path, capsys):
    path = _write_cfg(tmp_path, experiment="filter_profiles")
    assert cli.main(["validate", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "ok" in out and "\x1b" not in out  # no color on a pipe


def test_cli_run_writes_outputs(tmp_path, capsys):
    path = _write_cfg(tmp_path, experiment="filter_profiles")
    out_dir = tmp_path / "results"
    assert cli.main(["run", "--config", path, "--output-dir", str(out_dir)]) == 0
    assert (out_dir / "filter_profiles.csv").exists()
    assert (out_dir / "filter_profiles.svg").exists()
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert {e["path"] for e in manifest["files"]} == {
        "filter_profiles.csv",
        "filter_profiles.svg",
    }
    assert capsys.readouterr().out.count("wrote ") == 3


def test_cli_seed_override(tmp_path):
    path = _write_cfg(tmp_path, experiment="scale_sweep", n=30)
    out_dir = tmp_path / "o"
    assert cli.main(["run", "--config", path, "--output-dir", str(out_dir), "--seed", "3"]) == 0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["seed"] == 3


def test_cli_exit_code_validation(tmp_path, capsys):
    path = _write_cfg(tmp_path, experiment="nope")
    assert cli.main(["run", "--config", path]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert cli.main(["run", "--config", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_exit_code_certification(tmp_path, capsys):
    # A level-set target too close to the initial loss has no feasible
    # step window on the 2-D toy.
    path = _write_cfg(tmp_path, experiment="toy2d", alpha=0.4)
    out_dir = tmp_path / "o"
    assert cli.main(["run", "--config", path, "--output-dir", str(out_dir)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_exit_code_io(tmp_path, capsys):
    assert cli.main(["run", "--config", str(tmp_path / "missing.json")]) == 3
    assert "error" in capsys.readouterr().err


def test_cli_manifest_hashes_match_files(tmp_path):
    path = _write_cfg(tmp_path, experiment="toy2d")
    out_dir = tmp_path / "o"
    assert cli.main(["run", "--config", path, "--output-dir", str(out_dir)]) == 0
    import hashlib

    manifest = json.loads((out_dir / "manifest.json").read_text())
    for entry in manifest["files"]:
        digest = hashlib.sha256((out_dir / entry["path"]).read_bytes()).hexdigest()
        assert digest == entry["sha256"]
    assert manifest["config"]["experiment"] == "toy2d"
