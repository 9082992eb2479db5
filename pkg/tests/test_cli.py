"""CLI behavior: exit codes, CSV schemas, determinism, error handling."""

import csv
import json

import pytest

from quatcalc.cli import main

RUNS = {
    "verify": ["verify", "--points", "3"],
    "table": ["table", "--points", "2"],
    "taylor": ["taylor"],
    "mvt": ["mvt"],
    "descend": ["descend"],
}

HEADERS = {
    "verify": ["identity", "point", "mu", "nu", "residual", "tol", "pass"],
    "table": ["family", "point", "mu", "column", "closed_form", "numerical",
              "residual", "pass"],
    "taylor": ["function", "scale", "error", "slope", "branch", "pass"],
    "mvt": ["function", "form", "q0", "q1", "panels", "residual", "tol",
            "pass"],
    "descend": ["iter", "q", "value", "grad_norm"],
}


@pytest.mark.parametrize("name", sorted(RUNS))
def test_subcommand_passes_and_writes_schema(name, tmp_path, capsys):
    out = tmp_path / f"{name}.csv"
    code = main(RUNS[name] + ["--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "PASS" in captured.out
    with open(out, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == HEADERS[name]
    assert len(rows) > 1
    width = len(HEADERS[name])
    assert all(len(row) == width for row in rows[1:])


def test_verify_deterministic_output(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["verify", "--points", "3", "--seed", "99", "--out", str(a)]) == 0
    assert main(["verify", "--points", "3", "--seed", "99", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_seed_changes_output(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    main(["verify", "--points", "3", "--seed", "1", "--out", str(a)])
    main(["verify", "--points", "3", "--seed", "2", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_verify_tolerance_override_fails(capsys):
    code = main(["verify", "--points", "3", "--tol", "product_rule=1e-15"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_rejects_zero_points(capsys):
    code = main(["verify", "--points", "0"])
    assert code == 2
    assert "positive" in capsys.readouterr().err


def test_unknown_tolerance_name_is_config_error(capsys):
    code = main(["verify", "--tol", "bogus=1"])
    assert code == 2
    assert "unknown tolerance name" in capsys.readouterr().err


def test_malformed_tolerance_is_config_error(capsys):
    assert main(["verify", "--tol", "golden"]) == 2
    assert main(["verify", "--tol", "golden=abc"]) == 2
    capsys.readouterr()


def test_table_family_filter(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["table", "--points", "3", "--family", "linear",
                 "--family", "square", "--out", str(out)]) == 0
    with open(out, newline="") as handle:
        rows = list(csv.reader(handle))[1:]
    assert {row[0] for row in rows} == {"linear", "square"}
    assert len(rows) == 12  # 2 families x 3 points x 2 columns


def test_table_unknown_family(capsys):
    assert main(["table", "--family", "nope"]) == 2
    assert "unknown families" in capsys.readouterr().err


def test_descend_reaches_target(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["descend", "--target", "1+2i+3j+4k", "--alpha", "0.4",
                 "--out", str(out)]) == 0
    with open(out, newline="") as handle:
        rows = list(csv.reader(handle))[1:]
    assert len(rows) <= 101
    assert float(rows[-1][3]) <= 1e-6
    # objective column decreases
    values = [float(row[2]) for row in rows]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_descend_bad_target(capsys):
    assert main(["descend", "--target", "abc"]) == 2
    assert "bad quaternion term" in capsys.readouterr().err


def test_descend_divergent_step(capsys):
    code = main(["descend", "--alpha", "4.5"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_filter_bundled_config(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code = main(["filter", "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "qlms run" in captured.out
    with open(out, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["step", "sq_error", "weight_error"]
    assert len(rows) == 5001
    assert float(rows[-1][2]) < 1e-2


def test_filter_custom_config(tmp_path, capsys):
    config = {"variant": "qlms",
              "taps": [[0.5, 0.0, 0.0, 0.0], [0.0, 0.5, 0.0, 0.0]],
              "alpha": 0.02, "steps": 500, "snr_db": 40, "seed": 3}
    path = tmp_path / "small.json"
    path.write_text(json.dumps(config))
    assert main(["filter", "--config", str(path)]) == 0
    assert "qlms run" in capsys.readouterr().out


def test_filter_threshold_failure(tmp_path, capsys):
    config = {"variant": "qlms",
              "taps": [[0.5, 0.0, 0.0, 0.0], [0.0, 0.5, 0.0, 0.0]],
              "alpha": 0.02, "steps": 50, "snr_db": 40, "seed": 3,
              "threshold": 1e-9}
    path = tmp_path / "strict.json"
    path.write_text(json.dumps(config))
    assert main(["filter", "--config", str(path)]) == 1
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("mutation,message", [
    ({"variant": "rls"}, "unknown filter variant"),
    ({"kind": "pink"}, "unknown signal kind"),
    ({"nonlinearity": "relu"}, "unknown nonlinearity"),
    ({"alpha": "fast"}, "bad config value"),
])
def test_filter_config_validation(tmp_path, capsys, mutation, message):
    config = {"variant": "qlms",
              "taps": [[0.5, 0.0, 0.0, 0.0], [0.0, 0.5, 0.0, 0.0]],
              "alpha": 0.02, "steps": 500, "snr_db": 40, "seed": 3}
    config.update(mutation)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(config))
    assert main(["filter", "--config", str(path)]) == 2
    assert message in capsys.readouterr().err


def test_filter_missing_and_unknown_keys(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"variant": "qlms"}))
    assert main(["filter", "--config", str(path)]) == 2
    assert "missing config keys" in capsys.readouterr().err
    path.write_text(json.dumps({
        "variant": "qlms", "taps": [[0.5, 0.0, 0.0, 0.0]], "alpha": 0.1,
        "steps": 10, "snr_db": 40, "seed": 1, "extra": True}))
    assert main(["filter", "--config", str(path)]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_filter_nonexistent_config(capsys):
    assert main(["filter", "--config", "/does/not/exist.json"]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_filter_invalid_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["filter", "--config", str(path)]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_filter_wl_taps_shape_error(tmp_path, capsys):
    config = {"variant": "wl_qlms",
              "taps": [[[0.5, 0.0, 0.0, 0.0]], [[0.5, 0.0, 0.0, 0.0]]],
              "alpha": 0.02, "steps": 100, "snr_db": 40, "seed": 3}
    path = tmp_path / "wl.json"
    path.write_text(json.dumps(config))
    assert main(["filter", "--config", str(path)]) == 2
    assert "four branches" in capsys.readouterr().err
