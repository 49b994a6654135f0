import json

import pytest

from conftest import DELTA
from esspec.cli import main, run_checks
from esspec.config import (Config, ConfigError, GridSpec, Tolerances,
                           emit_config, load_config, parse_config)
from esspec.presets import diagonal_config, film_config
from esspec.symbols import limiting_matrix


# ---------------------------------------------------------------------------
# config parsing

def test_film_preset_orders(film_cfg):
    T = film_cfg.operator
    assert (T.m, T.n, T.p, T.q) == (2, 3.0, 1.0, 1)


def test_q_zero_rejected():
    data = film_config()
    data["entries"]["d"] = [{"power": 0, "limit": "1"}]
    with pytest.raises(ConfigError, match="m>=q>0"):
        parse_config(data)


def test_non_decaying_perturbation_rejected():
    data = film_config()
    data["entries"]["a"][0]["perturbation"] = "tanh(x)"
    with pytest.raises(ConfigError, match="does not decay") as err:
        parse_config(data)
    assert err.value.pointer == "/entries/a/0/perturbation"


def test_limit_must_be_constant_in_x():
    data = diagonal_config()
    data["entries"]["a"][0]["limit"] = "-1 + x"
    with pytest.raises(ConfigError, match="constant in x"):
        parse_config(data)


def test_unbound_parameter_rejected():
    data = diagonal_config()
    data["entries"]["a"][0]["limit"] = "-gamma"
    with pytest.raises(ConfigError, match="unbound"):
        parse_config(data)


def test_expression_error_with_pointer():
    data = diagonal_config()
    data["entries"]["d"][0]["limit"] = "1 +"
    with pytest.raises(ConfigError) as err:
        parse_config(data)
    assert err.value.pointer == "/entries/d/0/limit"
    assert "offset" in str(err.value)


def test_duplicate_power_rejected():
    data = diagonal_config()
    data["entries"]["a"] = [{"power": 2, "limit": "-1"},
                            {"power": 2, "limit": "3"}]
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(data)


def test_bad_power_values():
    data = diagonal_config()
    for bad in (-1, 1.5, "2", True):
        data["entries"]["a"] = [{"power": bad, "limit": "-1"}]
        with pytest.raises(ConfigError):
            parse_config(data)


def test_missing_and_unknown_keys():
    with pytest.raises(ConfigError, match="entries"):
        parse_config({"params": {}})
    with pytest.raises(ConfigError, match="unknown"):
        parse_config({"entries": diagonal_config()["entries"], "extra": 1})
    data = diagonal_config()
    del data["entries"]["b"]
    with pytest.raises(ConfigError, match="missing"):
        parse_config(data)


def test_tolerance_and_grid_overrides():
    data = film_config()
    data["tolerances"] = {"margin_tol": 1e-6, "decay_tol": 1e-5}
    data["grids"] = {"x_max": 30, "x_points": 101, "xi_max": 100, "xi_points": 50}
    cfg = parse_config(data)
    assert cfg.tolerances.margin_tol == 1e-6
    assert cfg.tolerances.pole_tol == 1e-12  # untouched default
    assert cfg.grids.x_points == 101
    grid = cfg.grids.sample_grid()
    assert len(grid.x) == 101 and len(grid.xi) == 100


def test_unknown_tolerance_rejected():
    data = film_config()
    data["tolerances"] = {"mystery_tol": 1.0}
    with pytest.raises(ConfigError, match="unknown tolerance"):
        parse_config(data)


def test_param_validation():
    data = film_config()
    data["params"]["x"] = 1.0
    with pytest.raises(ConfigError, match="shadows"):
        parse_config(data)
    data = film_config()
    data["params"]["delta"] = "0.98"
    with pytest.raises(ConfigError, match="real number"):
        parse_config(data)


def test_emit_load_roundtrip(tmp_path, film_cfg):
    text = emit_config(film_cfg)
    path = tmp_path / "roundtrip.json"
    path.write_text(text)
    again = load_config(path)
    L1 = limiting_matrix(film_cfg.operator)
    L2 = limiting_matrix(again.operator)
    for entry in "abcd":
        assert getattr(L1, entry) == getattr(L2, entry)
    assert again.tolerances == film_cfg.tolerances
    assert again.grids == film_cfg.grids


def test_load_config_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(path)


# ---------------------------------------------------------------------------
# run_checks

def test_run_checks_film(film_cfg):
    report = run_checks(film_cfg)
    assert report["pass"] is True
    assert report["case"] == "OFFDIAG" and report["kappa"] == 4
    assert report["omega"]["holds"] is True
    assert report["stabilization"]["pass"] is True
    assert all(v == 0.0 for v in report["stabilization"]["metrics"].values())
    lam0 = report["pencil"]["lam_coeff"][0]
    assert lam0[0] == pytest.approx(5 / (2 * DELTA), rel=1e-12)


def test_run_checks_perturbed(film_perturbed_cfg):
    report = run_checks(film_perturbed_cfg)
    assert report["pass"] is True
    assert report["omega"] is None  # template mismatch: perturbed lead
    metrics = list(report["stabilization"]["metrics"].values())
    assert metrics == sorted(metrics, reverse=True)


# ---------------------------------------------------------------------------
# CLI end to end

def _write_film(tmp_path, **kwargs):
    path = tmp_path / "film.json"
    path.write_text(json.dumps(film_config(**kwargs)))
    return str(path)


def test_cli_check_exit_codes(tmp_path, capsys):
    path = _write_film(tmp_path)
    assert main(["check", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True

    failing = json.loads(json.dumps(film_config()))
    # degenerate leading coefficient of the order-3 entry: the asymptotic
    # tail of the determinant margin collapses
    failing["entries"]["b"][0]["limit"] = "1e-13"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(failing))
    assert main(["check", str(bad)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is False


def test_cli_check_missing_file(capsys):
    assert main(["check", "/nonexistent/config.json"]) == 2
    assert "io error" in capsys.readouterr().err


def test_cli_check_invalid_config(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"entries": {}}))
    assert main(["check", str(path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_spectrum_outputs_deterministic(tmp_path, capsys):
    path = _write_film(tmp_path)
    outs = []
    for tag in ("one", "two"):
        csv = tmp_path / f"{tag}.csv"
        svgf = tmp_path / f"{tag}.svg"
        code = main(["spectrum", path, "--out-csv", str(csv),
                     "--out-svg", str(svgf)])
        assert code == 0
        capsys.readouterr()
        outs.append((csv.read_bytes(), svgf.read_bytes()))
    assert outs[0][0] == outs[1][0]
    assert outs[0][1] == outs[1][1]
    text = outs[0][0].decode()
    assert text.startswith("xi,branch,re_lambda,im_lambda,")
    svg_text = outs[0][1].decode()
    assert svg_text.startswith('<?xml version="1.0"')
    assert "<polyline" in svg_text


def test_cli_spectrum_window_flag(tmp_path, capsys):
    path = _write_film(tmp_path)
    code = main(["spectrum", path, "--window=-0.2,0.1,-0.2,0.2",
                 "--out-csv", str(tmp_path / "zoom.csv"),
                 "--out-svg", str(tmp_path / "zoom.svg")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["window"] == [-0.2, 0.1, -0.2, 0.2]
    # origin sample present: curve passes through 0 at xi = 0
    rows = (tmp_path / "zoom.csv").read_text().splitlines()[1:]
    origin = [r for r in rows if r.startswith("0.0,")]
    assert any(float(r.split(",")[2]) == 0.0 and float(r.split(",")[3]) == 0.0
               for r in origin)


def test_cli_spectrum_bad_window(tmp_path, capsys):
    path = _write_film(tmp_path)
    assert main(["spectrum", path, "--window=1,2,3"]) == 2


def test_cli_spectrum_gate_and_force(tmp_path, capsys):
    failing = film_config()
    failing["entries"]["b"][0]["limit"] = "1e-13"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(failing))
    csv = tmp_path / "forced.csv"
    assert main(["spectrum", str(bad), "--out-csv", str(csv),
                 "--out-svg", str(tmp_path / "forced.svg")]) == 1
    capsys.readouterr()
    assert main(["spectrum", str(bad), "--force", "--out-csv", str(csv),
                 "--out-svg", str(tmp_path / "forced.svg")]) == 0
    capsys.readouterr()
    assert csv.read_text().startswith("# force: failing checks skipped:")


def test_cli_validate_json(tmp_path, capsys):
    path = _write_film(tmp_path)
    eig_csv = tmp_path / "eigs.csv"
    code = main(["validate", path, "--L", "3.141592653589793", "--M", "16",
                 "--out-csv", str(eig_csv)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["matched_fraction"] == 1.0
    assert report["converged"] is True
    assert len(report["eigenvalues"]) == 32
    lines = eig_csv.read_text().splitlines()
    assert lines[0] == "re,im"
    assert len(lines) == 33


def test_cli_film_writes_config_and_outputs(tmp_path, capsys):
    cfg_out = tmp_path / "water.json"
    code = main(["film", "--config-out", str(cfg_out),
                 "--out-csv", str(tmp_path / "s.csv"),
                 "--out-svg", str(tmp_path / "s.svg")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["checks"]["omega"]["holds"] is True
    assert summary["lambda_set"] == []
    assert summary["lambda_search_skipped"] is True
    emitted = json.loads(cfg_out.read_text())
    assert emitted["params"] == {"delta": 0.98, "eta": 0.01, "c0": 1.15}
    reloaded = parse_config(emitted)
    assert (reloaded.operator.m, reloaded.operator.q) == (2, 1)


def test_cli_film_c0_one_kills_linear_coefficient(tmp_path, capsys):
    code = main(["film", "--c0", "1.0", "--config-out",
                 str(tmp_path / "c.json"),
                 "--out-csv", str(tmp_path / "c.csv"),
                 "--out-svg", str(tmp_path / "c.svg")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    const_pairs = summary["checks"]["pencil"]["const_coeff"]
    assert const_pairs[1] == [0.0, 0.0]  # factor (1 - c0) vanishes


def test_cli_film_rejects_bad_parameters(tmp_path, capsys):
    assert main(["film", "--delta", "-1", "--config-out",
                 str(tmp_path / "x.json")]) == 2
    assert "positive" in capsys.readouterr().err


def test_cli_film_perturbed(tmp_path, capsys):
    code = main(["film", "--perturbed", "--config-out",
                 str(tmp_path / "p.json"),
                 "--out-csv", str(tmp_path / "p.csv"),
                 "--out-svg", str(tmp_path / "p.svg")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["checks"]["pass"] is True
    assert summary["checks"]["omega"] is None
    # the search ran (no omega shortcut) and still found nothing
    assert summary["lambda_search_skipped"] is False
    assert summary["lambda_set"] == []


def test_cli_diagonal_spectrum_lambda_set(tmp_path, capsys):
    path = tmp_path / "diag.json"
    path.write_text(json.dumps(diagonal_config()))
    code = main(["spectrum", str(path), "--window=-1,9,-3,3",
                 "--out-csv", str(tmp_path / "d.csv"),
                 "--out-svg", str(tmp_path / "d.svg")])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert len(summary["lambda_set"]) == 1
    assert abs(complex(*summary["lambda_set"][0])) <= 1e-8


def test_defaults_dataclasses():
    assert Tolerances().margin_tol == 1e-8
    assert Tolerances().dist_tol is None
    assert GridSpec().x_points == 201
    assert isinstance(parse_config(film_config()), Config)
