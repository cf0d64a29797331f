"""Command-line behavior: modes, formats, exit codes, reproducibility."""

import json
import math

import numpy as np
import pytest

from statvac import cli, io as svio, mass
from statvac.spherical import operators

ROOT4PI = math.sqrt(4.0 * math.pi)


def write_json(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def schwarzschild_case(c, eps, tau=None):
    case = {
        "gamma1": {"trace": [{"l": 0, "m": 0, "value": 2.0 * c * ROOT4PI}]},
        "H1": [{"l": 0, "m": 0, "value": eps * ROOT4PI}],
    }
    if tau is not None:
        case["tau"] = tau
    return case


def second_order_mass(c, eps):
    return 0.5 * (eps - c) + 0.25 * (3.0 * c * eps - 0.5 * eps ** 2 - c ** 2)


def test_moments_mode_passes(capsys):
    code, out, err = run_cli(capsys, "--mode", "moments", "--lmax", "8")
    assert code == 0 and err == ""
    payload = json.loads(out)
    assert payload["passed"] is True
    assert list(payload["suites"]) == ["moments"]


def test_fields_without_input_is_the_round_sphere(capsys):
    code, out, _ = run_cli(capsys, "--mode", "fields", "--lmax", "8")
    assert code == 0
    report = json.loads(out)["reports"][0]
    assert report["m1"] == 0.0 and report["m2"] == 0.0


def test_fields_pure_mean_curvature_offset(tmp_path, capsys):
    eps = 0.05
    path = write_json(tmp_path / "h.json", {
        "H1": [{"l": 0, "m": 0, "value": eps * ROOT4PI}]})
    code, out, _ = run_cli(capsys, "--mode", "fields", "--lmax", "8",
                           "--input", path)
    assert code == 0
    report = json.loads(out)["reports"][0]
    assert abs(report["m1"] - eps / 2.0) < 1e-13
    assert abs(report["m2"] + eps ** 2 / 8.0) < 1e-14


def test_fields_csv_sweep_matches_the_closed_quadratic(tmp_path, capsys):
    values = (-0.08, 0.0, 0.06)
    cases = [schwarzschild_case(c, eps, tau=0.5)
             for c in values for eps in values]
    path = write_json(tmp_path / "sweep.json", {"cases": cases})
    code, out, _ = run_cli(capsys, "--mode", "fields", "--lmax", "8",
                           "--format", "csv", "--input", path)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(svio.CSV_COLUMNS)
    assert len(lines) == 1 + len(cases)
    for line, (c, eps) in zip(lines[1:],
                              [(c, e) for c in values for e in values]):
        cells = line.split(",")
        assert float(cells[0]) == 0.5
        total = float(cells[3])
        assert abs(total - second_order_mass(c, eps)) < 1e-12
        assert abs(float(cells[4]) - 0.5 * total) < 1e-15
        assert cells[5] == "" and cells[6] == "" and cells[7] == ""


def test_small_sphere_anchor_values(tmp_path, capsys):
    path = write_json(tmp_path / "jet.json",
                      {"ric": np.diag([1.0, 0.0, 0.0]).tolist()})
    code, out, _ = run_cli(capsys, "--mode", "small-sphere", "--lmax", "8",
                           "--tau", "0.01", "--input", path)
    assert code == 0
    payload = json.loads(out)
    coeff = payload["coefficients"]
    assert abs(coeff["assembled_c3"] - 1.0 / 12.0) < 1e-12
    assert abs(coeff["assembled_c5"] - 1.0 / 432.0) < 1e-10
    assert coeff["fit_c3"] is None and coeff["fit_c5"] is None
    assert abs(coeff["reference"]["static_c5"] - 1.0 / 432.0) < 1e-15
    report = payload["reports"][0]
    assert abs(report["m1"] - (1.0 / 12.0) * 1e-4) < 1e-12


def test_small_sphere_space_form_quintic(tmp_path, capsys):
    path = write_json(tmp_path / "jet.json",
                      {"ric": (2.0 * np.eye(3)).tolist()})
    code, out, _ = run_cli(capsys, "--mode", "small-sphere", "--lmax", "8",
                           "--tau", "0.01", "--input", path)
    assert code == 0
    coeff = json.loads(out)["coefficients"]
    assert abs(coeff["assembled_c3"] - 0.5) < 1e-12
    assert abs(coeff["assembled_c5"] + 0.25) < 1e-10


def test_small_sphere_zero_jet_default_tau(capsys):
    code, out, _ = run_cli(capsys, "--mode", "small-sphere", "--lmax", "8")
    assert code == 0
    payload = json.loads(out)
    assert payload["tau"] == [0.01]
    assert payload["coefficients"]["assembled_c3"] == 0.0
    report = payload["reports"][0]
    assert report["m1"] == 0.0 and report["m2"] == 0.0


def test_small_sphere_fit_coefficients(tmp_path, capsys):
    path = write_json(tmp_path / "jet.json",
                      {"ric": np.diag([1.0, 0.0, 0.0]).tolist()})
    code, out, _ = run_cli(capsys, "--mode", "small-sphere", "--lmax", "8",
                           "--tau", "0.005", "0.01", "0.02", "--input", path)
    assert code == 0
    coeff = json.loads(out)["coefficients"]
    assert abs(coeff["fit_c3"] - coeff["assembled_c3"]) < 1e-8
    assert abs(coeff["fit_c5"] - coeff["assembled_c5"]) < 1e-3


def test_runs_are_byte_identical(tmp_path):
    jet = write_json(tmp_path / "jet.json", {"ric": np.eye(3).tolist()})
    outs = []
    for name in ("a.json", "b.json"):
        target = tmp_path / name
        code = cli.main(["--mode", "small-sphere", "--lmax", "8",
                         "--tau", "0.01", "--input", jet,
                         "--output", str(target)])
        assert code == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]

    for name in ("v1.json", "v2.json"):
        target = tmp_path / name
        code = cli.main(["--mode", "verify", "--only", "moments",
                         "--lmax", "8", "--seed", "7",
                         "--output", str(target)])
        assert code == 0
        outs.append(target.read_bytes())
    assert outs[2] == outs[3]


def test_output_file_keeps_stdout_clean(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, err = run_cli(capsys, "--mode", "fields", "--lmax", "8",
                             "--output", str(target))
    assert code == 0 and out == "" and err == ""
    assert json.loads(target.read_text())["mode"] == "fields"


def test_verify_only_filters_suites(capsys):
    code, out, _ = run_cli(capsys, "--mode", "verify", "--lmax", "8",
                           "--only", "multipliers")
    assert code == 0
    assert list(json.loads(out)["suites"]) == ["multipliers"]


@pytest.mark.parametrize("argv", [
    ("--mode", "fields", "--lmax", "2"),
    ("--mode", "fields", "--lmax", "200"),
    ("--mode", "small-sphere", "--tau", "-0.1"),
    ("--mode", "verify", "--format", "csv"),
    ("--mode", "verify", "--only", "nonsense"),
])
def test_schema_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.startswith("schema error:")


def test_malformed_input_files_exit_2(tmp_path, capsys):
    missing_m = write_json(tmp_path / "a.json",
                           {"H1": [{"l": 1, "value": 1.0}]})
    code, _, err = run_cli(capsys, "--mode", "fields", "--lmax", "8",
                           "--input", missing_m)
    assert code == 2 and "missing key" in err

    low_p = write_json(tmp_path / "b.json",
                       {"gamma1": {"p": [{"l": 1, "m": 0, "value": 1.0}]}})
    code, _, err = run_cli(capsys, "--mode", "fields", "--lmax", "8",
                           "--input", low_p)
    assert code == 2

    empty_cases = write_json(tmp_path / "c.json", {"cases": []})
    code, _, err = run_cli(capsys, "--mode", "fields", "--lmax", "8",
                           "--input", empty_cases)
    assert code == 2

    asym = write_json(tmp_path / "d.json",
                      {"ric": [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0],
                               [0.0, 0.0, 0.0]]})
    code, _, err = run_cli(capsys, "--mode", "small-sphere", "--lmax", "8",
                           "--input", asym)
    assert code == 2


def test_residual_gate_exits_3(monkeypatch, capsys):
    def fake_estimate(data, tau=None, jet=None):
        return mass.MassReport(m1=0.0, m2=0.0,
                               diagnostics={"residuals": {"d": 1e-3}})

    monkeypatch.setattr(mass, "estimate", fake_estimate)
    code, out, _ = run_cli(capsys, "--mode", "fields", "--lmax", "8")
    assert code == 3
    block = json.loads(out)
    assert block["residuals"]["d"] == 1e-3
    assert block["limit"] == cli.RESIDUAL_LIMIT


def test_tampered_multiplier_fails_verification(monkeypatch, capsys):
    original = operators.divdiv_multiplier
    monkeypatch.setattr(operators, "divdiv_multiplier",
                        lambda ls: 1.02 * original(ls))
    code, out, _ = run_cli(capsys, "--mode", "verify", "--lmax", "8",
                           "--only", "multipliers")
    assert code == 4
    payload = json.loads(out)
    assert payload["passed"] is False
    assert not payload["suites"]["multipliers"]["passed"]
