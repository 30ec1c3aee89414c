"""CLI: envelopes, exit codes, cross-method agreement, file emitters."""

import json
import math

import pytest

from bkising.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_z_closed_free_spins(capsys):
    code, payload = run_cli(capsys, "z", "--M", "2", "--N", "2", "--k1", "0", "--k2", "0")
    assert code == 0
    assert payload["tool"] == "bkising" and payload["command"] == "z"
    assert payload["config"]["M"] == 2 and "wall_time_s" in payload
    assert payload["result"]["log_abs_z"] == pytest.approx(4 * math.log(2), rel=1e-13)
    assert payload["result"]["sign"] == 1


@pytest.mark.parametrize("field", ["zero", "ipi2"])
def test_z_methods_agree(capsys, field):
    base = ["z", "--M", "2", "--N", "4", "--k1", "0.3", "--k2", "0.2", "--field", field]
    results = {}
    for method in ("closed", "brute", "transfer"):
        code, payload = run_cli(capsys, *base, "--method", method)
        assert code == 0
        results[method] = payload["result"]["log_abs_z"]
    assert results["brute"] == pytest.approx(results["closed"], abs=1e-10)
    assert results["transfer"] == pytest.approx(results["closed"], abs=1e-10)


def test_z_mccoywu_method(capsys):
    base = ["z", "--M", "2", "--N", "4", "--k1", "0.3", "--k2", "0.5", "--field", "ipi2"]
    _, closed = run_cli(capsys, *base, "--method", "closed")
    _, chain = run_cli(capsys, *base, "--method", "mccoywu")
    assert chain["result"]["log_abs_z"] == pytest.approx(closed["result"]["log_abs_z"], abs=1e-9)


def test_z_ipi2_zero_couplings_sign_zero(capsys):
    code, payload = run_cli(
        capsys, "z", "--M", "2", "--N", "2", "--k1", "0", "--k2", "0", "--field", "ipi2"
    )
    assert code == 0
    assert payload["result"]["sign"] == 0 and payload["result"]["log_abs_z"] is None


def test_precondition_exit_code(capsys):
    code, payload = run_cli(capsys, "z", "--M", "2", "--N", "3", "--k1", "0.1", "--k2", "0.1")
    assert code == 2
    assert payload["result"]["error"]["name"] == "n_cols_even"


def test_mccoywu_zero_field_rejected(capsys):
    code, payload = run_cli(
        capsys, "z", "--M", "2", "--N", "4", "--k1", "0.3", "--k2", "0.5", "--method", "mccoywu"
    )
    assert code == 2
    assert payload["result"]["error"]["name"] == "mccoywu_requires_ipi2"


def test_verify_small_run(capsys):
    code, payload = run_cli(capsys, "verify", "--max-spins", "8", "--trials", "2", "--seed", "42")
    assert code == 0
    assert payload["result"]["passed"] is True
    assert payload["result"]["total_cases"] > 0
    assert "oracle_symbolic" in payload["result"]["suites"]


def test_verify_seed_changes_couplings_not_outcome(capsys):
    runs = {}
    for seed in ("42", "7"):
        code, payload = run_cli(
            capsys, "verify", "--max-spins", "6", "--trials", "2", "--seed", seed, "--cases"
        )
        assert code == 0 and payload["result"]["passed"] is True
        runs[seed] = payload["result"]["cases"]
    k42 = [(c["k1"], c["k2"]) for c in runs["42"]]
    k7 = [(c["k1"], c["k2"]) for c in runs["7"]]
    assert k42 != k7


def test_verify_subset_still_passes(capsys):
    code, payload = run_cli(capsys, "verify", "--max-spins", "4", "--trials", "2", "--seed", "42")
    assert code == 0 and payload["result"]["passed"] is True


def test_verify_failure_exit_code(capsys, monkeypatch):
    import bkising.cli as cli_mod

    def fake_verification(**kwargs):
        return {"passed": False, "total_cases": 1, "failed_cases": 1, "suites": {}, "cases": []}

    monkeypatch.setattr(cli_mod, "run_verification", fake_verification)
    code, payload = run_cli(capsys, "verify", "--max-spins", "4")
    assert code == 3 and payload["result"]["passed"] is False


def test_zeros_csv_output(capsys, tmp_path):
    out = tmp_path / "z.csv"
    code, payload = run_cli(
        capsys, "zeros", "--M", "2", "--N", "4", "--field", "zero", "--out", str(out)
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 1 + 2 * 2 * 4  # header + 2MN rows
    assert payload["result"]["count"] == 16
    assert payload["result"]["max_residual"] <= 1e-9
    residuals = [float(line.split(",")[5]) for line in lines[1:]]
    assert all(r <= 1e-9 for r in residuals)


def test_zeros_json_round_trip(capsys, tmp_path):
    out = tmp_path / "z.json"
    code, payload = run_cli(
        capsys, "zeros", "--M", "4", "--N", "4", "--field", "ipi2", "--format", "json",
        "--out", str(out),
    )
    assert code == 0
    data = json.loads(out.read_text())
    assert data["schema"] == ["j", "k", "re", "im", "locus", "residual"]
    assert len(data["zeros"]) == payload["result"]["count"] == 8


def test_zeros_anisotropic_with_complex_x2(capsys, tmp_path):
    out = tmp_path / "aniso.csv"
    code, payload = run_cli(
        capsys, "zeros", "--M", "2", "--N", "4", "--x2", "0.3+0.1i", "--out", str(out)
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert all(line.split(",")[4] == "unclassified" for line in lines[1:])


def test_zeros_io_error_exit_code(capsys):
    code, payload = run_cli(
        capsys, "zeros", "--M", "2", "--N", "4", "--out", "/nonexistent-dir/z.csv"
    )
    assert code == 4
    assert payload["result"]["error"]["type"] == "io"


def test_zeros_x2_requires_zero_field(capsys, tmp_path):
    code, payload = run_cli(
        capsys, "zeros", "--M", "2", "--N", "4", "--field", "ipi2", "--x2", "0.4",
        "--out", str(tmp_path / "z.csv"),
    )
    assert code == 2 and payload["result"]["error"]["name"] == "x2_field"


def test_free_energy_command(capsys):
    code, payload = run_cli(capsys, "free-energy", "--k1", "0.4", "--k2", "0.5", "--resolution", "64")
    assert code == 0
    r = payload["result"]
    assert r["f_over_kT"] == pytest.approx(0.8783031181082085, abs=1e-10)
    assert r["estimated_error"] < 1e-10
    assert r["axis_swap_gap"] < 1e-12
