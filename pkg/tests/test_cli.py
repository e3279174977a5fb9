import csv
import io
import json
import math

import pytest

from qmet.cli import COMMANDS, EXIT_INVALID, EXIT_OK, commute_report, main, render


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestPrecisionScan:
    def test_default_grid(self, capsys):
        code, out, _ = run(capsys, "--command", "precision-scan", "--n-min", "1", "--n-max", "10")
        assert code == EXIT_OK
        rows = csv_rows(out)
        assert len(rows) == 10 * 32
        for row in rows:
            n = int(row["n_qubits"])
            assert abs(float(row["delta_theta"]) - 2.0 ** -n) <= 1e-9
            assert float(row["direct_sum_mt_bound"]) == pytest.approx(1 / (2 * n))
            assert float(row["classical_dispersion"]) == pytest.approx(2 ** ((n - 1) / 2))
            assert row["label"] == "CQC"

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(capsys, "--command", "precision-scan", "--n-max", "1", "--theta-count", "1")
        theta = csv_rows(out)[0]["theta"]
        assert theta == format(0.1 * math.pi / 2, ".17g")

    def test_empty_grid(self, capsys):
        code, _, err = run(capsys, "--command", "precision-scan", "--theta-count", "0")
        assert code == EXIT_INVALID
        assert "theta_count" in err

    def test_stationary_grid_point(self, capsys):
        code, _, err = run(capsys, "--command", "precision-scan", "--n-max", "2",
                           "--theta-start", "0.1", "--theta-stop", "0.7853981633974483",
                           "--theta-count", "2")
        assert code == EXIT_INVALID
        assert "stationary" in err

    def test_json(self, capsys):
        code, out, _ = run(capsys, "--command", "precision-scan", "--n-max", "3",
                           "--theta-count", "4", "--format", "json")
        assert code == EXIT_OK
        data = json.loads(out)
        assert len(data) == 12
        assert set(data[0]) >= {"n_qubits", "theta", "expectation_X", "dispersion_X",
                                "derivative_X", "delta_theta", "dispersion_H", "mt_bound",
                                "bc_bound", "label"}


class TestJcEvolve:
    def test_resonant_trace(self, capsys, tmp_path):
        cfg = tmp_path / "jc.json"
        cfg.write_text(json.dumps({"command": "jc-evolve", "n_qubits": 2, "g": 0.1,
                                   "omega": 1.0, "Omega": 2.0, "t_count": 41}))
        code, out, _ = run(capsys, "--config", str(cfg))
        assert code == EXIT_OK
        rows = csv_rows(out)
        assert float(rows[0]["expectation_X"]) == 1.0
        period = 2 * math.pi / 0.4
        for row in rows:
            t = float(row["t"])
            assert float(row["expectation_X"]) == pytest.approx(
                0.5 * (1 + math.cos(0.4 * t)), abs=1e-9)
        # default window spans two signal periods
        assert float(rows[-1]["t"]) == pytest.approx(2 * period)

    def test_off_resonance_partial_contrast(self, capsys, tmp_path):
        cfg = tmp_path / "jc.json"
        cfg.write_text(json.dumps({"command": "jc-evolve", "Omega": 2.3, "t_count": 201}))
        code, out, _ = run(capsys, "--config", str(cfg))
        assert code == EXIT_OK
        values = [float(r["expectation_X"]) for r in csv_rows(out)]
        assert min(values) > 0.05
        assert max(values) - min(values) < 1

    def test_cutoff_violation_surfaced(self, capsys, tmp_path):
        cfg = tmp_path / "jc.json"
        cfg.write_text(json.dumps({"command": "jc-evolve", "photon_number": 2,
                                   "fock_cutoff": 2}))
        code, _, err = run(capsys, "--config", str(cfg))
        assert code == EXIT_INVALID
        assert "CutoffViolation" in err

    def test_bad_json_reports_line(self, capsys, tmp_path):
        cfg = tmp_path / "jc.json"
        cfg.write_text('{\n  "command": "jc-evolve",\n  "g": ,\n}\n')
        code, _, err = run(capsys, "--config", str(cfg))
        assert code == EXIT_INVALID
        assert "line 3" in err

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"command": "jc-evolve", "format": "csv"}))
        code, out, _ = run(capsys, "--config", str(cfg), "--format", "json")
        assert code == EXIT_OK
        assert out.startswith("[")


class TestCommuteCheck:
    def test_counts(self, capsys):
        code, out, _ = run(capsys, "--command", "commute-check", "--n-min", "1", "--n-max", "6")
        assert code == EXIT_OK
        rows = {int(r["n_qubits"]): r for r in csv_rows(out)}
        assert rows[3]["h_commuting"] == "6" and rows[3]["h_pairs"] == "6"
        assert rows[3]["cross_anticommuting"] == "16"
        assert rows[1]["h_pairs"] == "0" and rows[1]["cross_anticommuting"] == "1"
        assert rows[6]["cross_anticommuting"] == str(2 ** 10)
        assert all(r["ok"] == "true" for r in rows.values())

    def test_limit(self, capsys):
        code, _, err = run(capsys, "--command", "commute-check", "--n-max", "9")
        assert code == EXIT_INVALID
        assert "n_max" in err

    def test_report_function(self):
        row, bad = commute_report(4)
        assert bad is None
        assert row["a_pairs"] == row["a_commuting"] == 28


class TestBounds:
    def test_values(self, capsys):
        code, out, _ = run(capsys, "--command", "bounds", "--n-min", "1", "--n-max", "8")
        assert code == EXIT_OK
        for row in csv_rows(out):
            n = int(row["n_qubits"])
            assert float(row["dispersion_H_all_up"]) == pytest.approx(2 ** (n - 1))
            assert float(row["mt_bound"]) == 2.0 ** -n
            assert float(row["direct_sum_dispersion"]) == n
            assert float(row["quantum_classical_ratio"]) == pytest.approx(2 ** ((n - 1) / 2))


class TestMonteCarlo:
    def test_csv_columns(self, capsys):
        code, out, _ = run(capsys, "--command", "monte-carlo", "--n-min", "2", "--n-max", "3",
                           "--seed", "20261015")
        assert code == EXIT_OK
        assert out.splitlines()[0] == "N,nu,delta_nu_empirical,bc_bound"
        assert len(csv_rows(out)) == 4


@pytest.mark.parametrize("command", COMMANDS)
def test_deterministic(command, tmp_path):
    outputs = []
    for k in range(2):
        path = tmp_path / f"out{k}.csv"
        args = ["--command", command, "--n-min", "2", "--n-max", "3", "--seed", "7",
                "--theta-count", "5", "--out", str(path)]
        assert main(args) == EXIT_OK
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_render_empty():
    assert render([], "json") == "[]\n"
