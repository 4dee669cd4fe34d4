import json

import pytest

from entsig import (
    ShotBudget,
    evaluate,
    ghz_state,
    inequality_to_json_dict,
    predicted_counts,
)
from entsig.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSweepCommand:
    def test_writes_csv_with_expected_shape(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys, "sweep", "--noise", "bitflip", "--qubits", "4",
            "--shots", "8000", "--grid", "0:0.25:20", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "p,F,V_M,E_M,S_M,V_A,E_A,S_A"
        assert len(lines) == 21
        assert lines[1].split(",")[4] == "inf"

    def test_deterministic_output(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--grid", "0:0.2:8", "--shots", "4000"]
        assert run_cli(capsys, *args, "--out", str(a))[0] == 0
        assert run_cli(capsys, *args, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path, capsys):
        out = tmp_path / "sweep.json"
        code, _, _ = run_cli(capsys, "sweep", "--grid", "0:0.1:3", "--format", "json", "--out", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        assert len(data["rows"]) == 3
        assert data["rows"][0]["S_M"] == "inf"

    def test_bad_grid_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--grid", "0:2:10")
        assert code == 2
        assert "grid" in err

    def test_ansatz_needs_four_qubits(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--state", "ansatz", "--qubits", "6", "--grid", "0:0.1:3")
        assert code == 2
        assert "qubits" in err

    def test_unwritable_path_is_data_error(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--grid", "0:0.1:3", "--out", "/nonexistent-dir/x.csv")
        assert code == 3


class TestCrossingCommand:
    def test_bitflip_four_qubits(self, capsys):
        code, out, _ = run_cli(capsys, "crossing", "--noise", "bitflip", "--qubits", "4")
        assert code == 0
        first = out.strip().split("\n")[0]
        assert first.startswith("p_star = ")
        f_star = float(first.split("F_star = ")[1])
        assert abs(f_star - 0.70) < 0.01

    def test_no_crossing_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "crossing", "--span", "0.2:0.25")
        assert code == 4
        assert "no crossing" in err.lower()

    def test_json_written(self, tmp_path, capsys):
        out = tmp_path / "crossing.json"
        code, _, _ = run_cli(capsys, "crossing", "--out", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        assert {"p_star", "fidelity_star", "noise", "qubits"} <= set(data)


class TestReportCommand:
    def test_round_trip_matches_in_process(self, tmp_path, capsys, rho_ghz4, mermin4):
        budget = ShotBudget.equal_split(8000, mermin4)
        table = predicted_counts(rho_ghz4, mermin4, budget)
        path = tmp_path / "counts.json"
        path.write_text(json.dumps(table.to_json_dict()))
        out = tmp_path / "report.json"
        code, _, _ = run_cli(capsys, "report", "--counts", str(path), "--inequality", "mermin", "--out", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        reference = evaluate(table, mermin4)
        assert data["violation"] == pytest.approx(reference.violation, abs=1e-9)
        assert data["error"] == pytest.approx(reference.error, abs=1e-9)
        assert data["significance"] == "inf"

    def test_finite_significance_round_trip(self, tmp_path, capsys, mermin4):
        from entsig import DensityMatrix, apply_noise

        noisy = apply_noise(DensityMatrix.from_pure(ghz_state(4)), "bitflip", 0.05)
        budget = ShotBudget.equal_split(7500, mermin4)
        table = predicted_counts(noisy, mermin4, budget)
        path = tmp_path / "counts.json"
        path.write_text(json.dumps(table.to_json_dict()))
        out = tmp_path / "report.json"
        code, _, _ = run_cli(capsys, "report", "--counts", str(path), "--out", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        reference = evaluate(table, mermin4)
        assert data["significance"] == pytest.approx(reference.significance, rel=1e-9)

    def test_malformed_json_is_data_error(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "report", "--counts", str(path))
        assert code == 3
        assert "JSON" in err or "json" in err

    def test_missing_file_is_data_error(self, capsys):
        code, _, _ = run_cli(capsys, "report", "--counts", "/no/such/file.json")
        assert code == 3

    def test_unknown_setting_labels_rejected(self, tmp_path, capsys):
        path = tmp_path / "counts.json"
        path.write_text(json.dumps({
            "inequality": "mermin4",
            "settings": [{"label": "ZZZZ", "counts": [1] * 16}],
        }))
        code, _, err = run_cli(capsys, "report", "--counts", str(path))
        assert code == 3

    def test_zero_totals_rejected(self, tmp_path, capsys, rho_ghz4, mermin4):
        budget = ShotBudget.equal_split(8000, mermin4)
        data = predicted_counts(rho_ghz4, mermin4, budget).to_json_dict()
        data["settings"][0]["counts"] = [0.0] * 16
        path = tmp_path / "counts.json"
        path.write_text(json.dumps(data))
        code, _, err = run_cli(capsys, "report", "--counts", str(path))
        assert code == 3
        assert "no events" in err

    def test_custom_inequality_file(self, tmp_path, capsys, mermin4, rho_ghz4):
        ineq_path = tmp_path / "custom.json"
        ineq_path.write_text(json.dumps(inequality_to_json_dict(mermin4)))
        budget = ShotBudget.equal_split(8000, mermin4)
        counts_path = tmp_path / "counts.json"
        counts_path.write_text(json.dumps(predicted_counts(rho_ghz4, mermin4, budget).to_json_dict()))
        code, out, _ = run_cli(
            capsys, "report", "--counts", str(counts_path), "--inequality", str(ineq_path)
        )
        assert code == 0
        assert json.loads(out)["violation"] == pytest.approx(4.0, abs=1e-9)

    def test_csv_format(self, tmp_path, capsys, rho_ghz4, mermin4):
        budget = ShotBudget.equal_split(8000, mermin4)
        path = tmp_path / "counts.json"
        path.write_text(json.dumps(predicted_counts(rho_ghz4, mermin4, budget).to_json_dict()))
        code, out, _ = run_cli(capsys, "report", "--counts", str(path), "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "kind,label,mean,error,extra"
        assert lines[-1].startswith("total,")
        assert lines[-1].endswith("inf")


class TestPredictCommand:
    def test_emit_and_reload(self, tmp_path, capsys):
        out = tmp_path / "counts.json"
        code, _, _ = run_cli(capsys, "predict", "--inequality", "ardehali", "--p", "0.05", "--out", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        assert data["mode"] == "predicted"
        assert len(data["settings"]) == 16

    def test_sampled_mode_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["predict", "--p", "0.05", "--seed", "11"]
        run_cli(capsys, *args, "--out", str(a))
        run_cli(capsys, *args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert json.loads(a.read_text())["mode"] == "sampled"


class TestImproveCommand:
    def test_default_demo(self, capsys):
        code, out, _ = run_cli(capsys, "improve")
        assert code == 0
        assert "S after = inf" in out
        payload = json.loads(out.split("\n", 1)[1])
        assert payload["significance_after"] == "inf"
        assert payload["added_operator_psd"] is True
        assert payload["deviation_after"] < 1e-10

    def test_undetected_state_rejected(self, capsys):
        code, _, err = run_cli(capsys, "improve", "--c0", "1.0", "--c1", "0.0")
        assert code == 2
        assert "not detected" in err

    def test_a_too_large_named_in_error(self, capsys):
        code, _, err = run_cli(capsys, "improve", "--a", "0.9")
        assert code == 2
        assert "detected" in err


class TestMonteCarloCommand:
    def test_small_run_summary(self, tmp_path, capsys):
        out = tmp_path / "mc.json"
        code, _, _ = run_cli(
            capsys, "montecarlo", "--p", "0.05", "--trials", "150",
            "--seed", "7", "--inequality", "mermin", "--out", str(out),
        )
        assert code == 0
        data = json.loads(out.read_text())
        assert data["mermin"]["trials"] == 150
        assert 0.5 < data["mermin"]["std_ratio"] < 1.5

    def test_seed_determinism(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["montecarlo", "--p", "0.03", "--trials", "120", "--seed", "3", "--inequality", "ardehali"]
        run_cli(capsys, *args, "--out", str(a))
        run_cli(capsys, *args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_too_few_trials_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "montecarlo", "--trials", "10")
        assert code == 2
        assert "trials" in err


class TestParser:
    def test_unknown_command_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_choice_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--noise", "pink"])
        assert exc.value.code == 2
