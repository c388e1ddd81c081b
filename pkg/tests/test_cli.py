import json

import pytest

from phaselab import cli
from phaselab.experiments import CSV_HEADER, VerificationError


def strip_wall_time(text):
    return [line.rsplit(",", 1)[0] for line in text.strip().split("\n")]


class TestIntSpec:
    def test_single_value(self):
        assert cli.parse_int_spec("8") == (8,)

    def test_comma_list(self):
        assert cli.parse_int_spec("2,4,8") == (2, 4, 8)

    def test_inclusive_range(self):
        assert cli.parse_int_spec("0..7") == tuple(range(8))

    def test_mixed(self):
        assert cli.parse_int_spec("1,4..6,9") == (1, 4, 5, 6, 9)

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            cli.parse_int_spec("3..1")
        with pytest.raises(ValueError):
            cli.parse_int_spec("a,b")
        with pytest.raises(ValueError):
            cli.parse_int_spec("1,,2")


class TestVerifyBound:
    def test_spec_example_row_count(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        code = cli.main(
            ["verify-bound", "--n", "8", "--q", "0..7", "--trials", "50",
             "--seed", "7", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) - 1 == 400 + 8
        err = capsys.readouterr().err
        assert "bound-sweep" in err and "rows within bound" in err

    def test_invalid_q_exits_2(self, capsys):
        assert cli.main(["verify-bound", "--q", "9", "--n", "4"]) == 2
        assert "configuration error" in capsys.readouterr().err

    def test_stdout_when_no_out(self, capsys):
        code = cli.main(["verify-bound", "--n", "3", "--q", "0", "--trials", "1", "--seed", "1"])
        assert code == 0
        captured = capsys.readouterr()
        assert captured.out.startswith(CSV_HEADER)
        assert "bound-sweep" in captured.err

    def test_json_format(self, capsys):
        code = cli.main(
            ["verify-bound", "--n", "3", "--q", "0", "--trials", "1", "--seed", "1",
             "--format", "json"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["metadata"]["kind"] == "bound-sweep"

    def test_identical_seeds_identical_rows(self, tmp_path):
        args = ["verify-bound", "--n", "4", "--q", "0..3", "--trials", "3", "--seed", "9"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        assert strip_wall_time(a.read_text()) == strip_wall_time(b.read_text())


class TestSeedPrecedence:
    def test_env_var_fallback(self, tmp_path, monkeypatch):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        monkeypatch.setenv(cli.ENV_SEED, "33")
        cli.main(["verify-bound", "--n", "4", "--q", "1", "--trials", "2", "--out", str(a)])
        monkeypatch.delenv(cli.ENV_SEED)
        cli.main(["verify-bound", "--n", "4", "--q", "1", "--trials", "2", "--seed", "33",
                  "--out", str(b)])
        assert strip_wall_time(a.read_text()) == strip_wall_time(b.read_text())

    def test_flag_beats_env(self, tmp_path, monkeypatch):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        monkeypatch.setenv(cli.ENV_SEED, "1000")
        cli.main(["verify-bound", "--n", "4", "--q", "1", "--trials", "2", "--seed", "33",
                  "--out", str(a)])
        monkeypatch.delenv(cli.ENV_SEED)
        cli.main(["verify-bound", "--n", "4", "--q", "1", "--trials", "2", "--seed", "33",
                  "--out", str(b)])
        assert strip_wall_time(a.read_text()) == strip_wall_time(b.read_text())


class TestOtherCommands:
    def test_epr_check_prints_deviation(self, capsys):
        assert cli.main(["epr-check", "--n", "12"]) == 0
        err = capsys.readouterr().err
        assert "max entrywise deviation" in err

    def test_verify_counter_defaults(self, capsys):
        assert cli.main(["verify-counter", "--n", "4", "--trials", "2"]) == 0
        assert "within leakage budget" in capsys.readouterr().err

    def test_cemm_requires_theta(self, capsys):
        assert cli.main(["cemm", "--n", "8"]) == 2

    def test_cemm_curve(self, capsys):
        assert cli.main(["cemm", "--n", "8", "--theta", "0.125,0.0625"]) == 0
        assert "worst within-tolerance" in capsys.readouterr().err

    def test_reduction_check(self, capsys):
        assert cli.main(
            ["reduction-check", "--n", "4", "--p", "0.5", "--trials", "200", "--seed", "3"]
        ) == 0
        assert "min margin" in capsys.readouterr().err

    def test_stress_small(self, capsys):
        assert cli.main(["stress", "--n", "2", "--q", "1", "--trials", "20", "--seed", "1"]) == 0
        assert "random-stress" in capsys.readouterr().err

    def test_missing_n_exits_2(self, capsys):
        assert cli.main(["epr-check"]) == 2

    def test_unknown_command_exits_2(self, capsys):
        assert cli.main(["frobnicate"]) == 2

    def test_usage_error_exits_2(self, capsys):
        assert cli.main([]) == 2


class TestSweepCommand:
    def test_runs_config_file(self, tmp_path, capsys):
        cfg = {
            "kind": "bound-sweep",
            "n_values": [4],
            "q_values": [0, 1],
            "trials": 2,
            "seed": 5,
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["sweep", "--config", str(path)]) == 0
        out = capsys.readouterr().out
        assert out.startswith(CSV_HEADER)
        assert len(out.strip().split("\n")) == 1 + 2 + 4

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = {"kind": "epr-check", "n_values": [2], "seed": 5}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["sweep", "--config", str(path), "--n", "3,4"]) == 0
        rows = capsys.readouterr().out.strip().split("\n")[1:]
        assert [r.split(",")[0] for r in rows] == ["3", "4"]

    def test_sweep_needs_kind(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n_values": [2]}))
        assert cli.main(["sweep", "--config", str(path)]) == 2

    def test_missing_config_file(self, capsys):
        assert cli.main(["sweep", "--config", "/nonexistent/cfg.json"]) == 2

    def test_bad_json(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        assert cli.main(["sweep", "--config", str(path)]) == 2


class TestFailurePropagation:
    def test_verification_failure_exits_1(self, monkeypatch, capsys):
        def boom(cfg, jobs=None):
            raise VerificationError("bound violated: seed=42")

        monkeypatch.setattr(cli, "run_experiment", boom)
        assert cli.main(["verify-bound", "--n", "4", "--q", "1"]) == 1
        assert "VERIFICATION FAILURE" in capsys.readouterr().err
