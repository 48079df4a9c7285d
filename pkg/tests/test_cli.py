"""CLI tests, driving the entry point in-process (default transport serves
requests without a network)."""

import json
import math

import numpy as np
import pytest

from fracorder.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from fracorder.experiment import CSV_HEADER


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestML:
    def test_scalar_output(self, capsys):
        code, out, _ = run(capsys, "ml", "--rho", "1", "--mu", "1", "--z", "1")
        assert code == EXIT_OK
        assert float(out.strip()) == pytest.approx(math.e, rel=1e-12)

    def test_log_scale_csv(self, capsys):
        code, out, _ = run(capsys, "ml", "--rho", "0.5", "--mu", "0.5",
                           "--z", "5000", "--log-scale")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == CSV_HEADER
        assert float(lines[2].split(",")[1]) > 2e7

    def test_invalid_order_fails(self, capsys):
        code, _, err = run(capsys, "ml", "--rho", "-1", "--mu", "1", "--z", "0")
        assert code == EXIT_FAILURE
        assert "RangeError" in err


class TestEigs:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "eigs", "--H", "1", "--h", "1", "--count", "3")
        assert code == EXIT_OK
        lines = out.splitlines()
        first = lines[2].split(",")
        assert float(first[3]) == pytest.approx(-1.4392288398906452, abs=1e-9)


@pytest.fixture(scope="module")
def model_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    path = d / "model.json"
    cfg = json.dumps({
        "cylinder": {"Px": 4, "Py": 4, "J": 4},
        "points": [[0.3, 0.3, 0.3]],
    })
    code = main(["build", "--config", cfg, "--model-out", str(path)])
    assert code == EXIT_OK and path.exists()
    return path


class TestPipeline:
    def test_solve_then_estimate(self, capsys, model_file, tmp_path):
        series = tmp_path / "series.csv"
        code, _, _ = run(capsys, "solve", "--model", str(model_file),
                         "--rho", "0.5", "--log-scale", "--count", "30",
                         "--out", str(series))
        assert code == EXIT_OK
        text = series.read_text().splitlines()
        assert text[0] == CSV_HEADER and text[1] == "t,sign,log_abs_u"

        code, out, _ = run(capsys, "estimate", "--method", "lemma1_slope",
                           "--lambda1", "-1.4392288398906452",
                           "--in", str(series))
        assert code == EXIT_OK
        rho_hat = float(out.splitlines()[2].split(",")[0])
        assert rho_hat == pytest.approx(0.5, abs=0.01)

    def test_verify_exit_codes(self, capsys, model_file):
        code, out, _ = run(capsys, "verify", "--model", str(model_file),
                           "--rho", "0.5", "--nodes", "512", "--t-max", "1.0")
        assert code == EXIT_OK
        code, _, _ = run(capsys, "verify", "--model", str(model_file),
                         "--rho", "0.5", "--nodes", "512", "--t-max", "1.0",
                         "--tol", "1e-15")
        assert code == EXIT_FAILURE

    def test_experiment_subcommand(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "cylinder": {"Px": 4, "Py": 4, "J": 4},
            "rho_true": [0.5],
            "points": [[0.3, 0.3, 0.3]],
            "time_grid": {"t_min": 1, "t_max": 50, "count": 20},
            "methods": ["lemma1_slope"],
            "output_dir": str(tmp_path / "out"),
        }))
        code, _, err = run(capsys, "experiment", "--config", str(cfg))
        assert code == EXIT_OK
        assert (tmp_path / "out" / "results.csv").exists()


class TestUsage:
    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == EXIT_USAGE

    def test_missing_required(self, capsys):
        assert run(capsys, "ml", "--rho", "1")[0] == EXIT_USAGE

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "estimate", "--method", "lemma1_slope",
                           "--lambda1", "-2", "--in", "nope.csv")
        assert code == EXIT_USAGE
