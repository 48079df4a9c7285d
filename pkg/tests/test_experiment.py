"""Experiment harness tests: config validation, CSV output, determinism,
exit-code contract, and the degenerate-h sweep."""

import json
import math
import os

import numpy as np
import pytest

from fracorder.experiment import (
    CSV_HEADER,
    ExperimentConfig,
    PhiSpec,
    TimeGrid,
    config_from_dict,
    fmt_float,
    run_experiment,
)


class TestConfig:
    def test_rho_range(self):
        with pytest.raises(ValueError):
            ExperimentConfig(rho_true=(1.5,))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            ExperimentConfig(methods=("spline_fit",))

    def test_phi_validation(self):
        with pytest.raises(ValueError):
            PhiSpec(name="bessel")
        with pytest.raises(ValueError):
            PhiSpec(name="gaussian-bump", amplitude=-1.0)

    def test_time_grid_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(t_min=-1.0)
        with pytest.raises(ValueError):
            TimeGrid(count=4)
        with pytest.raises(ValueError):
            TimeGrid(spacing="cubic")

    def test_from_dict(self):
        d = {
            "cylinder": {"H": 1.0, "h": 1.0, "Px": 4, "Py": 4, "J": 4},
            "rho_true": [0.5],
            "phi": {"name": "gaussian-bump", "center": [0.4, 0.5, 0.6], "width": 0.3},
            "time_grid": {"t_min": 1, "t_max": 50, "count": 20, "spacing": "log"},
            "noise": {"levels": [0.0, 0.01], "seeds": [0, 1]},
            "methods": ["lemma1_slope"],
        }
        cfg = config_from_dict(d)
        assert cfg.noise_levels == (0.0, 0.01)
        assert cfg.phi.center == (0.4, 0.5, 0.6)


class TestFloatFormat:
    def test_plain_range_uses_repr(self):
        assert fmt_float(0.5) == "0.5"
        assert fmt_float(1.4392288398906452) == "1.4392288398906452"

    def test_extremes_use_scientific(self):
        assert "e" in fmt_float(1e-9)
        assert "e" in fmt_float(3.2e12)

    def test_round_trips(self):
        for x in (0.1, -1.4392288398906452, 2.5e-13, 7.1e9, 0.0):
            assert float(fmt_float(x)) == x


@pytest.fixture(scope="module")
def outcome(tmp_path_factory):
    out = tmp_path_factory.mktemp("exp")
    cfg = ExperimentConfig(
        rho_true=(0.5,),
        points=((0.3, 0.3, 0.3),),
        noise_levels=(0.0, 0.01),
        seeds=(0, 1),
        time_grid=TimeGrid(count=40),
        output_dir=str(out),
    )
    code = run_experiment(cfg)
    return cfg, code, out


class TestRun:
    def test_exit_code_clean(self, outcome):
        _, code, _ = outcome
        assert code == 0

    def test_results_csv_schema(self, outcome):
        _, _, out = outcome
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert lines[1].startswith("rho_true,method,")
        # 1 rho x 1 point x (1 clean + 2 noisy runs) x 2 methods
        assert len(lines) == 2 + 1 * 1 * 3 * 2

    def test_sequences_written(self, outcome):
        _, _, out = outcome
        seqs = [p for p in os.listdir(out) if p.startswith("seq_")]
        assert len(seqs) == 6

    def test_deterministic_rerun(self, outcome, tmp_path):
        cfg, _, out = outcome
        from dataclasses import replace

        cfg2 = replace(cfg, output_dir=str(tmp_path))
        run_experiment(cfg2)
        assert (out / "results.csv").read_text() == (tmp_path / "results.csv").read_text()


class TestExitCodeContract:
    def test_impossible_tolerance_flips_code(self, tmp_path):
        cfg = ExperimentConfig(
            rho_true=(0.5,),
            points=((0.3, 0.3, 0.3),),
            time_grid=TimeGrid(count=20),
            tolerances={"lemma1_slope": 1e-15},
            methods=("lemma1_slope",),
            output_dir=str(tmp_path),
        )
        assert run_experiment(cfg) == 1


class TestDegenerateH:
    def test_unit_lambda1_rejected_by_estimators(self, tmp_path):
        # h = tanh(1) makes s0 = 1, nu0 = -1: the growth condition fails
        from fracorder.cylinder import CylinderConfig, sturm_negative_eig

        h = math.tanh(1.0)
        e = sturm_negative_eig(1.0, h)
        assert e.nu == pytest.approx(-1.0, abs=1e-12)
        cfg = ExperimentConfig(
            cylinder=CylinderConfig(h=h, Px=3, Py=3, J=3),
            rho_true=(0.5,),
            points=((0.3, 0.3, 0.3),),
            time_grid=TimeGrid(count=20),
            output_dir=str(tmp_path),
        )
        code = run_experiment(cfg)
        assert code == 1
        rows = (tmp_path / "results.csv").read_text().splitlines()[2:]
        assert all("Assumption6Violated" in r for r in rows)


class TestEigenfunctionPhi:
    def test_single_mode_model(self, tmp_path):
        cfg = ExperimentConfig(
            rho_true=(0.5,),
            phi=PhiSpec(name="first-eigenfunction"),
            points=((0.5, 0.5, 0.5),),
            time_grid=TimeGrid(count=20),
            output_dir=str(tmp_path),
        )
        assert run_experiment(cfg) == 0
        lines = (tmp_path / "results.csv").read_text().splitlines()
        slope_row = [l for l in lines if "lemma1_slope" in l][0]
        rho_hat = float(slope_row.split(",")[5])
        assert abs(rho_hat - 0.5) < 1e-6
