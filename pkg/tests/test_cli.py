import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from stablepaths import cli, inducing, maps
from stablepaths.cadlag import StepPath

DATA = Path(__file__).parent / "data"


def base_config(**overrides):
    cfg = {
        "map": {"gamma": 0.6},
        "observable": {"family": "power", "params": [1.0, -0.9, 0.8]},
        "calibration": {
            "centering": {"mode": "fixed", "offset": 0.6315},
            "density_estimate": {"orbit_length": 200_000, "bins": 64, "burn_in": 2000},
        },
        "seed": 424242,
        "suites": [
            {
                "name": "lap_sllns",
                "k_grid": [500, 5000],
                "trials": 7,
                "kac_members": 100,
                "kac_per_member": 100,
                "kac_discard": 10,
            }
        ],
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg), encoding="utf-8")
    return str(p)


class TestSchema:
    def test_unknown_key_is_named(self, tmp_path, capsys):
        cfg = base_config()
        cfg["map"] = {"gamm": 0.6}
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "gamm" in capsys.readouterr().err

    def test_unknown_nested_suite_key(self, tmp_path, capsys):
        cfg = base_config()
        cfg["suites"][0]["kgrid"] = [10]
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "kgrid" in err and "$.suites[0]" in err

    def test_missing_required(self, tmp_path, capsys):
        cfg = base_config()
        del cfg["seed"]
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "seed" in capsys.readouterr().err

    def test_wrong_type(self, tmp_path, capsys):
        cfg = base_config(seed="not-a-seed")
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_invalid_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json", encoding="utf-8")
        rc = cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_unknown_suite_name(self, tmp_path, capsys):
        cfg = base_config()
        cfg["suites"][0]["name"] = "frobnicate"
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_density_entries_validated(self, tmp_path, capsys):
        cfg = base_config()
        cfg["suites"] = [{
            "name": "wip_marginal",
            "n_grid": [10, 20],
            "ensembles": 10,
            "densities": [{"family": "uniform"}, {"family": "cauchy"}],
        }]
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "family" in capsys.readouterr().err


class TestRun:
    def test_smoke_and_artifacts(self, tmp_path):
        cfg = base_config()
        out = tmp_path / "out"
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] is True
        assert report["tool"]["name"] == "stablepaths"
        assert report["resolved"]["seed"] == 424242
        curve = (out / "00_lap_sllns_curve.csv").read_text().splitlines()
        assert curve[0] == "k,sup_error_median"
        assert len(curve) == 3

    def test_report_byte_identical_across_reruns(self, tmp_path):
        cfg = base_config()
        p = write_config(tmp_path, cfg)
        cli.main(["run", "--config", p, "--out", str(tmp_path / "a")])
        cli.main(["run", "--config", p, "--out", str(tmp_path / "b")])
        a = (tmp_path / "a" / "report.json").read_bytes()
        b = (tmp_path / "b" / "report.json").read_bytes()
        assert a == b

    def test_seed_override_changes_report(self, tmp_path):
        cfg = base_config()
        p = write_config(tmp_path, cfg)
        cli.main(["run", "--config", p, "--out", str(tmp_path / "a")])
        cli.main(["run", "--config", p, "--out", str(tmp_path / "b"), "--seed", "7"])
        ra = json.loads((tmp_path / "a" / "report.json").read_text())
        rb = json.loads((tmp_path / "b" / "report.json").read_text())
        assert ra["resolved"]["seed"] == 424242
        assert rb["resolved"]["seed"] == 7
        assert ra["suites"][0]["metadata"] != rb["suites"][0]["metadata"]

    def test_svg_wellformed_and_no_plot_flag(self, tmp_path):
        cfg = base_config()
        p = write_config(tmp_path, cfg)
        cli.main(["run", "--config", p, "--out", str(tmp_path / "a")])
        ET.parse(tmp_path / "a" / "00_lap_sllns.svg")
        cli.main(["run", "--config", p, "--out", str(tmp_path / "b"), "--no-plot"])
        assert not (tmp_path / "b" / "00_lap_sllns.svg").exists()

    def test_failing_metric_gives_exit_one(self, tmp_path):
        cfg = base_config()
        cfg["suites"][0]["kac_threshold"] = 1e-9  # unattainably tight
        rc = cli.main(["run", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")])
        assert rc == 1

    def test_console_entry_point(self, tmp_path):
        cfg = base_config()
        p = write_config(tmp_path, cfg)
        r = subprocess.run(
            [sys.executable, "-m", "stablepaths.cli", "run", "--config", p,
             "--out", str(tmp_path / "o")],
            capture_output=True, text=True,
        )
        assert r.returncode == 0
        assert "[PASS] lap_sllns" in r.stdout


class TestPathsDemo:
    def test_artifacts(self, tmp_path, spec06):
        cfg = base_config()
        cfg["demo"] = {"n": 200, "T": 1.0}
        out = tmp_path / "demo"
        rc = cli.main(["paths-demo", "--config", write_config(tmp_path, cfg), "--out", str(out)])
        assert rc == 0
        w = StepPath.from_csv((out / "w_n.csv").read_text())
        u = StepPath.from_csv((out / "u_n.csv").read_text())
        p = StepPath.from_csv((out / "p_n.csv").read_text())
        levy = StepPath.from_csv((out / "levy_path.csv").read_text())
        # breakpoints only on the 1/n grid
        for t in w.breakpoints:
            assert t * 200 == pytest.approx(round(t * 200), abs=1e-9)
        # U_n constant between consecutive return times
        assert set(u.breakpoints).issubset(set(w.breakpoints) | {1.0})
        assert levy.evaluate(0.0) == 0.0
        ET.parse(out / "paths.svg")

    def test_u_constant_between_returns(self, tmp_path, spec06):
        cfg = base_config(seed=99)
        cfg["demo"] = {"n": 100, "T": 1.0}
        out = tmp_path / "demo"
        cli.main(["paths-demo", "--config", write_config(tmp_path, cfg), "--out", str(out)])
        u = StepPath.from_csv((out / "u_n.csv").read_text())
        from stablepaths.rng import derive

        ys = inducing.sample_y_mu_like(spec06, maps.DensitySpec("uniform"), derive(99, 2000), 1)
        trace = inducing.lap_numbers(spec06, float(ys[0]), 100)
        grid_returns = {float(r) / 100 for r in trace.return_sums[1:]}
        assert set(float(t) for t in u.breakpoints).issubset(grid_returns)


class TestMetricTool:
    def test_identical_files(self, tmp_path, capsys):
        rc = cli.main([
            "metric",
            str(DATA / "discriminator_unit_jump.csv"),
            str(DATA / "discriminator_unit_jump.csv"),
            "--metric", "J1",
        ])
        assert rc == 0
        res = json.loads(capsys.readouterr().out)
        assert res["lower"] == 0.0 and res["upper"] == 0.0

    def test_discriminator_golden_pair(self, capsys):
        rc = cli.main([
            "metric",
            str(DATA / "discriminator_unit_jump.csv"),
            str(DATA / "discriminator_two_half_jumps.csv"),
            "--metric", "M1", "--tol", "1e-6",
        ])
        assert rc == 0
        m1 = json.loads(capsys.readouterr().out)
        assert m1["upper"] <= 0.02
        rc = cli.main([
            "metric",
            str(DATA / "discriminator_unit_jump.csv"),
            str(DATA / "discriminator_two_half_jumps.csv"),
            "--metric", "J1", "--tol", "1e-6",
        ])
        assert rc == 0
        j1 = json.loads(capsys.readouterr().out)
        assert j1["lower"] >= 0.45

    def test_domain_mismatch_exit_2(self, tmp_path, capsys):
        other = tmp_path / "other.csv"
        other.write_text("2,0\n0.5,1\n", encoding="utf-8")
        rc = cli.main([
            "metric", str(DATA / "discriminator_unit_jump.csv"), str(other),
        ])
        assert rc == 2

    def test_parse_failure_exit_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,a\npath,q\n", encoding="utf-8")
        rc = cli.main(["metric", str(DATA / "discriminator_unit_jump.csv"), str(bad)])
        assert rc == 2
