"""Tests for the command line interface."""

import json

import numpy as np
import pytest

from layerwave.cli import main
from layerwave.harness import read_csv_columns, read_field_csv

from test_harness import tiny_config_dict


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(tiny_config_dict()))
    return path


@pytest.fixture()
def medium_path(tmp_path):
    path = tmp_path / "medium.json"
    path.write_text(json.dumps({"kind": "piecewise", "K_A": 0.625, "K_B": 2.5,
                                "rho_A": 1.6, "rho_B": 0.4}))
    return path


class TestCoeffsVerb:
    def test_full_table(self, medium_path, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["coeffs", "--config", str(medium_path), "--out", str(out)]) == 0
        cols = read_csv_columns(out)
        assert len(cols["name"]) == 4 + 17
        assert cols["name"][:4] == ["K_m", "K_h", "rho_m", "rho_h"]

    def test_order_filter(self, medium_path, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["coeffs", "--config", str(medium_path), "--order", "2",
                     "--out", str(out)]) == 0
        cols = read_csv_columns(out)
        assert cols["name"][4:] == ["alpha1", "alpha2", "beta1", "beta2",
                                    "gamma1", "gamma2"]

    def test_accepts_full_run_config(self, config_path, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["coeffs", "--config", str(config_path), "--out", str(out)]) == 0
        cols = read_csv_columns(out)
        # Homogeneous unit medium: all correction coefficients vanish.
        np.testing.assert_allclose(cols["value"][4:], 0.0, atol=1e-12)

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["coeffs", "--config", str(tmp_path / "nope.json")]) == 1
        assert "error:" in capsys.readouterr().err


class TestDispersionVerb:
    def test_surface(self, medium_path, tmp_path):
        out = tmp_path / "surface.csv"
        assert main(["dispersion", "--config", str(medium_path), "--order", "4",
                     "--out", str(out)]) == 0
        cols = read_csv_columns(out)
        assert list(cols) == ["theta", "k", "omega2", "phase_speed", "valid"]
        assert np.max(cols["k"]) == pytest.approx(2 * np.pi)

    def test_polar(self, medium_path, tmp_path):
        out = tmp_path / "polar.csv"
        assert main(["dispersion", "--config", str(medium_path), "--polar",
                     "--out", str(out)]) == 0
        cols = read_csv_columns(out)
        assert list(cols) == ["theta", "c"]
        # Constant-impedance layering is anisotropic in speed.
        assert np.max(cols["c"]) > np.min(cols["c"]) + 0.1


class TestSolverVerbs:
    def test_eff_writes_snapshots(self, config_path, tmp_path):
        out = tmp_path / "eff"
        assert main(["eff", "--config", str(config_path), "--order", "2",
                     "--out", str(out)]) == 0
        index = read_csv_columns(out / "index.csv")
        np.testing.assert_allclose(index["t"], [0.0, 0.125, 0.25], atol=1e-12)

    def test_eff_order6_needs_1d_grid(self, config_path, capsys):
        assert main(["eff", "--config", str(config_path), "--order", "6"]) == 1
        assert "order 6" in capsys.readouterr().err

    def test_fv_slice_flag(self, config_path, tmp_path):
        out = tmp_path / "fv"
        assert main(["fv", "--config", str(config_path), "--slice", "x=0",
                     "--out", str(out)]) == 0
        # y=0 trace: coordinate is x through the bump center.
        assert (out / "slices" / "snap_0000_y-center.csv").is_file()
        x, y, p = read_field_csv(out / "snap_0002_p.csv")
        assert p.shape == (16, 8)

    def test_fv_requires_fv_block(self, tmp_path, capsys):
        d = tiny_config_dict()
        del d["fv"]
        path = tmp_path / "no_fv.json"
        path.write_text(json.dumps(d))
        assert main(["fv", "--config", str(path)]) == 1
        assert "fv block" in capsys.readouterr().err


class TestExperimentVerb:
    def test_runs_doc_from_file(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LAYERWAVE_OUT", str(tmp_path / "root"))
        doc = {"name": "cli-doc", "runs": {"only": tiny_config_dict()}}
        path = tmp_path / "doc.json"
        path.write_text(json.dumps(doc))
        assert main(["experiment", "--config", str(path)]) == 0
        assert (tmp_path / "root" / "cli-doc" / "only" / "manifest.json").is_file()

    def test_canned_with_overrides(self, tmp_path):
        out = tmp_path / "polar"
        assert main(["experiment", "polar-speed", "--out", str(out),
                     "--set", "name=polar-tiny"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["experiment"] == "polar-tiny"
        assert (out / "polar.csv").is_file()

    def test_unknown_canned_name(self, capsys):
        assert main(["experiment", "mystery"]) == 1
        assert "unknown experiment" in capsys.readouterr().err

    def test_name_and_config_conflict(self, config_path, capsys):
        assert main(["experiment", "quadrants", "--config", str(config_path)]) == 1
        assert "exactly one" in capsys.readouterr().err


class TestCompareVerb:
    def test_recomputes_from_artifacts(self, config_path, tmp_path, capsys):
        run_dir = tmp_path / "run"
        assert main(["experiment", "--config", str(config_path),
                     "--out", str(run_dir)]) == 0
        table = tmp_path / "cmp.csv"
        assert main(["compare", "--artifacts", str(run_dir / "run"),
                     "--out", str(table)]) == 0
        screen = capsys.readouterr().out
        assert "monotone: yes" in screen
        cols = read_csv_columns(table)
        np.testing.assert_array_equal(cols["order"], [0.0, 2.0])
        # Matches the comparison the harness wrote during the run.
        harness_cols = read_csv_columns(run_dir / "run" / "comparison.csv")
        np.testing.assert_allclose(cols["rel_l2"], harness_cols["rel_l2"],
                                   rtol=1e-12)

    def test_rejects_non_run_directory(self, tmp_path, capsys):
        assert main(["compare", "--artifacts", str(tmp_path)]) == 1
        assert "manifest.json" in capsys.readouterr().err
