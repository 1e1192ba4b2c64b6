"""End-to-end CLI contracts, including the exit-code table."""

import json

import numpy as np
import pytest

from simplexflow import load_csv, load_model, save_model
from simplexflow.cli import main

from helpers import identity_hidden_spec, random_spec


def run(*argv) -> int:
    return main(list(argv))


@pytest.fixture()
def blob_csv(tmp_path):
    path = tmp_path / "blobs.csv"
    assert run("gen", "blobs", "--per-class", "20", "--classes", "3",
               "--seed", "7", "-o", str(path)) == 0
    return path


@pytest.fixture()
def small_model(tmp_path):
    path = tmp_path / "model.json"
    save_model(random_spec(50, 2, 3, 3, tau=0.5, n_steps=10), path)
    return path


class TestGen:
    def test_blobs_summary_and_file(self, blob_csv, capsys):
        ds = load_csv(blob_csv)
        assert (ds.n_points, ds.input_dim, ds.n_labels) == (60, 2, 3)

    def test_rings(self, tmp_path):
        path = tmp_path / "rings.csv"
        assert run("gen", "rings", "--n", "50", "--seed", "1", "-o", str(path)) == 0
        ds = load_csv(path)
        assert (ds.n_points, ds.n_labels) == (50, 2)

    def test_missing_output_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            run("gen", "blobs", "--per-class", "5")
        assert err.value.code == 2

    def test_deterministic_across_runs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("gen", "arcs", "--n", "30", "--seed", "3", "-o", str(a))
        run("gen", "arcs", "--n", "30", "--seed", "3", "-o", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestTrain:
    def test_writes_model_and_history(self, blob_csv, tmp_path):
        model = tmp_path / "m.json"
        history = tmp_path / "h.csv"
        code = run(
            "train", "--data", str(blob_csv), "-o", str(model),
            "--history", str(history), "--epochs", "3", "--batch-size", "20",
            "--seed", "1",
        )
        assert code == 0
        assert load_model(model).input_dim == 2
        lines = history.read_text().splitlines()
        assert lines[0] == "epoch,loss,train_error"
        assert len(lines) == 5  # header + epochs 0..3

    def test_same_seed_identical_model_files(self, blob_csv, tmp_path):
        m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
        args = ["train", "--data", str(blob_csv), "--epochs", "2",
                "--batch-size", "20", "--seed", "5"]
        assert run(*args, "-o", str(m1)) == 0
        assert run(*args, "-o", str(m2)) == 0
        assert m1.read_bytes() == m2.read_bytes()

    def test_config_file_with_unknown_key_rejected(self, blob_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"train": {"learning_rat": 0.1}}))
        model = tmp_path / "m.json"
        assert run("train", "--data", str(blob_csv), "-o", str(model),
                   "--config", str(cfg)) == 2

    def test_config_values_used_with_flag_override(self, blob_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "train": {"epochs": 2, "batch_size": 20, "seed": 9},
            "arch": {"state_dim": 4, "n_steps": 10},
        }))
        model = tmp_path / "m.json"
        history = tmp_path / "h.csv"
        assert run("train", "--data", str(blob_csv), "-o", str(model),
                   "--history", str(history), "--config", str(cfg),
                   "--epochs", "1") == 0
        spec = load_model(model)
        assert spec.state_dim == 4
        assert spec.n_steps == 10
        assert len(history.read_text().splitlines()) == 3  # override epochs=1


class TestVerify:
    def test_identity_hidden_model_passes(self, tmp_path, capsys):
        model = tmp_path / "frozen.json"
        save_model(identity_hidden_spec(), model)
        report = tmp_path / "report.json"
        code = run("verify", "--model", str(model), "--input", "0.4,-0.2",
                   "--step", "0.01", "--horizon", "2", "--report", str(report))
        assert code == 0
        doc = json.loads(report.read_text())
        assert doc["passed"] is True
        assert doc["sup_deviation"] <= 1e-14
        assert doc["method"] == "rk4"

    def test_random_model_within_default_tolerance(self, small_model, tmp_path):
        dev = tmp_path / "dev.csv"
        code = run("verify", "--model", str(small_model), "--input", "0.5,0.5",
                   "--step", "0.01", "--horizon", "5",
                   "--deviation-csv", str(dev))
        assert code == 0
        lines = dev.read_text().splitlines()
        assert lines[0] == "t,deviation"
        assert len(lines) == 502

    def test_unattainable_tolerance_exits_4(self, small_model):
        code = run("verify", "--model", str(small_model), "--input", "0.5,0.5",
                   "--step", "0.01", "--horizon", "2", "--tol", "1e-30")
        assert code == 4

    def test_missing_input_is_usage_error(self, small_model):
        assert run("verify", "--model", str(small_model)) == 2

    def test_report_includes_augmented_when_square(self, small_model, tmp_path):
        report = tmp_path / "r.json"
        assert run("verify", "--model", str(small_model), "--input", "0.1,0.9",
                   "--step", "0.01", "--horizon", "2",
                   "--report", str(report)) == 0
        doc = json.loads(report.read_text())
        assert doc["invertible_readout"] is True
        assert doc["augmented_sup_deviation"] <= 1e-5
        assert set(doc) >= {
            "grid", "method", "sup_deviation", "mean_deviation",
            "simplex_drift_max", "per_time_deviation_csv_path",
        }


class TestTrace:
    def test_writes_hidden_and_output_csv(self, small_model, tmp_path):
        prefix = tmp_path / "run"
        code = run("trace", "--model", str(small_model), "--input", "0.2,0.3",
                   "--step", "0.05", "--horizon", "1", "-o", str(prefix))
        assert code == 0
        hidden = (tmp_path / "run_hidden.csv").read_text().splitlines()
        output = (tmp_path / "run_output.csv").read_text().splitlines()
        assert len(hidden) == len(output) == 22  # header + 21 grid points

    def test_svg_for_three_labels(self, small_model, tmp_path):
        prefix = tmp_path / "run"
        svg = tmp_path / "plot.svg"
        code = run("trace", "--model", str(small_model), "--input", "0.2,0.3",
                   "--step", "0.05", "--horizon", "1", "-o", str(prefix),
                   "--svg", str(svg))
        assert code == 0
        assert "<polyline" in svg.read_text()

    def test_svg_rejected_for_two_labels(self, tmp_path):
        model = tmp_path / "m2.json"
        save_model(random_spec(51, 2, 2, 2, tau=0.5, n_steps=4), model)
        code = run("trace", "--model", str(model), "--input", "0.2,0.3",
                   "--step", "0.1", "--horizon", "1", "-o", str(tmp_path / "t"),
                   "--svg", str(tmp_path / "p.svg"))
        assert code == 2


class TestDemoGame:
    def test_rps_outputs(self, tmp_path):
        prefix = tmp_path / "rps"
        svg = tmp_path / "rps.svg"
        code = run("demo-game", "rps", "--p0", "0.5,0.25,0.25", "-T", "5",
                   "--step", "0.01", "-o", str(prefix), "--svg", str(svg))
        assert code == 0
        lines = (tmp_path / "rps_trajectory.csv").read_text().splitlines()
        assert len(lines) == 502
        assert svg.exists()

    def test_dominant_converges(self, tmp_path, capsys):
        prefix = tmp_path / "dom"
        code = run("demo-game", "dominant", "-T", "50", "--step", "0.01",
                   "-o", str(prefix))
        assert code == 0
        out = capsys.readouterr().out
        final = [float(v) for v in out.splitlines()[-1].split()[-1].split(",")]
        assert abs(final[0] - 1.0) <= 1e-2

    def test_off_simplex_start_is_usage_error(self, tmp_path):
        code = run("demo-game", "rps", "--p0", "0.5,0.5,0.5",
                   "-o", str(tmp_path / "x"))
        assert code == 2

    def test_unknown_game_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run("demo-game", "chicken", "-o", str(tmp_path / "x"))
        assert err.value.code == 2
