"""Command-line surface: subcommands, exit codes, CSV outputs, config parsing."""

import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from pcselect.bench import CampaignConfig
from pcselect.cli import main, parse_campaign_config, read_records_csv
from pcselect.crossval import Method
from pcselect.errors import ConfigError, DataError
from pcselect.matrixio import MatrixFile, write_matrix


def _run(*argv):
    return main(list(argv))


def _simulate(tmp_path, name="data.csv", **extra):
    path = tmp_path / name
    argv = ["simulate", "--type", "1", "--noise", "1", "--rep", "1",
            "--seed", "42", "--output", str(path)]
    for flag, value in extra.items():
        argv += [f"--{flag.replace('_', '-')}", str(value)]
    assert _run(*argv) == 0
    return path


class TestSimulate:
    def test_same_seed_twice_identical_files(self, tmp_path):
        a = _simulate(tmp_path, "a.csv")
        b = _simulate(tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_differs(self, tmp_path):
        a = _simulate(tmp_path, "a.csv")
        c = tmp_path / "c.csv"
        assert _run("simulate", "--type", "1", "--noise", "1", "--seed", "43",
                    "--output", str(c)) == 0
        assert a.read_bytes() != c.read_bytes()

    def test_stdout_when_no_output_flag(self, tmp_path, capsys):
        path = _simulate(tmp_path)
        assert _run("simulate", "--type", "1", "--noise", "1", "--rep", "1",
                    "--seed", "42") == 0
        assert capsys.readouterr().out == path.read_text()

    def test_shape_follows_flags(self, tmp_path):
        path = _simulate(tmp_path, n_samples=48)
        rows = path.read_text().strip().split("\n")
        assert len(rows) == 48
        assert all(len(r.split(",")) == 10 for r in rows)

    def test_bad_type_is_data_error(self, capsys):
        assert _run("simulate", "--type", "9", "--noise", "1") == 2
        assert "error" in capsys.readouterr().err


class TestCv:
    def test_rkf_curve_has_nine_rows(self, tmp_path):
        data = _simulate(tmp_path)
        out = tmp_path / "curve.csv"
        assert _run("cv", str(data), "--method", "ppca-rkf-ign",
                    "--seed", "5", "--no-center", "--output", str(out)) == 0
        rows = list(csv.DictReader(out.open()))
        assert [int(r["k"]) for r in rows] == list(range(1, 10))
        marks = [int(r["selected"]) for r in rows]
        assert sum(marks) == 1
        values = [float(r["criterion"]) for r in rows]
        assert marks.index(1) == int(np.argmin(values))

    def test_same_seed_twice_identical_bytes(self, tmp_path):
        data = _simulate(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert _run("cv", str(data), "--method", "pca-ekf-ctri",
                        "--seed", "11", "--folds", "8", "--no-center",
                        "--output", str(out)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_latin_plan_flag(self, tmp_path):
        data = _simulate(tmp_path)
        out = tmp_path / "curve.csv"
        assert _run("cv", str(data), "--method", "ppca-rkf-ign", "--seed", "2",
                    "--plan", "latin:16x4", "--no-center", "--output", str(out)) == 0
        assert len(list(csv.DictReader(out.open()))) == 9

    def test_latin_plan_row_mismatch_is_data_error(self, tmp_path):
        data = _simulate(tmp_path)
        assert _run("cv", str(data), "--method", "ppca-rkf-ign",
                    "--plan", "latin:4x4") == 2

    def test_header_flag_for_numeric_labels(self, tmp_path):
        rng = np.random.default_rng(60)
        path = tmp_path / "labeled.csv"
        labels = tuple(repr(float(x)) for x in np.linspace(400.0, 445.0, 10))
        write_matrix(MatrixFile(values=rng.normal(size=(36, 10)), header=labels), path)
        out = tmp_path / "curve.csv"
        assert _run("cv", str(path), "--method", "pca-ekf-ctri", "--folds", "4",
                    "--seed", "1", "--header", "--output", str(out)) == 0
        assert len(list(csv.DictReader(out.open()))) == 9

    def test_model_failure_is_data_error(self, tmp_path, capsys):
        rng = np.random.default_rng(61)
        low_rank = rng.normal(size=(20, 2)) @ rng.normal(size=(2, 5))
        path = tmp_path / "rank2.csv"
        write_matrix(MatrixFile(values=low_rank), path)
        assert _run("cv", str(path), "--method", "ppca-rkf-ign", "--folds", "2") == 2
        assert "error" in capsys.readouterr().err


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self, capsys):
        assert _run("simulate", "--type", "1", "--noise", "1", "--frobnicate") == 1
        assert capsys.readouterr().err

    def test_unknown_command_is_usage_error(self):
        assert _run("frobnicate") == 1

    def test_bad_method_choice_is_usage_error(self, tmp_path):
        data = _simulate(tmp_path)
        assert _run("cv", str(data), "--method", "pca") == 1

    def test_bad_plan_spec_is_usage_error(self, tmp_path):
        data = _simulate(tmp_path)
        assert _run("cv", str(data), "--method", "ppca-rkf-ign",
                    "--plan", "sudoku") == 1

    def test_missing_matrix_is_data_error(self, tmp_path):
        assert _run("cv", str(tmp_path / "absent.csv"),
                    "--method", "ppca-rkf-ign") == 2

    def test_missing_config_is_data_error(self, tmp_path):
        assert _run("bench", "--config", str(tmp_path / "absent.cfg")) == 2

    def test_help_exits_zero(self, capsys):
        assert _run("--help") == 0
        assert "simulate" in capsys.readouterr().out

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "pcselect", "--help"], capture_output=True
        )
        assert proc.returncode == 0
        assert b"simulate" in proc.stdout


class TestCampaignConfig:
    def test_full_round_trip(self):
        text = (
            "# campaign\n"
            "types = 1,2\n"
            "noise_levels = 1,3\n\n"
            "reps = 5\n"
            "methods = pca-ekf-ctri, ppca-rkf-ign\n"
            "folds = 8\n"
            "seed = 99\n"
        )
        config = parse_campaign_config(text)
        assert config.set_types == (1, 2)
        assert config.noise_levels == (1, 3)
        assert config.n_repetitions == 5
        assert config.methods == (Method.PCA_EKF_CTRI, Method.PPCA_RKF_IGN)
        assert config.n_folds == 8
        assert config.seed == 99

    def test_defaults_when_file_is_sparse(self):
        config = parse_campaign_config("reps = 2\n")
        assert config.n_repetitions == 2
        assert config.set_types == CampaignConfig().set_types
        assert config.n_folds == CampaignConfig().n_folds

    def test_cli_seed_overrides_file(self):
        config = parse_campaign_config("seed = 1\n", seed=7)
        assert config.seed == 7

    @pytest.mark.parametrize(
        "text",
        [
            "workers = 4\n",
            "types = 1\ntypes = 2\n",
            "types: 1\n",
            "reps = many\n",
            "methods = pca\n",
        ],
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_campaign_config(text)


_RECORDS_TEXT = (
    "set_type,noise_level,repetition,method,selected_k,runtime_seconds,error\n"
    "1,1,1,pca-ekf-ctri,4,0.5,\n"
    "1,1,2,pca-ekf-ctri,4,0.7,\n"
    "1,1,3,pca-ekf-ctri,6,0.6,\n"
    "1,2,1,ppca-rkf-ign,4,0.1,\n"
    "1,2,2,ppca-rkf-ign,,0.2,model failure\n"
)


class TestReport:
    def _report(self, tmp_path):
        records = tmp_path / "records.csv"
        records.write_text(_RECORDS_TEXT)
        assert _run("report", str(records), "--output", str(tmp_path / "rep")) == 0
        return {
            name: list(csv.DictReader((tmp_path / f"rep_{name}.csv").open()))
            for name in ("accuracy", "histogram", "runtime")
        }

    def test_accuracy_matches_independent_aggregation(self, tmp_path):
        tables = self._report(tmp_path)
        raw = list(csv.DictReader(io.StringIO(_RECORDS_TEXT)))
        for row in tables["accuracy"]:
            cell = (row["set_type"], row["noise_level"], row["method"])
            hits = [r["selected_k"] == "4" for r in raw
                    if (r["set_type"], r["noise_level"], r["method"]) == cell]
            assert float(row["accuracy"]) == sum(hits) / len(hits)

    def test_expected_cells(self, tmp_path):
        tables = self._report(tmp_path)
        acc = {(r["set_type"], r["noise_level"], r["method"]): float(r["accuracy"])
               for r in tables["accuracy"]}
        assert acc == {("1", "1", "pca-ekf-ctri"): 2 / 3,
                       ("1", "2", "ppca-rkf-ign"): 0.5}

    def test_histogram_counts_successes_only(self, tmp_path):
        tables = self._report(tmp_path)
        hist = {(r["set_type"], r["noise_level"], r["method"], r["k"]): int(r["count"])
                for r in tables["histogram"]}
        assert hist == {("1", "1", "pca-ekf-ctri", "4"): 2,
                        ("1", "1", "pca-ekf-ctri", "6"): 1,
                        ("1", "2", "ppca-rkf-ign", "4"): 1}

    def test_runtime_means(self, tmp_path):
        tables = self._report(tmp_path)
        runtime = {(r["set_type"], r["noise_level"], r["method"]):
                   float(r["mean_runtime_seconds"]) for r in tables["runtime"]}
        np.testing.assert_allclose(runtime[("1", "1", "pca-ekf-ctri")], 0.6)
        np.testing.assert_allclose(runtime[("1", "2", "ppca-rkf-ign")], 0.15)

    def test_read_records_round_trip(self, tmp_path):
        records = tmp_path / "records.csv"
        records.write_text(_RECORDS_TEXT)
        loaded = read_records_csv(records)
        assert len(loaded) == 5
        assert loaded[0].method is Method.PCA_EKF_CTRI
        assert loaded[4].selected_k is None
        assert loaded[4].error == "model failure"

    def test_rejects_empty_records(self, tmp_path):
        records = tmp_path / "records.csv"
        records.write_text(_RECORDS_TEXT.split("\n")[0] + "\n")
        with pytest.raises(DataError):
            read_records_csv(records)

    def test_rejects_mangled_row(self, tmp_path):
        records = tmp_path / "records.csv"
        records.write_text(_RECORDS_TEXT + "1,1,4,pca-ekf-ctri,four,0.5,\n")
        with pytest.raises(DataError, match="line 7"):
            read_records_csv(records)


@pytest.fixture(scope="module")
def outputs(tmp_path_factory):
    """Two identical tiny campaigns, for determinism and format checks."""
    tmp_path = tmp_path_factory.mktemp("bench")
    config = tmp_path / "tiny.cfg"
    config.write_text("types = 1\nnoise_levels = 1\nreps = 2\nfolds = 4\nseed = 7\n")
    paths = {}
    for tag in ("first", "second"):
        records = tmp_path / f"{tag}.csv"
        assert _run("bench", "--config", str(config),
                    "--output", str(records)) == 0
        paths[tag] = records
    return paths


class TestBench:
    def test_records_columns_and_cardinality(self, outputs):
        rows = list(csv.DictReader(outputs["first"].open()))
        assert len(rows) == 2 * 3
        assert set(rows[0]) == {"set_type", "noise_level", "repetition", "method",
                                "selected_k", "runtime_seconds", "error"}

    def test_summary_written_alongside(self, outputs):
        summary = outputs["first"].with_name("first_summary.csv")
        rows = list(csv.DictReader(summary.open()))
        assert len(rows) == 3
        assert all(float(r["accuracy"]) == 1.0 for r in rows)
        assert all(int(r["n_records"]) == 2 for r in rows)

    def test_deterministic_except_runtime(self, outputs):
        def strip_runtime(path):
            rows = list(csv.DictReader(path.open()))
            for row in rows:
                row.pop("runtime_seconds")
            return rows

        assert strip_runtime(outputs["first"]) == strip_runtime(outputs["second"])

    def test_records_survive_reload(self, outputs):
        loaded = read_records_csv(outputs["first"])
        assert [r.selected_k for r in loaded] == [4] * 6
        assert {r.method for r in loaded} == set(Method)
