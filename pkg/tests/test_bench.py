"""Benchmark harness tests."""

import filecmp

import pytest

from batchband.bench import REFERENCE_RESULTS, parse_manifest, run_bench
from batchband.cli import main
from batchband.errors import ConfigError


class TestManifest:
    def test_parse_fields(self, tmp_path):
        m = tmp_path / "m.csv"
        m.write_text("# comment\niris,iris.csv,-1\nmonks,monks.train,0,monks.test\n\n")
        entries = parse_manifest(m)
        assert len(entries) == 2
        assert entries[0].name == "iris"
        assert entries[0].train_path == tmp_path / "iris.csv"
        assert entries[0].label_column == -1
        assert entries[0].test_path is None
        assert entries[1].test_path == tmp_path / "monks.test"

    def test_bad_field_count(self, tmp_path):
        m = tmp_path / "m.csv"
        m.write_text("iris,iris.csv\n")
        with pytest.raises(ConfigError, match="line 1"):
            parse_manifest(m)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_manifest(tmp_path / "none.csv")


class TestRunBench:
    def test_missing_dataset_skipped_with_warning(self, tmp_path):
        m = tmp_path / "m.csv"
        m.write_text("ghost,ghost.csv,-1\n")
        warnings = []
        rows = run_bench(parse_manifest(m), warn=warnings.append)
        assert len(rows) == 2  # both modes reported as skipped
        assert all(r.report is None for r in rows)
        assert len(warnings) == 2

    def test_iris_runs_both_modes(self, tmp_path, dataset_paths):
        paths = dataset_paths("iris")
        if paths is None:
            pytest.skip("iris unavailable")
        m = tmp_path / "m.csv"
        m.write_text(f"iris,{paths[0]},-1\n")
        rows = run_bench(parse_manifest(m))
        assert [r.mode for r in rows] == ["branch", "bands"]
        assert all(r.report is not None and r.report.total == 150 for r in rows)
        assert rows[0].reference == REFERENCE_RESULTS[("iris", "branch")]


class TestBenchCli:
    def test_empty_manifest_succeeds(self, tmp_path, capsys):
        m = tmp_path / "m.csv"
        m.write_text("# nothing here\n")
        assert main(["bench", str(m), "--no-timing"]) == 0
        out = capsys.readouterr().out
        assert "dataset" in out  # header only

    def test_outputs_and_determinism(self, tmp_path, dataset_paths, capsys):
        paths = dataset_paths("iris")
        if paths is None:
            pytest.skip("iris unavailable")
        m = tmp_path / "m.csv"
        m.write_text(f"iris,{paths[0]},-1\n")
        out1, out2 = tmp_path / "run1", tmp_path / "run2"
        for out in (out1, out2):
            assert main([
                "bench", str(m), "--out-dir", str(out), "--scheme", "spread", "--no-timing",
            ]) == 0
        capsys.readouterr()
        for rel in (
            "results.tsv",
            "models/iris-branch.model",
            "models/iris-bands.model",
            "reports/iris-branch.kv",
            "reports/iris-bands.kv",
        ):
            assert (out1 / rel).exists()
            assert filecmp.cmp(out1 / rel, out2 / rel, shallow=False), rel
        assert (out1 / "accuracy.png").stat().st_size > 0

    def test_results_include_reference_columns(self, tmp_path, dataset_paths, capsys):
        paths = dataset_paths("iris")
        if paths is None:
            pytest.skip("iris unavailable")
        m = tmp_path / "m.csv"
        m.write_text(f"iris,{paths[0]},-1\n")
        assert main(["bench", str(m), "--no-timing"]) == 0
        out = capsys.readouterr().out
        assert "150 from 150" in out  # reference column
        assert "ref" in out
