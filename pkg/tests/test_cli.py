import csv
import json
import random
import subprocess
import sys

import numpy as np
import pytest

from podeval.cli import main
from podeval.ensemble import write_manifest
from podeval.mhm import ProbabilityTrace, time_grid, write_traces_csv

import published_tables


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    err = capsys.readouterr().err
    return code, [json.loads(line) for line in err.splitlines() if line.strip()]


@pytest.fixture
def trace_csv(tmp_path, capsys):
    path = tmp_path / "traces.csv"
    code, _ = _run(capsys, "synth", "--model", "logit", "--axis", "cart", "--b0", 6, "--b1", 2,
                   "--seed", 0, "--jitter", 0.2, "--out", path)
    assert code == 0
    return path


class TestFit:
    def test_synth_round_trip(self, tmp_path, capsys):
        trials = tmp_path / "trials.csv"
        code, _ = _run(capsys, "synth", "--b0", 2, "--b1", 2, "--seed", 3, "--trials-per-point", 200,
                       "--points", 50, "--a-range", -3, 1, "--out", trials)
        assert code == 0
        out = tmp_path / "fit"
        code, _ = _run(capsys, "fit", "--input", trials, "--out", out)
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["a90"] == pytest.approx((np.log(9.0) - 2.0) / 2.0, abs=0.05)
        assert summary["a90_95"] > summary["a90"]
        assert {"model", "b0", "b1", "deviance"} <= set(summary)
        assert (out / "curve.csv").read_text().startswith("a,pod_mean,pod_lower95\n")
        assert (out / "pod.svg").read_text().startswith("<svg")

    def test_config_is_used(self, tmp_path, capsys):
        trials = tmp_path / "trials.csv"
        _run(capsys, "synth", "--b0", 2, "--b1", 2, "--seed", 3, "--trials-per-point", 20,
             "--points", 30, "--a-range", -3, 1, "--out", trials)
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("curve_points = 11\n")
        code, _ = _run(capsys, "fit", "--input", trials, "--config", cfg, "--out", tmp_path / "o")
        assert code == 0
        assert len((tmp_path / "o" / "curve.csv").read_text().splitlines()) == 12

    def test_malformed_row(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("a,hits,trials\n0,1,2\n1,2\n")
        code, errors = _run(capsys, "fit", "--input", path, "--out", tmp_path / "o")
        assert code == 2
        assert errors[0]["error"] == "parse" and "line 3" in errors[0]["message"]
        assert not (tmp_path / "o").exists()

    def test_empty_file(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text("")
        code, errors = _run(capsys, "fit", "--input", path, "--out", tmp_path / "o")
        assert code == 2 and errors[0]["error"] == "empty-input"

    def test_degenerate_fit(self, tmp_path, capsys):
        path = tmp_path / "sep.csv"
        path.write_text("a,hits,trials\n0,0,3\n1,0,3\n2,3,3\n")
        code, errors = _run(capsys, "fit", "--input", path, "--out", tmp_path / "o")
        assert code == 3 and errors[0]["error"] == "degenerate"

    def test_missing_file(self, tmp_path, capsys):
        code, errors = _run(capsys, "fit", "--input", tmp_path / "nope.csv", "--out", tmp_path / "o")
        assert code == 2 and errors[0]["error"] == "io"


class TestEvaluate:
    def test_step_trace_shm(self, tmp_path, capsys):
        t = time_grid()
        path = tmp_path / "step.csv"
        write_traces_csv([ProbabilityTrace("e", t, (t > -2.0).astype(float))], path)
        code, errors = _run(capsys, "evaluate", "--traces", path, "--mode", "shm", "--out", tmp_path / "o")
        assert code == 3
        report = json.loads((tmp_path / "o" / "report.json").read_text())
        assert report["results"]["shm"]["error"] == "degenerate"
        assert "separation" in report["results"]["shm"]["message"]

    def test_all_miss_trace(self, tmp_path, capsys):
        t = time_grid()
        path = tmp_path / "miss.csv"
        write_traces_csv([ProbabilityTrace("e", t, np.full(t.size, 0.1))], path)
        code, errors = _run(capsys, "evaluate", "--traces", path, "--mode", "both", "--out", tmp_path / "o")
        assert code == 3
        results = json.loads((tmp_path / "o" / "report.json").read_text())["results"]
        assert results["shm"]["a90_95"] is None and results["mhm"]["a90_95"] is None
        assert len(errors) == 2

    def test_mhm_writes_experiments(self, trace_csv, tmp_path, capsys):
        out = tmp_path / "o"
        code, _ = _run(capsys, "evaluate", "--traces", trace_csv, "--mode", "mhm", "--out", out)
        assert code == 0
        files = sorted(p.name for p in out.glob("experiment_*.json"))
        assert files == [f"experiment_{k:02d}.json" for k in range(1, 11)]
        report = json.loads((out / "report.json").read_text())
        mhm = report["results"]["mhm"]
        values = [v for v in mhm["per_experiment_a90_95"] if v is not None]
        assert mhm["a90_95"] == pytest.approx(np.mean(values), abs=1e-12)
        assert mhm["seconds_before"] == -mhm["a90_95"]

    def test_both_modes(self, trace_csv, tmp_path, capsys):
        out = tmp_path / "o"
        code, _ = _run(capsys, "evaluate", "--traces", trace_csv, "--mode", "both", "--out", out)
        assert code == 0
        results = json.loads((out / "report.json").read_text())["results"]
        assert results["shm"]["a90_95"] != results["mhm"]["a90_95"]
        assert (out / "shm_pod.svg").exists()

    def test_fap(self, trace_csv, tmp_path, capsys):
        neg = tmp_path / "neg.csv"
        _run(capsys, "synth", "--b0", -8, "--b1", 0, "--seed", 1, "--events", 12, "--jitter", 0.05, "--out", neg)
        out = tmp_path / "o"
        code, _ = _run(capsys, "evaluate", "--traces", trace_csv, "--negatives", neg, "--mode", "mhm", "--out", out)
        assert code == 0
        fap = json.loads((out / "report.json").read_text())["fap"]
        assert (fap["n"], fap["x"]) == (12, 0)
        assert fap["fap"] == pytest.approx(1 - 2 ** (-1 / 12), abs=1e-12)

    def test_deterministic(self, trace_csv, tmp_path, capsys):
        for name in ("a", "b"):
            _run(capsys, "evaluate", "--traces", trace_csv, "--mode", "both", "--out", tmp_path / name)
        for path in (tmp_path / "a").iterdir():
            assert path.read_text() == (tmp_path / "b" / path.name).read_text()


class TestCompare:
    def test_published_diffs(self, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        write_manifest(published_tables.candidates("LCL"), manifest)
        code, _ = _run(capsys, "compare", "--manifest", manifest, "--out", tmp_path / "o")
        assert code == 0
        with open(tmp_path / "o" / "comparison.csv", newline="") as fh:
            first = next(csv.DictReader(fh))
        assert (first["diff_a_vs_a_SHM"], first["diff_a_vs_a_MHM"]) == ("2.016", "1.128")
        assert (tmp_path / "o" / "winners.txt").exists()

    def test_shuffled_manifest_same_output(self, tmp_path, capsys):
        results = published_tables.candidates("LCR")
        shuffled = list(results)
        random.Random(1).shuffle(shuffled)
        for name, rows in (("a", results), ("b", shuffled)):
            write_manifest(rows, tmp_path / f"{name}.csv")
            _run(capsys, "compare", "--manifest", tmp_path / f"{name}.csv", "--out", tmp_path / name)
        for fname in ("comparison.csv", "winners.csv", "comparison.txt", "winners.txt"):
            assert (tmp_path / "a" / fname).read_text() == (tmp_path / "b" / fname).read_text()

    def test_single_method(self, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        write_manifest([c for c in published_tables.candidates("LCL") if c.method == "modified_hm"], manifest)
        code, _ = _run(capsys, "compare", "--manifest", manifest, "--out", tmp_path / "o")
        assert code == 0
        header = (tmp_path / "o" / "comparison.csv").read_text().splitlines()[0]
        assert "diff" not in header

    def test_key_mismatch(self, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        write_manifest(published_tables.candidates("LCL")[1:], manifest)
        code, errors = _run(capsys, "compare", "--manifest", manifest, "--out", tmp_path / "o")
        assert code == 2 and errors[0]["error"] == "key-mismatch"


class TestEntryPoint:
    def test_console_script(self, tmp_path):
        out = tmp_path / "t.csv"
        proc = subprocess.run([sys.executable, "-m", "podeval.cli", "synth", "--b0", "6", "--b1", "2",
                               "--out", str(out)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert out.read_text().startswith("event_id,t_seconds,probability\n")

    def test_bad_arguments_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["fit"])
        assert info.value.code == 2
