import json
from pathlib import Path

import pytest

from fluidrec.cli import main

DATA = Path(__file__).parent / "data"


def _run(*argv) -> int:
    return main([str(a) for a in argv])


class TestSynth:
    def test_row_count(self, tmp_path):
        out = tmp_path / "cohort.csv"
        rc = _run("synth", "--spec", DATA / "cohort_spec.json", "--n", 5000, "--seed", 7, "--out", out)
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 5001  # header + rows

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert _run("synth", "--n", 200, "--seed", 3, "--out", a) == 0
        assert _run("synth", "--n", 200, "--seed", 3, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_dump_spec(self, tmp_path):
        out = tmp_path / "c.csv"
        spec_out = tmp_path / "spec.json"
        assert _run("synth", "--n", 150, "--seed", 0, "--out", out, "--dump-spec", spec_out) == 0
        doc = json.loads(spec_out.read_text())
        assert "heart_rate" in doc


class TestGolden:
    def test_sweep_matches_golden(self, tmp_path):
        rc = _run(
            "sweep", "--data", DATA / "cohort300.csv", "--spec", DATA / "cohort_spec.json",
            "--bundle", DATA / "demo_bundle.json", "--seed", 0,
            "--config", DATA / "train_config.json", "--out", tmp_path,
        )
        assert rc == 0
        assert (tmp_path / "sweep.csv").read_bytes() == (DATA / "golden_sweep.csv").read_bytes()
        assert (tmp_path / "avg_recs.csv").read_bytes() == (DATA / "golden_avg_recs.csv").read_bytes()


class TestRecommend:
    def test_budget_zero_identity(self, tmp_path, capsys):
        rc = _run(
            "recommend", "--bundle", DATA / "demo_bundle.json",
            "--request", DATA / "demo_request.json", "--budget", 0,
        )
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert all(f["delta"] == 0.0 for f in doc["fluids"])
        request = json.loads((DATA / "demo_request.json").read_text())
        got = [f["physician"] for f in doc["fluids"]]
        # physician values echo the request after round-tripping the scaler
        assert got == pytest.approx(request["x_d_physician"], abs=1e-9)

    def test_writes_file_with_out(self, tmp_path):
        rc = _run(
            "recommend", "--bundle", DATA / "demo_bundle.json",
            "--request", DATA / "demo_request.json", "--out", tmp_path,
        )
        assert rc == 0
        assert (tmp_path / "recommendation.json").exists()


class TestExitCodes:
    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["sweep"])  # missing required arguments
        assert exc.value.code == 2

    def test_data_error_is_1(self, tmp_path):
        rc = _run(
            "train", "--data", tmp_path / "missing.csv", "--out", tmp_path,
        )
        assert rc == 1

    def test_bad_csv_is_1(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        rc = _run("train", "--data", bad, "--out", tmp_path)
        assert rc == 1


class TestDeterminism:
    """Every report-producing subcommand is byte-stable under a fixed seed."""

    def _tree_bytes(self, root: Path) -> dict:
        return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()}

    def test_train_twice_identical(self, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            rc = _run(
                "train", "--data", DATA / "cohort300.csv", "--spec", DATA / "cohort_spec.json",
                "--seed", 0, "--config", DATA / "train_config.json", "--out", out,
            )
            assert rc == 0
            outs.append(self._tree_bytes(out))
        assert outs[0] == outs[1]

    def test_select_features_twice_identical(self, tmp_path):
        outs = []
        for name in ("f1", "f2"):
            out = tmp_path / name
            rc = _run(
                "select-features", "--data", DATA / "cohort300.csv",
                "--spec", DATA / "cohort_spec.json", "--seed", 5,
                "--patience", 2, "--out", out,
            )
            assert rc == 0
            outs.append(self._tree_bytes(out))
        assert outs[0] == outs[1]

    def test_sweep_parallelism_invariant(self, tmp_path):
        outs = []
        for name, workers in (("w1", "1"), ("w4", "4")):
            out = tmp_path / name
            rc = _run(
                "sweep", "--data", DATA / "cohort300.csv", "--spec", DATA / "cohort_spec.json",
                "--bundle", DATA / "demo_bundle.json", "--seed", 0,
                "--budgets", "0.2,0.8", "--workers", workers, "--out", out,
            )
            assert rc == 0
            outs.append(self._tree_bytes(out))
        assert outs[0] == outs[1]

    def test_robustness_twice_identical(self, tmp_path):
        outs = []
        for name in ("b1", "b2"):
            out = tmp_path / name
            rc = _run(
                "robustness", "--data", DATA / "cohort300.csv", "--spec", DATA / "cohort_spec.json",
                "--bundle", DATA / "demo_bundle.json", "--seed", 1,
                "--budgets", "0.2,1.0", "--out", out,
            )
            assert rc == 0
            outs.append(self._tree_bytes(out))
        assert outs[0] == outs[1]

    def test_recommend_twice_identical(self, tmp_path):
        outs = []
        for name in ("x1", "x2"):
            out = tmp_path / name
            rc = _run(
                "recommend", "--bundle", DATA / "demo_bundle.json",
                "--request", DATA / "demo_request.json", "--out", out,
            )
            assert rc == 0
            outs.append(self._tree_bytes(out))
        assert outs[0] == outs[1]
