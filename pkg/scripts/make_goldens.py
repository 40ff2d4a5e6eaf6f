"""Regenerate the committed test fixtures and golden files in tests/data.

Run from the repository root after an intentional behavior change:

    python scripts/make_goldens.py

Everything here is seeded, so reruns are byte-identical until the underlying
numerics change on purpose; regenerated goldens should be reviewed in the
diff like any other change.
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

sys.path.insert(0, str(ROOT / "src"))

from fluidrec.cli import main as cli_main  # noqa: E402
from fluidrec.dataset import default_cohort_spec, load_csv, save_spec, stratified_split  # noqa: E402

FIXTURE_SEED = 11
SPLIT_SEED = 0

TRAIN_CONFIG = {
    "classifier_grid": [
        {"variant": "logistic", "hidden_nodes": 0, "epochs": 100},
        {"variant": "feedforward", "hidden_nodes": 3, "epochs": 150},
    ],
    "ife_grid": [{"variant": "linear", "hidden_nodes": 0, "epochs": 300}],
    "optimizer": {"max_iters": 200},
}


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    spec = default_cohort_spec()
    save_spec(spec, DATA / "cohort_spec.json")
    (DATA / "train_config.json").write_text(json.dumps(TRAIN_CONFIG, indent=2) + "\n")

    rc = cli_main([
        "synth", "--n", "300", "--seed", str(FIXTURE_SEED),
        "--spec", str(DATA / "cohort_spec.json"),
        "--out", str(DATA / "cohort300.csv"),
    ])
    assert rc == 0

    with tempfile.TemporaryDirectory() as tmp:
        rc = cli_main([
            "train", "--data", str(DATA / "cohort300.csv"),
            "--spec", str(DATA / "cohort_spec.json"),
            "--seed", str(SPLIT_SEED),
            "--config", str(DATA / "train_config.json"),
            "--out", tmp,
        ])
        assert rc == 0
        shutil.copy(Path(tmp) / "bundle.json", DATA / "demo_bundle.json")

        rc = cli_main([
            "sweep", "--data", str(DATA / "cohort300.csv"),
            "--spec", str(DATA / "cohort_spec.json"),
            "--bundle", str(DATA / "demo_bundle.json"),
            "--seed", str(SPLIT_SEED),
            "--config", str(DATA / "train_config.json"),
            "--out", tmp,
        ])
        assert rc == 0
        shutil.copy(Path(tmp) / "sweep.csv", DATA / "golden_sweep.csv")
        shutil.copy(Path(tmp) / "avg_recs.csv", DATA / "golden_avg_recs.csv")

    # raw-unit request taken from the first row of the fixture's test split
    ds = load_csv(DATA / "cohort300.csv", spec.meta())
    _, _, test = stratified_split(ds, (0.8, 0.1, 0.1), SPLIT_SEED)
    part = ds.partition
    row = test.X[0]
    request = {
        "x_u": [float(v) for v in row[list(part.u_indices)]],
        "x_i_observed": [float(v) for v in row[list(part.i_indices)]],
        "x_d_physician": [float(v) for v in row[list(part.d_indices)]],
        "budget": 0.5,
    }
    (DATA / "demo_request.json").write_text(json.dumps(request, indent=2, sort_keys=True) + "\n")

    from fastapi.testclient import TestClient

    from fluidrec.service import create_app

    client = TestClient(create_app())
    bundle_doc = json.loads((DATA / "demo_bundle.json").read_text())
    bid = client.post("/bundles", json=bundle_doc).json()["id"]
    resp = client.post(f"/bundles/{bid}/recommend", json=request)
    assert resp.status_code == 200
    (DATA / "golden_recommend.json").write_text(
        json.dumps(resp.json(), indent=2, sort_keys=True) + "\n"
    )
    print(f"goldens written to {DATA}")


if __name__ == "__main__":
    main()
