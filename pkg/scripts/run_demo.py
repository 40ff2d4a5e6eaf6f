"""End-to-end demo: synthesize a cohort, train and select models, then run
the budget sweep and robustness comparison. Writes everything under
demo_run/ (or the directory given as the first argument)."""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fluidrec.cli import main as cli_main  # noqa: E402


def run(out_dir: str = "demo_run") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cohort = out / "cohort.csv"
    spec = out / "spec.json"

    steps = [
        ["synth", "--n", "3000", "--seed", "7", "--out", str(cohort), "--dump-spec", str(spec)],
        ["train", "--data", str(cohort), "--spec", str(spec), "--seed", "0",
         "--out", str(out / "train"), "--verbose"],
        ["select-features", "--data", str(cohort), "--spec", str(spec), "--seed", "0",
         "--out", str(out / "featsel"), "--verbose"],
        ["sweep", "--data", str(cohort), "--spec", str(spec),
         "--bundle", str(out / "train" / "bundle.json"), "--seed", "0",
         "--out", str(out / "sweep"), "--verbose"],
        ["robustness", "--data", str(cohort), "--spec", str(spec),
         "--bundle", str(out / "train" / "bundle.json"), "--seed", "0",
         "--out", str(out / "robustness"), "--verbose"],
    ]
    for argv in steps:
        print(f"$ fluidrec {' '.join(argv)}")
        rc = cli_main(argv)
        if rc != 0:
            sys.exit(rc)

    sweep = json.loads((out / "sweep" / "sweep.json").read_text())
    print("\nbudget sweep (mean optimized mortality):")
    for row in sweep["rows"]:
        print(f"  b={row['budget']:.1f}  mu={row['mean_prob']:.4f}  "
              f"rel. improvement={row['mean_rel_improvement']:.1%}")


if __name__ == "__main__":
    run(sys.argv[1] if len(sys.argv) > 1 else "demo_run")
