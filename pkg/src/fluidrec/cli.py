"""Command-line pipeline: cohort synthesis, model training and selection,
feature selection, single recommendations, budget sweeps, robustness runs,
and the HTTP server. All report files are deterministic functions of
(input bytes, config, seed)."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import experiment
from .dataset import (
    SyntheticSpec,
    apply_scaler,
    default_cohort_spec,
    fit_scaler,
    generate_synthetic,
    impute_mean,
    load_csv,
    load_spec,
    save_spec,
    stratified_split,
    write_csv,
)
from .errors import FluidrecError
from .featsel import CseConfig, classifier_subset_eval
from .ife import IfeConfig, default_ife_grid, ife_grid_search, ife_to_json
from .invclass import OptimizeConfig
from .models import (
    ClassifierConfig,
    classifier_to_json,
    default_grid,
    grid_search,
)
from .service import ModelBundle, bundle_from_json, create_app


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_json(doc, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def _resolve_spec(path: str | None) -> SyntheticSpec:
    return load_spec(path) if path else default_cohort_spec()


def _optimizer_config(cfg_doc: dict) -> OptimizeConfig:
    opt = cfg_doc.get("optimizer", {})
    return OptimizeConfig(
        step_size=opt.get("step_size", 0.05),
        max_iters=opt.get("max_iters", 200),
        convergence_tol=opt.get("convergence_tol", 1e-6),
    )


def _pipeline(data: str, spec: SyntheticSpec, seed: int):
    """Load -> impute -> stratified split -> scale (scaler fit on train)."""
    ds = load_csv(data, spec.meta())
    ds = impute_mean(ds)
    train, val, test = stratified_split(ds, (0.8, 0.1, 0.1), seed)
    scaler = fit_scaler(train)
    return (
        apply_scaler(train, scaler),
        apply_scaler(val, scaler),
        apply_scaler(test, scaler),
        scaler,
    )


# -- subcommands -----------------------------------------------------------------

def _cmd_synth(args) -> int:
    spec = _resolve_spec(args.spec)
    ds = generate_synthetic(spec, args.n, args.seed)
    write_csv(ds, args.out)
    if args.dump_spec:
        save_spec(spec, args.dump_spec)
    if args.verbose:
        print(f"wrote {ds.n} rows x {ds.p} features to {args.out}", file=sys.stderr)
    return 0


def _classifier_grid_from_config(cfg_doc: dict, seed: int) -> list[ClassifierConfig]:
    rows = cfg_doc.get("classifier_grid")
    if not rows:
        return default_grid(seed)
    return [
        ClassifierConfig(
            r.get("variant", "feedforward"),
            r.get("hidden_nodes", 3),
            r.get("epochs", 250),
            r.get("learning_rate", 0.01),
            seed,
        )
        for r in rows
    ]


def _ife_grid_from_config(cfg_doc: dict, seed: int) -> list[IfeConfig]:
    rows = cfg_doc.get("ife_grid")
    if not rows:
        return default_ife_grid(seed)
    return [
        IfeConfig(
            r.get("variant", "feedforward"),
            r.get("hidden_nodes", 10),
            r.get("epochs", 250),
            r.get("learning_rate", 0.01),
            seed,
        )
        for r in rows
    ]


def _cmd_train(args) -> int:
    spec = _resolve_spec(args.spec)
    cfg_doc = _load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_s, val_s, test_s, scaler = _pipeline(args.data, spec, args.seed)

    best_clf, rows = grid_search(train_s, val_s, _classifier_grid_from_config(cfg_doc, args.seed))
    with (out / "classifier_grid.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "hidden_nodes", "epochs", "train_acc", "train_auc", "val_acc", "val_auc"])
        for r in rows:
            w.writerow([
                r.config.variant, r.config.hidden_nodes, r.config.epochs,
                _fmt(r.train_metrics.accuracy), _fmt(r.train_metrics.auc),
                _fmt(r.metrics.accuracy), _fmt(r.metrics.auc),
            ])
    _write_json(
        [
            {
                "variant": r.config.variant,
                "hidden_nodes": r.config.hidden_nodes,
                "epochs": r.config.epochs,
                "train_acc": r.train_metrics.accuracy,
                "train_auc": r.train_metrics.auc,
                "val_acc": r.metrics.accuracy,
                "val_auc": r.metrics.auc,
            }
            for r in rows
        ],
        out / "classifier_grid.json",
    )

    best_ife, ife_rows = ife_grid_search(train_s, val_s, _ife_grid_from_config(cfg_doc, args.seed))
    with (out / "ife_grid.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "hidden_nodes", "epochs", "val_mse", "val_mae"])
        for cfg, m in ife_rows:
            w.writerow([cfg.variant, cfg.hidden_nodes, cfg.epochs, _fmt(m.mse), _fmt(m.mae)])
    _write_json(
        [
            {
                "variant": cfg.variant,
                "hidden_nodes": cfg.hidden_nodes,
                "epochs": cfg.epochs,
                "val_mse": m.mse,
                "val_mae": m.mae,
            }
            for cfg, m in ife_rows
        ],
        out / "ife_grid.json",
    )

    bundle_doc = {
        "classifier": classifier_to_json(best_clf, scaler_ref="scaler.json"),
        "ife": ife_to_json(best_ife, scaler_ref="scaler.json"),
        "scaler": scaler.to_json(),
        "meta": [
            {
                "name": m.name,
                "category": m.category.value,
                "units": m.units,
                "raw_min": m.raw_min,
                "raw_max": m.raw_max,
            }
            for m in spec.meta()
        ],
        "metadata": {
            "source": Path(args.data).name,
            "seed": args.seed,
            "classifier": {
                "variant": best_clf.config.variant,
                "hidden_nodes": best_clf.config.hidden_nodes,
                "epochs": best_clf.config.epochs,
            },
            "ife": {
                "variant": best_ife.config.variant,
                "hidden_nodes": best_ife.config.hidden_nodes,
                "epochs": best_ife.config.epochs,
            },
        },
    }
    _write_json(bundle_doc, out / "bundle.json")
    _write_json(scaler.to_json(), out / "scaler.json")
    if args.verbose:
        print(
            f"best classifier: {best_clf.config.variant}/{best_clf.config.hidden_nodes}"
            f" @ {best_clf.config.epochs} epochs; bundle at {out/'bundle.json'}",
            file=sys.stderr,
        )
    return 0


def _cmd_select_features(args) -> int:
    spec = _resolve_spec(args.spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_s, _, _, _ = _pipeline(args.data, spec, args.seed)
    cfg = CseConfig(
        patience=args.patience,
        metric=args.metric,
        seed=args.seed,
        inner_classifier=ClassifierConfig("feedforward", 3, 150, 0.01, args.seed),
    )
    selected, trace = classifier_subset_eval(train_s, cfg)
    _write_json(selected, out / "selected_features.json")
    trace.to_jsonl(out / "cse_trace.jsonl")
    if args.verbose:
        print(f"selected {len(selected)} features in {len(trace.iterations)} iterations", file=sys.stderr)
    return 0


def _load_bundle(path: str) -> ModelBundle:
    return bundle_from_json(json.loads(Path(path).read_text()), bundle_id="cli")


def _cmd_recommend(args) -> int:
    from .service import RecommendBody, _descale_result, _scale_request

    bundle = _load_bundle(args.bundle)
    req_doc = json.loads(Path(args.request).read_text())
    if args.budget is not None:
        req_doc["budget"] = args.budget
    body = RecommendBody(**req_doc)
    req, cfg = _scale_request(bundle, body)
    from .invclass import optimize_recommendation

    result = optimize_recommendation(bundle.classifier, bundle.ife, req, cfg)
    doc = _descale_result(bundle, req, result)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(doc, out / "recommendation.json")
    else:
        print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def _parse_budgets(arg: str | None) -> tuple[float, ...]:
    if not arg:
        return experiment.DEFAULT_BUDGETS
    return tuple(float(tok) for tok in arg.split(",") if tok.strip())


def _cmd_sweep(args) -> int:
    spec = _resolve_spec(args.spec)
    bundle = _load_bundle(args.bundle)
    cfg = _optimizer_config(_load_config(args.config))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _, _, test_s, _ = _pipeline(args.data, spec, args.seed)
    budgets = _parse_budgets(args.budgets)

    results_by_budget = {
        b: experiment.optimize_instances(
            bundle.classifier, bundle.ife, test_s, b, cfg, workers=args.workers
        )
        for b in budgets
    }
    report = experiment.SweepReport(
        tuple(experiment._aggregate(b, results_by_budget[b]) for b in budgets),
        test_s.n,
    )
    experiment.write_sweep_csv(report, out / "sweep.csv")
    _write_json(experiment.sweep_to_json(report), out / "sweep.json")

    avg = experiment.summarize_avg_recs(results_by_budget, bundle.ife.d_names)
    experiment.write_avg_recs_csv(avg, out / "avg_recs.csv")
    _write_json(experiment.avg_recs_to_json(avg), out / "avg_recs.json")
    if args.verbose:
        print(f"swept {len(budgets)} budgets over {test_s.n} instances", file=sys.stderr)
    return 0


def _cmd_robustness(args) -> int:
    spec = _resolve_spec(args.spec)
    bundle = _load_bundle(args.bundle)
    cfg = _optimizer_config(_load_config(args.config))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _, _, test_s, _ = _pipeline(args.data, spec, args.seed)
    budgets = _parse_budgets(args.budgets)
    lo, hi = (float(t) for t in args.init_range.split(","))
    report = experiment.run_robustness(
        bundle.classifier,
        bundle.ife,
        test_s,
        budgets,
        cfg,
        init_range=(lo, hi),
        seed=args.seed,
        workers=args.workers,
    )
    experiment.write_robustness_csv(report, out / "robustness.csv")
    _write_json(experiment.robustness_to_json(report), out / "robustness.json")
    return 0


def _cmd_serve(args) -> int:
    import os

    import uvicorn

    host = os.environ.get("FLUIDREC_HOST", args.host)
    port = int(os.environ.get("FLUIDREC_PORT", args.port))
    app = create_app(persist_dir=args.persist_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning" if not args.verbose else "info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fluidrec")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="JSON config overrides")
        p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("synth", help="generate a synthetic cohort CSV")
    common(p)
    p.add_argument("--spec", help="cohort spec JSON (default: built-in demo cohort)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--dump-spec", help="also write the resolved spec JSON here")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="grid-search classifier and estimator, emit a bundle")
    common(p)
    p.add_argument("--data", required=True, help="cohort CSV")
    p.add_argument("--spec", help="cohort spec JSON (default: built-in demo cohort)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("select-features", help="randomized greedy forward feature selection")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--spec")
    p.add_argument("--out", required=True)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--metric", choices=("auc", "accuracy"), default="auc")
    p.set_defaults(func=_cmd_select_features)

    p = sub.add_parser("recommend", help="optimize one prescription from a request JSON")
    common(p)
    p.add_argument("--bundle", required=True)
    p.add_argument("--request", required=True, help="raw-unit request JSON")
    p.add_argument("--budget", type=float, help="override the request budget")
    p.add_argument("--out", help="output directory (default: print to stdout)")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("sweep", help="budget sweep + average recommendations on the test split")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--spec")
    p.add_argument("--bundle", required=True)
    p.add_argument("--budgets", help="comma list, default 0.1..1.0")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("robustness", help="prescriber vs random initialization comparison")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--spec")
    p.add_argument("--bundle", required=True)
    p.add_argument("--budgets")
    p.add_argument("--init-range", default="0.0,0.1")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_robustness)

    p = sub.add_parser("serve", help="run the HTTP service")
    common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--persist-dir", help="directory for bundle persistence")
    p.add_argument("--ui-dir", help="static console assets to mount at /ui")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FluidrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
