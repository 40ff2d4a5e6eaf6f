"""Randomized greedy forward feature selection with a patience window.

Each iteration draws one not-yet-held feature uniformly at random, trains the
inner classifier on the held set plus the candidate, and keeps the candidate
only if the evaluation metric strictly improves on the current held set's
score. The very first drawn feature is always kept. Rejected candidates
return to the pool and may be redrawn. The search stops after `patience`
consecutive non-improving iterations, or when the pool empties.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset, stratified_split, subset_features
from .errors import EmptyFeatureSet
from .models import ClassifierConfig, accuracy, auc_score, predict_proba, train_classifier


@dataclass(frozen=True)
class CseConfig:
    patience: int = 10
    metric: str = "auc"  # "auc" | "accuracy"
    seed: int = 0
    inner_classifier: ClassifierConfig = ClassifierConfig("feedforward", 3, 150, 0.01, 0)
    eval_fraction: float | None = 0.25  # None -> evaluate on the training set itself

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.metric not in ("auc", "accuracy"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.eval_fraction is not None and not 0.0 < self.eval_fraction < 1.0:
            raise ValueError("eval_fraction must lie in (0,1)")


@dataclass(frozen=True)
class CseIteration:
    k: int
    feature: str
    score: float
    delta: float
    accepted: bool
    patience_counter: int  # value after this iteration


@dataclass
class CseTrace:
    iterations: list[CseIteration] = field(default_factory=list)
    selected: list[str] = field(default_factory=list)

    def to_jsonl(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for it in self.iterations:
                fh.write(json.dumps({
                    "k": it.k,
                    "feature": it.feature,
                    "score": it.score,
                    "delta": it.delta,
                    "accepted": it.accepted,
                    "patience_counter": it.patience_counter,
                }) + "\n")


def classifier_subset_eval(
    train: Dataset, cfg: CseConfig
) -> tuple[list[str], CseTrace]:
    """Greedy randomized forward selection; deterministic under cfg.seed."""
    if train.p < 1:
        raise EmptyFeatureSet("no features to select from")
    rng = np.random.default_rng(cfg.seed)

    if cfg.eval_fraction is None:
        fit_ds, eval_ds = train, train
    else:
        # fixed internal split, reused across iterations so deltas compare
        frac = cfg.eval_fraction
        fit_ds, eval_ds, _ = stratified_split(train, (1 - frac, frac, 0.0), cfg.seed)

    pool: list[str] = list(train.feature_names)
    selected: list[str] = []
    score_prev = 0.0
    patience_counter = 0
    trace = CseTrace()
    k = 0
    while True:
        k += 1
        draw = int(rng.integers(len(pool)))
        feat = pool.pop(draw)
        selected.append(feat)
        score = _score_subset(fit_ds, eval_ds, selected, cfg)
        delta = score - score_prev
        accept = delta > 0 or len(selected) == 1  # first feature is always kept
        if accept:
            score_prev = score
            patience_counter = 0
        else:
            selected.pop()
            pool.append(feat)
            patience_counter += 1
        trace.iterations.append(
            CseIteration(k, feat, score, delta, accept, patience_counter)
        )
        if patience_counter == cfg.patience or not pool:
            break
    trace.selected = list(selected)
    return selected, trace


def _score_subset(fit_ds: Dataset, eval_ds: Dataset, names: list[str], cfg: CseConfig) -> float:
    model = train_classifier(subset_features(fit_ds, names), cfg.inner_classifier)
    eval_sub = subset_features(eval_ds, names)
    if cfg.metric == "accuracy":
        return accuracy(model, eval_sub)
    return auc_score(predict_proba(model, eval_sub.X), eval_sub.y)
