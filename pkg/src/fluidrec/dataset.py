"""Patient cohort handling: loading, imputation, scaling, splits, synthesis.

Feature vectors are partitioned into three blocks: unchangeable attributes
(demographics), indirectly changeable measurements (vitals, labs) that respond
to treatment, and directly changeable treatment amounts (per-fluid IV
volumes). All downstream modeling assumes features scaled to [0, 1].
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    AllMissingFeature,
    ClassTooSmall,
    InvalidSpec,
    MissingLabelColumn,
    NonNumericCell,
    ScalerNotFitted,
    UnknownColumn,
)

LABEL_COLUMN = "discharge_expired"

# Noise applied to the latent index that drives synthetic indirect features.
LINK_NOISE_SD = 0.05
# Non-planted link coefficients are damped so each planted (indirect, direct)
# pair keeps a sample correlation comfortably above 0.3.
LINK_DAMPING = 0.35
PLANTED_COEF = 0.5


class FeatureCategory(Enum):
    UNCHANGEABLE = "unchangeable"
    INDIRECT = "indirect"
    DIRECT = "direct"


@dataclass(frozen=True)
class FeatureMeta:
    name: str
    category: FeatureCategory
    units: str = ""
    raw_min: float = 0.0
    raw_max: float = 1.0


@dataclass(frozen=True)
class FeaturePartition:
    """Index sets of the unchangeable / indirect / direct feature blocks."""

    u_indices: tuple[int, ...]
    i_indices: tuple[int, ...]
    d_indices: tuple[int, ...]

    def __post_init__(self):
        all_idx = list(self.u_indices) + list(self.i_indices) + list(self.d_indices)
        if len(set(all_idx)) != len(all_idx):
            raise ValueError("partition blocks overlap")
        if sorted(all_idx) != list(range(len(all_idx))):
            raise ValueError("partition must cover 0..p-1 exactly")
        if not self.d_indices:
            raise ValueError("direct block is empty: nothing to optimize")

    @property
    def p(self) -> int:
        return len(self.u_indices) + len(self.i_indices) + len(self.d_indices)


def partition_from_meta(meta: list[FeatureMeta]) -> FeaturePartition:
    by_cat = {c: [] for c in FeatureCategory}
    for j, m in enumerate(meta):
        by_cat[m.category].append(j)
    return FeaturePartition(
        tuple(by_cat[FeatureCategory.UNCHANGEABLE]),
        tuple(by_cat[FeatureCategory.INDIRECT]),
        tuple(by_cat[FeatureCategory.DIRECT]),
    )


@dataclass(frozen=True)
class PatientRecord:
    x: np.ndarray
    y: int


@dataclass(frozen=True)
class Scaler:
    """Per-feature min/max fitted on training data; transform clamps to [0,1]."""

    feature_names: tuple[str, ...]
    mins: np.ndarray
    maxs: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        span = self.maxs - self.mins
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (X - self.mins) / span
        out = np.where(span > 0, out, 0.0)  # degenerate feature -> 0
        return np.clip(out, 0.0, 1.0)

    def inverse(self, X: np.ndarray) -> np.ndarray:
        return self.mins + X * (self.maxs - self.mins)

    def to_json(self) -> dict:
        return {
            name: {"min": float(lo), "max": float(hi)}
            for name, lo, hi in zip(self.feature_names, self.mins, self.maxs)
        }

    @classmethod
    def from_json(cls, doc: dict, names: tuple[str, ...] | None = None) -> "Scaler":
        """`names` fixes the feature order; defaults to document key order."""
        names = tuple(names) if names is not None else tuple(doc.keys())
        mins = np.array([doc[n]["min"] for n in names], dtype=float)
        maxs = np.array([doc[n]["max"] for n in names], dtype=float)
        return cls(names, mins, maxs)


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix (NaN marks missing) with binary labels."""

    X: np.ndarray
    y: np.ndarray
    meta: tuple[FeatureMeta, ...]
    partition: FeaturePartition | None = None
    scaler: Scaler | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=int)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError("X must be (n, p) with matching label count")
        if X.shape[1] != len(self.meta):
            raise ValueError("feature count does not match metadata")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "meta", tuple(self.meta))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def feature_names(self) -> list[str]:
        return [m.name for m in self.meta]

    @property
    def records(self) -> list[PatientRecord]:
        return [PatientRecord(self.X[i], int(self.y[i])) for i in range(self.n)]

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.X).sum())

    @property
    def positive_fraction(self) -> float:
        return float(self.y.mean())

    def take(self, idx: np.ndarray) -> "Dataset":
        return replace(self, X=self.X[idx].copy(), y=self.y[idx].copy())


def subset_features(ds: Dataset, names: list[str]) -> Dataset:
    """Column subset in the given order; partition is recomputed when the
    direct block survives, dropped otherwise."""
    pos = {m.name: j for j, m in enumerate(ds.meta)}
    missing = [n for n in names if n not in pos]
    if missing:
        raise UnknownColumn(f"unknown feature(s): {missing}")
    cols = [pos[n] for n in names]
    meta = tuple(ds.meta[j] for j in cols)
    try:
        part = partition_from_meta(list(meta))
    except ValueError:
        part = None
    return Dataset(ds.X[:, cols].copy(), ds.y.copy(), meta, part, None)


# -- CSV ingestion -----------------------------------------------------------

def load_csv(path: str | Path, meta: list[FeatureMeta]) -> Dataset:
    """Read a raw cohort file; empty cells become NaN (missing)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)

    names = [m.name for m in meta]
    if LABEL_COLUMN not in header:
        raise MissingLabelColumn(f"no {LABEL_COLUMN!r} column in {path.name}")
    expected = set(names) | {LABEL_COLUMN}
    for col in header:
        if col not in expected:
            raise UnknownColumn(f"unexpected column {col!r}")
    for name in names:
        if name not in header:
            raise UnknownColumn(f"column {name!r} missing from file")

    col_of = {c: i for i, c in enumerate(header)}
    X = np.full((len(rows), len(names)), np.nan)
    y = np.zeros(len(rows), dtype=int)
    for r, row in enumerate(rows):
        for j, name in enumerate(names):
            cell = row[col_of[name]].strip()
            if cell == "":
                continue
            try:
                X[r, j] = float(cell)
            except ValueError:
                raise NonNumericCell(r, name, cell) from None
        label_cell = row[col_of[LABEL_COLUMN]].strip()
        try:
            label = float(label_cell)
        except ValueError:
            raise NonNumericCell(r, LABEL_COLUMN, label_cell) from None
        if label not in (0.0, 1.0):
            raise NonNumericCell(r, LABEL_COLUMN, label_cell)
        y[r] = int(label)

    part = partition_from_meta(meta)
    return Dataset(X, y, tuple(meta), part, None)


def write_csv(ds: Dataset, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ds.feature_names + [LABEL_COLUMN])
        for i in range(ds.n):
            cells = ["" if np.isnan(v) else repr(float(v)) for v in ds.X[i]]
            writer.writerow(cells + [int(ds.y[i])])


# -- imputation and scaling ---------------------------------------------------

def impute_mean(ds: Dataset, means: np.ndarray | None = None) -> Dataset:
    """Fill missing cells with per-feature observed means.

    Pass `means` (e.g. from the training split) to impute held-out data with
    training statistics; by default means come from `ds` itself.
    """
    X = ds.X.copy()
    mask = np.isnan(X)
    if means is None:
        observed = ~mask
        if not observed.all(axis=0).all() and (observed.sum(axis=0) == 0).any():
            bad = [ds.meta[j].name for j in np.where(observed.sum(axis=0) == 0)[0]]
            raise AllMissingFeature(f"no observed values for {bad}")
        means = np.nanmean(np.where(mask, np.nan, X), axis=0)
    if mask.any():
        X[mask] = np.take(means, np.where(mask)[1])
    return replace(ds, X=X)


def fit_scaler(ds: Dataset) -> Scaler:
    if ds.n_missing:
        raise ValueError("impute before fitting the scaler")
    return Scaler(
        tuple(ds.feature_names),
        ds.X.min(axis=0).copy(),
        ds.X.max(axis=0).copy(),
    )


def apply_scaler(ds: Dataset, scaler: Scaler | None) -> Dataset:
    if scaler is None:
        raise ScalerNotFitted("fit_scaler must run on the training split first")
    if tuple(ds.feature_names) != tuple(scaler.feature_names):
        raise UnknownColumn("scaler fitted on different feature set")
    return replace(ds, X=scaler.transform(ds.X), scaler=scaler)


# -- stratified splitting -----------------------------------------------------

def stratified_split(
    ds: Dataset,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> tuple[Dataset, Dataset, Dataset]:
    """Class-stratified train/val/test split, deterministic under seed."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must sum to 1")
    rng = np.random.default_rng(seed)
    split_members: list[list[int]] = [[], [], []]
    for cls in (0, 1):
        members = np.where(ds.y == cls)[0]
        if len(members) < 3:
            raise ClassTooSmall(f"class {cls} has only {len(members)} members")
        members = members[rng.permutation(len(members))]
        counts = _largest_remainder(len(members), ratios)
        start = 0
        for k, c in enumerate(counts):
            split_members[k].extend(members[start : start + c].tolist())
            start += c
    out = []
    for idx in split_members:
        idx_arr = np.sort(np.array(idx, dtype=int))
        out.append(ds.take(idx_arr))
    return out[0], out[1], out[2]


def _largest_remainder(n: int, ratios: tuple[float, ...]) -> list[int]:
    raw = [n * r for r in ratios]
    counts = [int(np.floor(v)) for v in raw]
    short = n - sum(counts)
    fracs = sorted(range(len(ratios)), key=lambda k: (-(raw[k] - counts[k]), k))
    for k in fracs[:short]:
        counts[k] += 1
    return counts


# -- synthetic cohorts --------------------------------------------------------

@dataclass(frozen=True)
class FeatureSummary:
    """Six-number distribution summary plus the block the feature belongs to."""

    name: str
    minimum: float
    q1: float
    median: float
    mean: float
    q3: float
    maximum: float
    category: FeatureCategory
    units: str = ""

    def validate(self) -> None:
        chain = (self.minimum, self.q1, self.median, self.q3, self.maximum)
        if any(a > b for a, b in zip(chain, chain[1:])):
            raise InvalidSpec(f"{self.name}: quantiles out of order {chain}")

    @property
    def is_binary(self) -> bool:
        return all(v in (0.0, 1.0) for v in (self.minimum, self.q1, self.median, self.q3, self.maximum))

    def inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        if self.is_binary:
            return (u > 1.0 - self.mean).astype(float)
        probs = [0.0, 0.25, 0.5, 0.75, 1.0]
        vals = [self.minimum, self.q1, self.median, self.q3, self.maximum]
        return np.interp(u, probs, vals)


@dataclass(frozen=True)
class SyntheticSpec:
    """Target marginals, outcome rate, and the latent mortality model used to
    label generated cohorts."""

    features: tuple[FeatureSummary, ...]
    positive_rate: float = 0.22
    effect_weights: tuple[float, ...] | None = None
    link_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.positive_rate < 1.0:
            raise InvalidSpec("positive rate must lie in (0,1)")
        for f in self.features:
            f.validate()
        if self.effect_weights is not None and len(self.effect_weights) != len(self.features):
            raise InvalidSpec("effect weight count does not match features")

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    def meta(self) -> list[FeatureMeta]:
        return [
            FeatureMeta(f.name, f.category, f.units, f.minimum, f.maximum)
            for f in self.features
        ]

    def resolved_weights(self) -> np.ndarray:
        """Explicit weights, or deterministic defaults keyed by link_seed
        (direct-block defaults lean protective so treatments matter)."""
        if self.effect_weights is not None:
            return np.array(self.effect_weights, dtype=float)
        rng = np.random.default_rng(self.link_seed + 1)
        w = np.empty(len(self.features))
        for j, f in enumerate(self.features):
            if f.category is FeatureCategory.DIRECT:
                w[j] = rng.uniform(-3.5, -0.5)
            else:
                w[j] = rng.uniform(-2.5, 2.5)
        return w

    def to_json(self) -> dict:
        doc: dict = {}
        for f in self.features:
            doc[f.name] = {
                "min": f.minimum,
                "q1": f.q1,
                "median": f.median,
                "mean": f.mean,
                "q3": f.q3,
                "max": f.maximum,
                "category": f.category.value,
                "units": f.units,
            }
        doc["__cohort__"] = {
            "positive_rate": self.positive_rate,
            "link_seed": self.link_seed,
        }
        if self.effect_weights is not None:
            doc["__cohort__"]["effect_weights"] = {
                f.name: w for f, w in zip(self.features, self.effect_weights)
            }
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SyntheticSpec":
        cohort = doc.get("__cohort__", {})
        feats = []
        for name, row in doc.items():
            if name == "__cohort__":
                continue
            try:
                feats.append(
                    FeatureSummary(
                        name=name,
                        minimum=float(row["min"]),
                        q1=float(row["q1"]),
                        median=float(row["median"]),
                        mean=float(row["mean"]),
                        q3=float(row["q3"]),
                        maximum=float(row["max"]),
                        category=FeatureCategory(row["category"]),
                        units=row.get("units", ""),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise InvalidSpec(f"bad feature entry {name!r}: {exc}") from None
        weights = None
        if "effect_weights" in cohort:
            wmap = cohort["effect_weights"]
            weights = tuple(float(wmap[f.name]) for f in feats)
        return cls(
            features=tuple(feats),
            positive_rate=float(cohort.get("positive_rate", 0.22)),
            effect_weights=weights,
            link_seed=int(cohort.get("link_seed", 0)),
        )


def planted_pairs(spec: SyntheticSpec) -> list[tuple[str, str]]:
    """(indirect, direct) feature pairs given a boosted link coefficient."""
    i_feats = [f.name for f in spec.features if f.category is FeatureCategory.INDIRECT]
    d_feats = [f.name for f in spec.features if f.category is FeatureCategory.DIRECT]
    return [(nm, d_feats[j % len(d_feats)]) for j, nm in enumerate(i_feats)]


def _link_matrix(spec: SyntheticSpec, n_ud: int, n_i: int, n_u: int, n_d: int) -> np.ndarray:
    rng = np.random.default_rng(spec.link_seed)
    A = rng.uniform(-0.5, 0.5, size=(n_i, n_ud)) * LINK_DAMPING
    for j in range(n_i):
        A[j, n_u + (j % n_d)] = PLANTED_COEF
    return A


def generate_synthetic(spec: SyntheticSpec, n: int, seed: int) -> Dataset:
    """Sample a raw-unit cohort whose marginals track the spec summaries.

    Every feature is driven by a percentile in [0,1]: unchangeable/direct
    percentiles are uniform draws, indirect percentiles are the ranks of a
    noisy linear index of the (unchangeable, direct) percentiles, and values
    come from each feature's piecewise-linear inverse CDF. This keeps the
    published marginals for every column while planting a monotone treatment
    response. Labels are Bernoulli draws from a logistic model on the
    percentiles, with the bias solved to hit the target outcome rate
    (percentiles rather than raw values keep the latent model's slopes
    bounded despite the heavy-tailed recorded extremes).
    """
    if n < 100:
        raise InvalidSpec("n must be at least 100")
    meta = spec.meta()
    part = partition_from_meta(meta)
    rng = np.random.default_rng(seed)
    p = len(meta)
    Q = np.zeros((n, p))

    ud_idx = list(part.u_indices) + list(part.d_indices)
    for j in ud_idx:
        Q[:, j] = rng.uniform(0.0, 1.0, size=n)

    if part.i_indices:
        A = _link_matrix(spec, len(ud_idx), len(part.i_indices), len(part.u_indices), len(part.d_indices))
        latent = Q[:, ud_idx] @ A.T + rng.normal(0.0, LINK_NOISE_SD, size=(n, len(part.i_indices)))
        for k, j in enumerate(part.i_indices):
            order = np.argsort(latent[:, k], kind="stable")
            ranks = np.empty(n, dtype=float)
            ranks[order] = np.arange(n, dtype=float)
            Q[:, j] = (ranks + 0.5) / n

    X = np.column_stack([spec.features[j].inverse_cdf(Q[:, j]) for j in range(p)])

    w = spec.resolved_weights()
    logits = (Q - 0.5) @ w
    bias = _solve_bias(logits, spec.positive_rate)
    probs = 1.0 / (1.0 + np.exp(-(logits + bias)))
    y = (rng.uniform(0.0, 1.0, size=n) < probs).astype(int)
    return Dataset(X, y, tuple(meta), part, None)


def _solve_bias(logits: np.ndarray, target: float, tol: float = 1e-12) -> float:
    lo, hi = -50.0, 50.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        rate = float(np.mean(1.0 / (1.0 + np.exp(-(logits + mid)))))
        if abs(rate - target) < tol:
            return mid
        if rate < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- default demo cohort -------------------------------------------------------

def default_cohort_spec() -> SyntheticSpec:
    """Thirty-feature septic-ICU cohort profile used by the demo pipeline.

    Vitals/labs summaries follow published ICU cohort statistics (reproduced
    verbatim, including the implausible recorded extremes such as pH max 53.5
    and systolic BP min 0.0); fluid-volume summaries and the latent effect
    weights are synthetic-cohort choices.
    """
    U = FeatureCategory.UNCHANGEABLE
    I = FeatureCategory.INDIRECT
    D = FeatureCategory.DIRECT
    rows = [
        # name, min, q1, median, mean, q3, max, category, units, effect weight
        ("age", 19.0, 56.3, 68.0, 66.4, 79.0, 89.0, U, "years", 1.2),
        ("gender", 0.0, 0.0, 1.0, 0.55, 1.0, 1.0, U, "binary", 0.1),
        ("median_weight", 0.0, 63.8, 76.8, 80.3, 90.8, 233.9, U, "kg", -0.2),
        ("base_excess", -31.0, -5.0, -2.3, -2.7, 0.0, 16.5, I, "mEq/L", -0.6),
        ("blood_co2", 4.5, 19.8, 22.6, 22.8, 25.8, 44.0, I, "mEq/L", -0.3),
        ("blood_hemoglobin", 6.0, 9.1, 9.9, 10.1, 11.0, 19.5, I, "g/dL", -0.5),
        ("blood_urea_nitrogen", 1.0, 17.0, 29.0, 36.01, 48.2, 212.5, I, "mg/dL", 1.5),
        ("body_temperature", 47.4, 97.5, 98.1, 98.1, 98.8, 107.2, I, "degF", -0.4),
        ("diastolic_bp", 18.0, 50.8, 56.4, 57.1, 63.0, 90.3, I, "mmHg", -0.8),
        ("glasgow_coma_scale", 3.0, 10.6, 13.9, 12.5, 15.0, 15.0, I, "score", -1.8),
        ("heart_rate", 46.6, 78.4, 88.2, 89.0, 98.9, 137.3, I, "/min", 1.0),
        ("hematocrit", 19.7, 27.8, 29.9, 30.7, 32.9, 61.6, I, "%", -0.3),
        ("lactate", 0.6, 1.5, 2.0, 2.5, 2.9, 18.3, I, "mg/dL", 2.2),
        ("o2_flow", 0.3, 2.2, 3.4, 5.1, 6.3, 100.0, I, "L/min", 0.8),
        ("paco2", 19.0, 33.6, 38.5, 39.8, 43.8, 121.0, I, "mmHg", 0.3),
        ("pao2", 27.0, 83.0, 104.1, 108.1, 127.5, 350.0, I, "mmHg", -0.5),
        ("ph", 2.4, 7.3, 7.4, 7.4, 7.4, 53.5, I, "", -0.7),
        ("po2", 26.0, 73.3, 100.0, 103.9, 126.7, 467.0, I, "mmHg", -0.4),
        ("pt", 11.6, 13.8, 14.9, 16.6, 17.6, 55.2, I, "s", 0.6),
        ("ptt", 14.9, 24.0, 27.9, 31.7, 35.4, 128.3, I, "s", 0.5),
        ("platelet_count", 16.8, 145.7, 215.3, 227.5, 288.0, 985.0, I, "x1000/mm3", -0.7),
        ("respiratory_rate", 10.7, 17.7, 20.3, 20.5, 22.9, 38.1, I, "/min", 0.9),
        ("serum_creatinine", 0.2, 0.8, 1.2, 1.9, 2.0, 141.9, I, "mg/dL", 1.4),
        ("serum_chloride", 84.0, 102.6, 106.2, 106.1, 109.6, 137.6, I, "mEq/L", 0.2),
        ("serum_glucose", 30.3, 107.9, 126.7, 135.4, 150.8, 447.7, I, "mg/dL", 0.4),
        ("serum_magnesium", 1.1, 1.8, 2.0, 2.0, 2.1, 18.3, I, "mEq/L", 0.3),
        ("serum_potassium", 2.7, 3.7, 4.0, 4.1, 4.3, 7.3, I, "mEq/L", 0.5),
        ("serum_sodium", 118.3, 136.9, 139.2, 139.3, 141.8, 163.1, I, "mEq/L", -0.2),
        ("systolic_bp", 0.0, 102.2, 109.9, 111.7, 120.7, 210.1, I, "mmHg", -1.2),
        ("wbc_count", 0.5, 8.3, 11.7, 13.2, 15.8, 97.1, I, "x1000/mm3", 0.8),
        ("d10w", 0.0, 0.0, 0.0, 60.0, 50.0, 1000.0, D, "mL", -0.7),
        ("d5hns", 0.0, 0.0, 150.0, 320.0, 500.0, 2000.0, D, "mL", -1.0),
        ("d5lr", 0.0, 100.0, 400.0, 560.0, 850.0, 2500.0, D, "mL", -1.1),
        ("d5ns", 0.0, 0.0, 120.0, 300.0, 450.0, 2000.0, D, "mL", -0.8),
        ("d5w", 0.0, 50.0, 250.0, 430.0, 650.0, 2200.0, D, "mL", -0.9),
        ("dns", 0.0, 0.0, 0.0, 40.0, 25.0, 800.0, D, "mL", -0.5),
        ("hns", 0.0, 0.0, 0.0, 90.0, 100.0, 1200.0, D, "mL", -0.6),
        ("lr", 0.0, 0.0, 150.0, 340.0, 500.0, 2500.0, D, "mL", 0.6),
        ("ns", 0.0, 100.0, 350.0, 560.0, 800.0, 3000.0, D, "mL", 0.5),
    ]
    feats = tuple(
        FeatureSummary(name, lo, q1, med, mean, q3, hi, cat, units)
        for name, lo, q1, med, mean, q3, hi, cat, units, _ in rows
    )
    weights = tuple(float(r[-1]) * EFFECT_SCALE for r in rows)
    return SyntheticSpec(features=feats, positive_rate=0.22, effect_weights=weights, link_seed=0)


# Multiplier applied to the demo effect weights; sized so a small feed-forward
# classifier reaches validation AUC >= 0.90 on the generated cohort.
EFFECT_SCALE = 3.0


def load_spec(path: str | Path) -> SyntheticSpec:
    with Path(path).open(encoding="utf-8") as fh:
        return SyntheticSpec.from_json(json.load(fh))


def save_spec(spec: SyntheticSpec, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(spec.to_json(), fh, indent=2, sort_keys=False)
        fh.write("\n")
