"""HTTP facade over trained model bundles and the optimizer.

Clients speak raw clinical units; scaling to the unit cube and back is a
server concern. Bundles are immutable once registered, so concurrent
recommendation calls share them freely; only registry mutations serialize.
"""

from __future__ import annotations

import json
import math
import threading
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .dataset import FeatureCategory, FeatureMeta, FeaturePartition, Scaler
from .errors import DimensionMismatch
from .ife import IfeModel, ife_from_json, ife_to_json
from .invclass import (
    OptimizeConfig,
    RecommendationRequest,
    derive_partition,
    optimize_recommendation,
)
from .models import ClassifierModel, classifier_from_json, classifier_to_json

MAX_BUNDLE_BYTES = 32 * 1024 * 1024


@dataclass
class ModelBundle:
    id: str
    classifier: ClassifierModel
    ife: IfeModel
    scaler: Scaler
    meta: list[FeatureMeta]
    partition: FeaturePartition
    metadata: dict = field(default_factory=dict)

    def block_names(self) -> dict[str, list[str]]:
        return {
            "u": list(self.ife.u_names),
            "i": list(self.ife.i_names),
            "d": list(self.ife.d_names),
        }


class BundleValidationError(ValueError):
    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(message)


def bundle_to_json(b: ModelBundle) -> dict:
    return {
        "classifier": classifier_to_json(b.classifier),
        "ife": ife_to_json(b.ife),
        "scaler": b.scaler.to_json(),
        "meta": [
            {
                "name": m.name,
                "category": m.category.value,
                "units": m.units,
                "raw_min": m.raw_min,
                "raw_max": m.raw_max,
            }
            for m in b.meta
        ],
        "metadata": b.metadata,
    }


def bundle_from_json(doc: dict, bundle_id: str | None = None) -> ModelBundle:
    """Parse and cross-check a serialized bundle; raises BundleValidationError
    naming the offending field."""
    for key in ("classifier", "ife", "scaler", "meta"):
        if key not in doc:
            raise BundleValidationError(key, f"missing field {key!r}")
    try:
        clf = classifier_from_json(doc["classifier"])
    except (KeyError, ValueError, TypeError) as exc:
        raise BundleValidationError("classifier", f"bad classifier: {exc}") from None
    try:
        h = ife_from_json(doc["ife"])
    except (KeyError, ValueError, TypeError) as exc:
        raise BundleValidationError("ife", f"bad estimator: {exc}") from None
    try:
        meta = [
            FeatureMeta(
                m["name"],
                FeatureCategory(m["category"]),
                m.get("units", ""),
                float(m.get("raw_min", 0.0)),
                float(m.get("raw_max", 1.0)),
            )
            for m in doc["meta"]
        ]
    except (KeyError, ValueError, TypeError) as exc:
        raise BundleValidationError("meta", f"bad feature metadata: {exc}") from None

    names = tuple(m.name for m in meta)
    try:
        # meta fixes the canonical order; the scaler document may be sorted
        scaler = Scaler.from_json(doc["scaler"], names=names)
    except (KeyError, ValueError, TypeError) as exc:
        raise BundleValidationError("scaler", f"bad scaler: {exc}") from None
    if tuple(clf.feature_names) != names:
        raise BundleValidationError(
            "classifier.feature_names", "classifier feature order differs from meta"
        )
    if tuple(scaler.feature_names) != names:
        raise BundleValidationError(
            "scaler", "scaler feature order differs from meta"
        )
    try:
        partition = derive_partition(clf, h)
    except DimensionMismatch as exc:
        raise BundleValidationError("ife.feature_names", str(exc)) from None
    return ModelBundle(
        id=bundle_id or uuid.uuid4().hex[:12],
        classifier=clf,
        ife=h,
        scaler=scaler,
        meta=meta,
        partition=partition,
        metadata=doc.get("metadata", {}),
    )


class _Registry:
    """Bundles plus their posted documents (kept verbatim so ?full=1 returns
    exactly what the client uploaded)."""

    def __init__(self, persist_dir: Path | None):
        self._lock = threading.Lock()
        self._bundles: dict[str, ModelBundle] = {}
        self._docs: dict[str, dict] = {}
        self._persist_dir = persist_dir
        if persist_dir is not None:
            persist_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(persist_dir.glob("*.json")):
                doc = json.loads(path.read_text())
                bundle = bundle_from_json(doc, bundle_id=path.stem)
                self._bundles[bundle.id] = bundle
                self._docs[bundle.id] = doc

    def add(self, bundle: ModelBundle, doc: dict) -> None:
        with self._lock:
            self._bundles[bundle.id] = bundle
            self._docs[bundle.id] = doc
            if self._persist_dir is not None:
                (self._persist_dir / f"{bundle.id}.json").write_text(
                    json.dumps(doc)
                )

    def remove(self, bundle_id: str) -> bool:
        with self._lock:
            if bundle_id not in self._bundles:
                return False
            del self._bundles[bundle_id]
            del self._docs[bundle_id]
            if self._persist_dir is not None:
                path = self._persist_dir / f"{bundle_id}.json"
                if path.exists():
                    path.unlink()
            return True

    def get(self, bundle_id: str) -> ModelBundle | None:
        return self._bundles.get(bundle_id)

    def doc(self, bundle_id: str) -> dict | None:
        return self._docs.get(bundle_id)

    def ids(self) -> list[str]:
        return sorted(self._bundles)


class RecommendBody(BaseModel):
    x_u: list[float]
    x_i_observed: list[float]
    x_d_physician: list[float]
    budget: float
    step_size: float | None = None
    max_iters: int | None = None
    convergence_tol: float | None = None
    include_trajectory: bool = False


class SweepBody(BaseModel):
    budgets: list[float]
    request: RecommendBody


def _error(status: int, message: str, field_name: str | None = None) -> JSONResponse:
    body = {"error": message}
    if field_name:
        body["field"] = field_name
    return JSONResponse(body, status_code=status)


def _bundle_summary(b: ModelBundle) -> dict:
    scaler_doc = b.scaler.to_json()
    features = [
        {
            "name": m.name,
            "category": m.category.value,
            "units": m.units,
            "min": scaler_doc[m.name]["min"],
            "max": scaler_doc[m.name]["max"],
        }
        for m in b.meta
    ]
    return {
        "id": b.id,
        "features": features,
        "blocks": b.block_names(),
        "metadata": b.metadata,
    }


def _scale_request(
    b: ModelBundle, body: RecommendBody
) -> tuple[RecommendationRequest, OptimizeConfig]:
    part = b.partition
    if (
        len(body.x_u) != len(part.u_indices)
        or len(body.x_i_observed) != len(part.i_indices)
        or len(body.x_d_physician) != len(part.d_indices)
    ):
        raise DimensionMismatch(
            f"expected block sizes |U|={len(part.u_indices)}, "
            f"|I|={len(part.i_indices)}, |D|={len(part.d_indices)}"
        )
    raw = np.empty(part.p)
    raw[list(part.u_indices)] = body.x_u
    raw[list(part.i_indices)] = body.x_i_observed
    raw[list(part.d_indices)] = body.x_d_physician
    scaled = b.scaler.transform(raw)
    req = RecommendationRequest(
        x_u=scaled[list(part.u_indices)],
        x_i_observed=scaled[list(part.i_indices)],
        x_d_physician=scaled[list(part.d_indices)],
        budget=body.budget,
    )
    cfg = OptimizeConfig(
        budget=body.budget,
        step_size=body.step_size if body.step_size is not None else 0.05,
        max_iters=body.max_iters if body.max_iters is not None else 200,
        convergence_tol=body.convergence_tol if body.convergence_tol is not None else 1e-6,
    )
    return req, cfg


def _descale_result(b: ModelBundle, req: RecommendationRequest, result) -> dict:
    part = b.partition
    d_idx = list(part.d_indices)
    mins = b.scaler.mins[d_idx]
    maxs = b.scaler.maxs[d_idx]
    span = maxs - mins
    opt_raw = mins + result.x_d_optimized * span
    phys_raw = mins + req.x_d_physician * span
    units = {m.name: m.units for m in b.meta}
    fluids = [
        {
            "name": name,
            "units": units[name],
            "physician": float(phys_raw[k]),
            "optimized": float(opt_raw[k]),
            "delta": float(opt_raw[k] - phys_raw[k]),
            "delta_normalized": float(result.z[k]),
        }
        for k, name in enumerate(b.ife.d_names)
    ]
    doc = result.to_json(include_trajectory=False)
    doc["prob_start"] = result.prob_start
    doc["fluids"] = fluids
    return doc


def create_app(
    persist_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
    max_bundle_bytes: int = MAX_BUNDLE_BYTES,
) -> FastAPI:
    app = FastAPI(title="fluidrec service", version="0.1.0")
    registry = _Registry(Path(persist_dir) if persist_dir else None)
    app.state.registry = registry

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "bundles": len(registry.ids())}

    @app.post("/bundles", status_code=201)
    async def post_bundle(request: Request):
        body = await request.body()
        if len(body) > max_bundle_bytes:
            return _error(413, f"bundle exceeds {max_bundle_bytes} bytes")
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            return _error(400, f"invalid JSON: {exc}")
        try:
            bundle = bundle_from_json(doc)
        except BundleValidationError as exc:
            return _error(400, str(exc), exc.field_name)
        registry.add(bundle, doc)
        return {"id": bundle.id}

    @app.get("/bundles")
    def list_bundles() -> dict:
        return {"bundles": [_bundle_summary(registry.get(i)) for i in registry.ids()]}

    @app.get("/bundles/{bundle_id}")
    def get_bundle(bundle_id: str, full: int = 0):
        bundle = registry.get(bundle_id)
        if bundle is None:
            return _error(404, f"no bundle {bundle_id!r}")
        if full:
            doc = dict(registry.doc(bundle_id))
            doc["id"] = bundle.id
            return doc
        return _bundle_summary(bundle)

    @app.delete("/bundles/{bundle_id}")
    def delete_bundle(bundle_id: str):
        if not registry.remove(bundle_id):
            return _error(404, f"no bundle {bundle_id!r}")
        return Response(status_code=204)

    def _prepare(bundle_id: str, body: RecommendBody):
        bundle = registry.get(bundle_id)
        if bundle is None:
            return None, _error(404, f"no bundle {bundle_id!r}")
        values = [*body.x_u, *body.x_i_observed, *body.x_d_physician, body.budget]
        if not all(math.isfinite(v) for v in values):
            return None, _error(422, "non-finite value in request")
        if body.budget < 0:
            return None, _error(400, "budget must be non-negative", "budget")
        try:
            req, cfg = _scale_request(bundle, body)
        except DimensionMismatch as exc:
            return None, _error(400, str(exc))
        return (bundle, req, cfg), None

    @app.post("/bundles/{bundle_id}/recommend")
    def recommend(bundle_id: str, body: RecommendBody):
        prepared, err = _prepare(bundle_id, body)
        if err is not None:
            return err
        bundle, req, cfg = prepared
        result = optimize_recommendation(bundle.classifier, bundle.ife, req, cfg)
        doc = _descale_result(bundle, req, result)
        if body.include_trajectory:
            doc["trajectory"] = [[int(t), float(o)] for t, o in result.trajectory]
        return doc

    @app.post("/bundles/{bundle_id}/sweep")
    def sweep(bundle_id: str, body: SweepBody):
        if not body.budgets:
            return _error(400, "budgets list is empty", "budgets")
        if not all(math.isfinite(b) for b in body.budgets):
            return _error(422, "non-finite budget")
        if any(b < 0 for b in body.budgets):
            return _error(400, "budgets must be non-negative", "budgets")
        prepared, err = _prepare(bundle_id, body.request)
        if err is not None:
            return err
        bundle, req, cfg = prepared
        points = []
        for b in body.budgets:
            req_b = RecommendationRequest(req.x_u, req.x_i_observed, req.x_d_physician, b)
            result = optimize_recommendation(
                bundle.classifier, bundle.ife, req_b, replace(cfg, budget=b)
            )
            points.append(
                {
                    "budget": b,
                    "prob_after": result.prob_after,
                    "prob_start": result.prob_start,
                    "prob_before": result.prob_before,
                }
            )
        return {"points": points}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
