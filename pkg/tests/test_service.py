import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from fluidrec.invclass import optimize_recommendation
from fluidrec.service import (
    RecommendBody,
    _descale_result,
    _scale_request,
    bundle_from_json,
    create_app,
)

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def bundle_doc():
    return json.loads((DATA / "demo_bundle.json").read_text())


@pytest.fixture(scope="module")
def request_doc():
    return json.loads((DATA / "demo_request.json").read_text())


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def loaded(client, bundle_doc):
    bid = client.post("/bundles", json=bundle_doc).json()["id"]
    return client, bid


class TestRegistry:
    def test_post_returns_fresh_id(self, client, bundle_doc):
        r1 = client.post("/bundles", json=bundle_doc)
        r2 = client.post("/bundles", json=bundle_doc)
        assert r1.status_code == 201 and r2.status_code == 201
        assert r1.json()["id"] != r2.json()["id"]

    def test_list_after_post(self, loaded):
        client, bid = loaded
        body = client.get("/bundles").json()
        assert len(body["bundles"]) == 1
        assert body["bundles"][0]["id"] == bid
        assert body["bundles"][0]["blocks"]["d"]

    def test_unknown_id_404(self, client):
        assert client.get("/bundles/missing").status_code == 404
        assert client.delete("/bundles/missing").status_code == 404

    def test_full_roundtrip_byte_equal(self, loaded, bundle_doc):
        client, bid = loaded
        got = client.get(f"/bundles/{bid}", params={"full": 1}).json()
        got.pop("id")
        assert got == bundle_doc

    def test_inconsistent_bundle_rejected_with_field(self, client, bundle_doc):
        doc = json.loads(json.dumps(bundle_doc))
        doc["meta"][0]["name"] = "renamed"
        r = client.post("/bundles", json=doc)
        assert r.status_code == 400
        assert "field" in r.json()

    def test_oversized_payload_413(self, bundle_doc):
        client = TestClient(create_app(max_bundle_bytes=1000))
        r = client.post("/bundles", json=bundle_doc)
        assert r.status_code == 413

    def test_delete_then_404(self, loaded):
        client, bid = loaded
        assert client.delete(f"/bundles/{bid}").status_code == 204
        assert client.get(f"/bundles/{bid}").status_code == 404

    def test_persistence_across_restart(self, bundle_doc, tmp_path):
        c1 = TestClient(create_app(persist_dir=tmp_path))
        bid = c1.post("/bundles", json=bundle_doc).json()["id"]
        c2 = TestClient(create_app(persist_dir=tmp_path))
        got = c2.get(f"/bundles/{bid}", params={"full": 1}).json()
        got.pop("id")
        assert got == bundle_doc


class TestRecommend:
    def test_budget_zero_all_deltas_zero(self, loaded, request_doc):
        client, bid = loaded
        req = dict(request_doc)
        req["budget"] = 0.0
        r = client.post(f"/bundles/{bid}/recommend", json=req)
        assert r.status_code == 200
        body = r.json()
        assert all(f["delta"] == 0.0 for f in body["fluids"])
        assert all(z == 0.0 for z in body["z"])

    def test_golden_response(self, loaded, request_doc):
        client, bid = loaded
        r = client.post(f"/bundles/{bid}/recommend", json=request_doc)
        assert r.status_code == 200
        golden = json.loads((DATA / "golden_recommend.json").read_text())
        assert json.dumps(r.json(), sort_keys=True) == json.dumps(golden, sort_keys=True)

    def test_negative_budget_400(self, loaded, request_doc):
        client, bid = loaded
        req = dict(request_doc)
        req["budget"] = -0.2
        assert client.post(f"/bundles/{bid}/recommend", json=req).status_code == 400

    def test_non_finite_input_422(self, loaded, request_doc):
        client, bid = loaded
        req = json.loads(json.dumps(request_doc))
        req["x_u"][0] = float("nan")
        r = client.post(
            f"/bundles/{bid}/recommend",
            content=json.dumps(req).replace("NaN", "NaN"),
            headers={"content-type": "application/json"},
        )
        assert r.status_code == 422

    def test_dimension_violation_400(self, loaded, request_doc):
        client, bid = loaded
        req = json.loads(json.dumps(request_doc))
        req["x_d_physician"] = req["x_d_physician"][:-1]
        assert client.post(f"/bundles/{bid}/recommend", json=req).status_code == 400

    def test_thin_adapter_matches_library_call(self, loaded, request_doc, bundle_doc):
        client, bid = loaded
        http = client.post(f"/bundles/{bid}/recommend", json=request_doc).json()

        bundle = bundle_from_json(bundle_doc, bundle_id="direct")
        body = RecommendBody(**request_doc)
        req, cfg = _scale_request(bundle, body)
        result = optimize_recommendation(bundle.classifier, bundle.ife, req, cfg)
        direct = _descale_result(bundle, req, result)
        assert json.dumps(http, sort_keys=True) == json.dumps(direct, sort_keys=True)

    def test_concurrent_equals_serial(self, loaded, request_doc):
        client, bid = loaded
        serial = client.post(f"/bundles/{bid}/recommend", json=request_doc).json()
        with ThreadPoolExecutor(max_workers=6) as pool:
            futures = [
                pool.submit(client.post, f"/bundles/{bid}/recommend", json=request_doc)
                for _ in range(12)
            ]
            bodies = [f.result().json() for f in futures]
        for body in bodies:
            assert body == serial

    def test_trajectory_flag(self, loaded, request_doc):
        client, bid = loaded
        req = dict(request_doc)
        req["include_trajectory"] = True
        body = client.post(f"/bundles/{bid}/recommend", json=req).json()
        assert body["trajectory"][0][0] == 0


class TestSweep:
    def test_single_zero_budget_point(self, loaded, request_doc):
        client, bid = loaded
        r = client.post(f"/bundles/{bid}/sweep", json={"budgets": [0.0], "request": request_doc})
        assert r.status_code == 200
        point = r.json()["points"][0]
        assert point["prob_after"] == point["prob_start"]

    def test_non_increasing_sequence(self, loaded, request_doc):
        client, bid = loaded
        budgets = [round(0.1 * k, 1) for k in range(1, 11)]
        r = client.post(f"/bundles/{bid}/sweep", json={"budgets": budgets, "request": request_doc})
        probs = [p["prob_after"] for p in r.json()["points"]]
        assert all(b <= a + 1e-6 for a, b in zip(probs, probs[1:]))

    def test_empty_budgets_400(self, loaded, request_doc):
        client, bid = loaded
        r = client.post(f"/bundles/{bid}/sweep", json={"budgets": [], "request": request_doc})
        assert r.status_code == 400

    def test_unknown_bundle_404(self, client, request_doc):
        r = client.post("/bundles/nope/sweep", json={"budgets": [0.5], "request": request_doc})
        assert r.status_code == 404


class TestOpenApi:
    def test_schema_served_and_matches_committed_file(self, client):
        live = client.get("/openapi.json")
        assert live.status_code == 200
        committed = json.loads((Path(__file__).parent.parent / "openapi.json").read_text())
        assert live.json() == committed
