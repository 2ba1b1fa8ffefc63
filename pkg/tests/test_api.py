import json
import time

import pytest
from fastapi.testclient import TestClient

from quietvoyage.cli import main as cli_main
from quietvoyage.scenario import parse_scenario
from quietvoyage.service import create_app


@pytest.fixture(scope="module")
def client(quick_scenario_path):
    cfg = parse_scenario(quick_scenario_path)
    app = create_app(cfg)
    with TestClient(app) as c:
        yield c


def wait_for_job(client, job_id, timeout_s=300.0):
    t0 = time.time()
    while time.time() - t0 < timeout_s:
        state = client.get(f"/jobs/{job_id}").json()
        if state["status"] in ("done", "failed"):
            return state
        time.sleep(0.2)
    raise TimeoutError(f"job {job_id} did not finish")


class TestScenarioLifecycle:
    def test_create_optimize_poll_result(self, client):
        r = client.post("/scenarios", json={})
        assert r.status_code == 201
        sid = r.json()["id"]

        r = client.post(f"/scenarios/{sid}/optimize")
        assert r.status_code == 202
        job_id = r.json()["job_id"]

        # result before done returns 409 with job state (unless it finished fast)
        early = client.get(f"/scenarios/{sid}/result")
        assert early.status_code in (200, 409)
        if early.status_code == 409:
            assert "status" in early.json()["detail"]

        state = wait_for_job(client, job_id)
        assert state["status"] == "done", state
        assert state["progress"] == 1.0

        r = client.get(f"/scenarios/{sid}/result")
        assert r.status_code == 200
        body = r.json()
        assert "comparison" in body
        assert "delta_mean_sel_db" in body["comparison"]
        assert body["metadata"]["baseline_kind"] == "constant_speed"

    def test_unknown_ids_404(self, client):
        assert client.post("/scenarios/scn-9999/optimize").status_code == 404
        assert client.get("/jobs/job-9999").status_code == 404
        assert client.get("/scenarios/scn-9999/result").status_code == 404

    def test_malformed_body_422(self, client):
        r = client.post("/scenarios", json={"eta_h": -2.0})
        assert r.status_code == 422
        detail = r.json()["detail"]
        assert any("eta_h" in str(d.get("loc", "")) for d in detail)

    def test_result_before_any_job_409(self, client):
        sid = client.post("/scenarios", json={}).json()["id"]
        r = client.get(f"/scenarios/{sid}/result")
        assert r.status_code == 409

    def test_optimize_conflict_409(self, client):
        sid = client.post("/scenarios", json={}).json()["id"]
        first = client.post(f"/scenarios/{sid}/optimize")
        assert first.status_code == 202
        second = client.post(f"/scenarios/{sid}/optimize")
        # either conflicts while running, or the first finished very fast
        if second.status_code == 409:
            assert "in progress" in second.json()["detail"]
        wait_for_job(client, first.json()["job_id"])

    def test_missing_cache_409(self, client, tmp_path):
        body = {"data": {"tl_cache_dir": str(tmp_path / "not_there")}}
        # keep other data paths valid by merging server-side defaults first
        sid = client.post("/scenarios", json=body).json()["id"]
        r = client.post(f"/scenarios/{sid}/optimize")
        assert r.status_code == 409
        assert "cache" in r.json()["detail"].lower()

    def test_tl_tiles(self, client):
        sid = client.post("/scenarios", json={}).json()["id"]
        r = client.get(
            f"/scenarios/{sid}/tiles/tl",
            params={"src_lat": 48.7, "src_lon": -123.5},
        )
        assert r.status_code == 200
        tile = r.json()
        assert len(tile["lat"]) == len(tile["tl_db"])
        assert all(v >= 0.0 for row in tile["tl_db"] for v in row)

    def test_concurrent_jobs_on_distinct_scenarios(self, client):
        s1 = client.post("/scenarios", json={"seeds": {"planner": 7, "ga": 11, "wildlife": 3}}).json()["id"]
        s2 = client.post("/scenarios", json={"seeds": {"planner": 8, "ga": 12, "wildlife": 4}}).json()["id"]
        j1 = client.post(f"/scenarios/{s1}/optimize").json()["job_id"]
        j2 = client.post(f"/scenarios/{s2}/optimize").json()["job_id"]
        st1 = wait_for_job(client, j1)
        st2 = wait_for_job(client, j2)
        assert st1["status"] == "done" and st2["status"] == "done"
        r1 = client.get(f"/scenarios/{s1}/result").json()
        r2 = client.get(f"/scenarios/{s2}/result").json()
        assert r1["comparison"]["delta_mean_sel_db"] is not None
        assert r2["comparison"]["delta_mean_sel_db"] is not None


class TestCliApiParity:
    def test_numbers_match_bit_for_bit(self, client, quick_scenario_path, tmp_path):
        out = tmp_path / "parity"
        assert cli_main(["--out-dir", str(out), "compare", str(quick_scenario_path)]) == 0
        cli_result = json.loads((out / "result.json").read_text())

        sid = client.post("/scenarios", json={}).json()["id"]
        job = client.post(f"/scenarios/{sid}/optimize").json()["job_id"]
        wait_for_job(client, job)
        api_result = client.get(f"/scenarios/{sid}/result").json()

        assert api_result["comparison"] == cli_result["comparison"]
        assert api_result["optimized_profile"] == cli_result["optimized_profile"]
        assert api_result["optimized_route"] == cli_result["optimized_route"]
        assert api_result["baseline_footprint"]["sel_db"] == cli_result["baseline_footprint"]["sel_db"]

        # CSV parity: parsing the CLI CSV reproduces the API floats exactly
        lines = (out / "comparison.csv").read_text().splitlines()
        header = lines[0].split(",")
        first = dict(zip(header, lines[1].split(",")))
        row = api_result["comparison"]["rows"][0]
        assert float(first["delta_sel_db"]) == row["delta_sel_db"]
        assert float(first["baseline_sel_db"]) == row["baseline_sel_db"]


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"
