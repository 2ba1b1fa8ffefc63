"""HTTP API exposing the engine to the web console.

The service is created around one base scenario (environment, data paths,
TL cache).  Clients create scenario variants by overriding voyage fields,
launch asynchronous optimize jobs, poll job state, and fetch result bundles.
All payload field names match the CSV column names of the file exports.
"""
from __future__ import annotations

import itertools
import threading
import traceback
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from . import __version__, pipeline
from .scenario import ScenarioConfig, ScenarioError, config_from_dict


@dataclass
class Job:
    id: str
    scenario_id: str
    status: str = "queued"        # queued | running | done | failed
    progress: float = 0.0
    stage: str = ""
    error: str | None = None
    result: dict | None = None


@dataclass
class Store:
    scenarios: dict[str, ScenarioConfig] = field(default_factory=dict)
    jobs: dict[str, Job] = field(default_factory=dict)
    job_by_scenario: dict[str, str] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    counter: itertools.count = field(default_factory=itertools.count)

    def next_id(self, prefix: str) -> str:
        return f"{prefix}-{next(self.counter):04d}"


def create_app(base: ScenarioConfig) -> FastAPI:
    app = FastAPI(title="quietvoyage", version=__version__)
    store = Store()
    base_dict = base.serialize()
    base_dir = base.bathymetry.parent

    # Environment and surrogate are read-only and shared across requests.
    state: dict = {"interp": None}

    def interp():
        if state["interp"] is None:
            state["interp"] = pipeline.load_interpolant(base)
        return state["interp"]

    @app.exception_handler(ScenarioError)
    async def scenario_error_handler(request, exc: ScenarioError):
        return JSONResponse(
            status_code=422,
            content={"detail": [{"loc": exc.key, "msg": str(exc)}]},
        )

    @app.post("/scenarios", status_code=201)
    def create_scenario(body: dict):
        merged = dict(base_dict)
        for key, value in (body or {}).items():
            if key == "data" and isinstance(value, dict):
                data = dict(base_dict["data"])
                data.update(value)
                merged["data"] = data
            else:
                merged[key] = value
        cfg = config_from_dict(merged, base_dir)
        sid = store.next_id("scn")
        with store.lock:
            store.scenarios[sid] = cfg
        return {"id": sid}

    def _get_scenario(sid: str) -> ScenarioConfig:
        with store.lock:
            cfg = store.scenarios.get(sid)
        if cfg is None:
            raise HTTPException(status_code=404, detail=f"unknown scenario {sid}")
        return cfg

    @app.post("/scenarios/{sid}/optimize", status_code=202)
    def optimize(sid: str):
        cfg = _get_scenario(sid)
        if pipeline.cache_missing(cfg):
            raise HTTPException(
                status_code=409,
                detail=f"TL cache missing in {cfg.tl_cache_dir}; precompute it first",
            )
        with store.lock:
            running = store.job_by_scenario.get(sid)
            if running and store.jobs[running].status in ("queued", "running"):
                raise HTTPException(
                    status_code=409,
                    detail=f"scenario {sid} already has job {running} in progress",
                )
            job = Job(id=store.next_id("job"), scenario_id=sid)
            store.jobs[job.id] = job
            store.job_by_scenario[sid] = job.id

        def work():
            job.status = "running"

            def progress(fraction: float, stage: str):
                job.progress = fraction
                job.stage = stage

            try:
                bundle = pipeline.run_comparison(cfg, progress)
                job.result = bundle.to_json_dict()
                job.status = "done"
                job.progress = 1.0
            except Exception as exc:
                job.status = "failed"
                job.error = f"{type(exc).__name__}: {exc}"
                job.stage = traceback.format_exc(limit=1)

        threading.Thread(target=work, daemon=True).start()
        return {"job_id": job.id}

    @app.get("/jobs/{job_id}")
    def job_state(job_id: str):
        with store.lock:
            job = store.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        out = {
            "id": job.id,
            "scenario_id": job.scenario_id,
            "status": job.status,
            "progress": job.progress,
            "stage": job.stage,
        }
        if job.error:
            out["error"] = job.error
        return out

    @app.get("/scenarios/{sid}/result")
    def result(sid: str):
        _get_scenario(sid)
        with store.lock:
            job_id = store.job_by_scenario.get(sid)
            job = store.jobs.get(job_id) if job_id else None
        if job is None:
            raise HTTPException(status_code=409, detail=f"scenario {sid} has no job yet")
        if job.status != "done":
            raise HTTPException(
                status_code=409,
                detail={"job_id": job.id, "status": job.status, "progress": job.progress},
            )
        return job.result

    @app.get("/scenarios/{sid}/tiles/tl")
    def tl_heatmap(sid: str, src_lat: float, src_lon: float):
        cfg = _get_scenario(sid)
        if pipeline.cache_missing(cfg):
            raise HTTPException(status_code=409, detail="TL cache missing")
        return pipeline.tl_tile(cfg, interp(), src_lat, src_lon)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    return app
