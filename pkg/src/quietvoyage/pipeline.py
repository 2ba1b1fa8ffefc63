"""End-to-end orchestration: environment loading, planning, optimization,
simulation, and report assembly.  Shared by the CLI and the HTTP service so
both produce identical numbers for identical configs and seeds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .geo import (
    METERS_PER_NM,
    BathymetryGrid,
    GeoPoint,
    RegionMask,
    read_ascii_grid,
    read_mask,
)
from .planner import COST_OFFSET_DB, PlannerConfig, Route, plan_route
from .propagation import (
    LatticeSpec,
    RbfInterpolant,
    precompute_field,
    rbf_fit,
    read_cache,
    read_interpolant,
    write_cache,
    write_interpolant,
)
from .scenario import ResultBundle, ScenarioConfig, ingest_ais
from .sim import EventLog, FootprintReport, compare, comparison_summary, footprint, run_voyage
from .speed import GaConfig, SpeedProfile, VoyageConstraints, optimize_speeds, tdt
from .wildlife import MammalState, init_population, kde_fit

RBF_FIT_SEED = 5
ProgressFn = Callable[[float, str], None]


def _noop_progress(fraction: float, stage: str) -> None:
    pass


@dataclass
class Environment:
    grid: BathymetryGrid
    mask: RegionMask
    config: ScenarioConfig


def load_environment(cfg: ScenarioConfig) -> Environment:
    grid = read_ascii_grid(cfg.bathymetry)
    lane = read_mask(cfg.lane_mask, grid) if cfg.lane_mask else None
    mask = RegionMask.from_grid(grid, lane)
    return Environment(grid=grid, mask=mask, config=cfg)


def cache_missing(cfg: ScenarioConfig) -> bool:
    return not (Path(cfg.tl_cache_dir) / "tl_cache.csv").is_file()


def precompute_tl(cfg: ScenarioConfig, env: Environment | None = None,
                  radius_m: float = 25_000.0, n_nodes: int = 150,
                  n_sources: int = 30, min_range_m: float = 600.0,
                  depths_m: tuple[float, ...] = (1.0, 50.0, 100.0)) -> None:
    """Sample the TL field on sources spaced along the departure-destination
    axis and persist the cache into the scenario's cache directory.

    The surrogate's along-lane resolution is set by the source spacing, so
    sources are placed densely relative to the shadow features of interest.
    """
    env = env or load_environment(cfg)
    from .geo import PlanarPoint, from_planar, to_planar

    end = to_planar(cfg.destination, cfg.departure)
    sources = []
    for i in range(n_sources):
        f = i / max(n_sources - 1, 1)
        sources.append(
            from_planar(PlanarPoint(end.x * f, end.y * f), cfg.departure)
        )
    lattice = LatticeSpec(
        radius_m=radius_m, n_nodes=n_nodes, depths_m=depths_m, min_range_m=min_range_m
    )
    cache = precompute_field(sources, radius_m, env.grid, lattice)
    write_cache(cfg.tl_cache_dir, cache)


def fit_rbf(cfg: ScenarioConfig, clusters: int | None = None, per_cluster: int = 3) -> RbfInterpolant:
    """Fit the surrogate from the persisted cache and store it alongside."""
    cache = read_cache(cfg.tl_cache_dir)
    n = cache.inputs.shape[0]
    if clusters is None:
        clusters = min(700, n // per_cluster)
    interp = rbf_fit(cache, clusters=clusters, per_cluster=per_cluster, seed=RBF_FIT_SEED)
    write_interpolant(cfg.tl_cache_dir, interp)
    return interp


def load_interpolant(cfg: ScenarioConfig) -> RbfInterpolant:
    """Load the fitted surrogate, fitting it first if only the cache exists."""
    if cache_missing(cfg):
        raise FileNotFoundError(
            f"TL cache not found in {cfg.tl_cache_dir}; run precompute-tl first"
        )
    if (Path(cfg.tl_cache_dir) / "rbf_interpolant.csv").is_file():
        return read_interpolant(cfg.tl_cache_dir)
    return fit_rbf(cfg)


def build_mammals(cfg: ScenarioConfig, env: Environment) -> list[MammalState]:
    """Explicit placements win over KDE sampling; both honor navigability."""
    rng = np.random.default_rng(cfg.seed_wildlife)
    if cfg.mammals is not None:
        out = []
        for i, m in enumerate(cfg.mammals):
            out.append(
                MammalState(
                    id=i + 1,
                    position=GeoPoint(m["lat"], m["lon"], m["depth_m"]),
                    speed_kt=float(m.get("speed_kt", 0.0)),
                    heading_deg=float(m.get("heading_deg", 0.0)),
                )
            )
        return out
    count = cfg.mammal_count or 0
    if count == 0:
        return []
    sightings = np.loadtxt(cfg.sightings, delimiter=",", skiprows=1)
    depths = np.loadtxt(cfg.dive_depths, delimiter=",", skiprows=1)
    pos_model = kde_fit(sightings)
    depth_model = kde_fit(depths[:, None] if depths.ndim == 1 else depths)
    return init_population(
        count, pos_model, depth_model, rng, env.grid, env.mask, min_depth_m=1.0
    )


def plan_optimized_route(
    cfg: ScenarioConfig, env: Environment, interp: RbfInterpolant | None,
    mammals: list[MammalState],
) -> Route:
    pc = PlannerConfig(
        batch_size=cfg.planner_batch_size,
        max_batches=cfg.planner_max_batches,
        time_budget_s=cfg.planner_time_budget_s,
        seed=cfg.seed_planner,
        min_depth_m=cfg.min_depth_m,
    )
    return plan_route(cfg.departure, cfg.destination, mammals, interp, env.grid, env.mask, pc)


def baseline_voyage(cfg: ScenarioConfig, env: Environment,
                    planned: Route | None = None) -> tuple[Route, SpeedProfile, dict]:
    """Baseline = the recorded track when one is configured, otherwise the
    planned route sailed at the constant feasible speed."""
    if cfg.ais_track is not None:
        return ingest_ais(cfg.ais_track, cfg.n_legs)
    if planned is None:
        raise ValueError("constant-speed baseline needs the planned route")
    v = planned.length_nm / cfg.eta_h
    profile = SpeedProfile(np.full(cfg.n_legs, v), cfg.eta_h / cfg.n_legs)
    info = {"eta_h": cfg.eta_h, "tdt_nm": tdt(profile), "n_records": 0}
    return planned, profile, info


def ga_config(cfg: ScenarioConfig) -> GaConfig:
    return GaConfig(
        population=cfg.ga_population,
        max_generations=cfg.ga_max_generations,
        time_budget_s=cfg.ga_time_budget_s,
        seed=cfg.seed_ga,
    )


def route_rows(route: Route) -> list[dict]:
    geos = route.to_geo()
    cum = np.concatenate([[0.0], np.cumsum(route.segment_lengths_m)]) / METERS_PER_NM
    return [
        {"index": i, "lat": g.lat, "lon": g.lon, "cumulative_nm": float(c)}
        for i, (g, c) in enumerate(zip(geos, cum))
    ]


def profile_rows(profile: SpeedProfile) -> list[dict]:
    out = []
    cum = 0.0
    for i, v in enumerate(profile.speeds_kt):
        cum += float(v) * profile.dt_h
        out.append(
            {
                "leg_index": i,
                "t_start_h": i * profile.dt_h,
                "v_knots": float(v),
                "cumulative_nm": cum,
            }
        )
    return out


def footprint_dict(report: FootprintReport) -> dict:
    return {
        "mammal_ids": list(report.mammal_ids),
        "sel_db": [float(v) for v in report.sel_total_db],
        "mean_sel_db": report.mean_sel_db,
        "eta_h": report.eta_h,
        "tdt_nm": report.tdt_nm,
        "t_h": [float(t) for t in report.times_h],
        "spl_db": [[float(v) for v in row] for row in report.spl_series_db],
    }


def comparison_dict(table) -> dict:
    return {
        "rows": [
            {
                "mammal_id": r.mammal_id,
                "baseline_sel_db": r.baseline_sel_db,
                "optimized_sel_db": r.optimized_sel_db,
                "delta_sel_db": r.delta_sel_db,
                "percent_reduction": r.percent_reduction,
            }
            for r in table.rows
        ],
        "baseline_mean_sel_db": table.baseline_mean_sel_db,
        "optimized_mean_sel_db": table.optimized_mean_sel_db,
        "delta_mean_sel_db": table.delta_mean_sel_db,
        "mean_percent_reduction": table.mean_percent_reduction,
        "baseline_eta_h": table.baseline_eta_h,
        "optimized_eta_h": table.optimized_eta_h,
        "baseline_tdt_nm": table.baseline_tdt_nm,
        "optimized_tdt_nm": table.optimized_tdt_nm,
    }


def run_comparison(cfg: ScenarioConfig, progress: ProgressFn = _noop_progress) -> ResultBundle:
    """Full pipeline: plan, optimize speeds, simulate both voyages, compare."""
    progress(0.02, "loading environment")
    env = load_environment(cfg)
    interp = load_interpolant(cfg)
    mammals = build_mammals(cfg, env)

    progress(0.10, "planning route")
    planned = plan_optimized_route(cfg, env, interp if mammals else None, mammals)

    progress(0.35, "optimizing speeds")
    constraints = VoyageConstraints(
        eta_h=cfg.eta_h,
        path_length_nm=planned.length_nm,
        v_min_kt=cfg.ship.v_min_kt,
        v_max_kt=cfg.ship.v_max_kt,
    )
    if mammals:
        opt_profile, _ = optimize_speeds(
            planned, constraints, mammals, cfg.ship, interp, ga_config(cfg),
            n_legs=cfg.n_legs, grid=env.grid, mask=env.mask,
        )
    else:
        v = planned.length_nm / cfg.eta_h
        opt_profile = SpeedProfile(np.full(cfg.n_legs, v), cfg.eta_h / cfg.n_legs)

    progress(0.65, "simulating voyages")
    base_route, base_profile, base_info = baseline_voyage(cfg, env, planned)
    rng_base = np.random.default_rng(cfg.seed_wildlife + 1)
    rng_opt = np.random.default_rng(cfg.seed_wildlife + 1)
    ga = ga_config(cfg)
    base_log = run_voyage(
        base_route, base_profile, mammals, cfg.ship, interp if mammals else None,
        env.grid, env.mask, replan_cadence_h=0.0, rng=rng_base,
    )
    opt_log = run_voyage(
        planned, opt_profile, mammals, cfg.ship, interp if mammals else None,
        env.grid, env.mask, replan_cadence_h=cfg.replan_cadence_h, rng=rng_opt,
        ga=ga, v_bounds_kt=(cfg.ship.v_min_kt, cfg.ship.v_max_kt),
    )

    progress(0.9, "building report")
    if mammals:
        base_fp = footprint(base_log, eta_h=base_info["eta_h"])
        opt_fp = footprint(opt_log, eta_h=cfg.eta_h)
        table = compare(base_fp, opt_fp)
        base_fp_d = footprint_dict(base_fp)
        opt_fp_d = footprint_dict(opt_fp)
        table_d = comparison_dict(table)
    else:
        base_fp_d = {"mammal_ids": [], "sel_db": [], "mean_sel_db": None}
        opt_fp_d = {"mammal_ids": [], "sel_db": [], "mean_sel_db": None}
        table_d = {"rows": [], "delta_mean_sel_db": None, "mean_percent_reduction": None}

    bundle = ResultBundle(
        config=cfg.serialize(),
        baseline_route_csv=route_rows(base_route),
        optimized_route_csv=route_rows(planned),
        baseline_profile_csv=profile_rows(base_profile),
        optimized_profile_csv=profile_rows(opt_profile),
        baseline_footprint=base_fp_d,
        optimized_footprint=opt_fp_d,
        comparison=table_d,
        metadata={
            "engine_version": __version__,
            "cost_offset_db": COST_OFFSET_DB,
            "seeds": {
                "planner": cfg.seed_planner,
                "ga": cfg.seed_ga,
                "wildlife": cfg.seed_wildlife,
            },
            "baseline_kind": "ais_track" if cfg.ais_track else "constant_speed",
        },
    )
    progress(1.0, "done")
    bundle._logs = (base_log, opt_log)  # kept for CSV export by the CLI
    return bundle


def tl_tile(cfg: ScenarioConfig, interp: RbfInterpolant, src_lat: float, src_lon: float,
            n: int = 40, receiver_depth_m: float = 10.0, span_deg: float = 0.5) -> dict:
    """Band-mean TL raster around a source position, for map display."""
    lats = np.linspace(src_lat - span_deg, src_lat + span_deg, n)
    lons = np.linspace(src_lon - span_deg * 1.5, src_lon + span_deg * 1.5, n)
    gl, gn = np.meshgrid(lats, lons, indexing="ij")
    queries = np.column_stack(
        [
            np.full(n * n, src_lat),
            np.full(n * n, src_lon),
            gl.ravel(),
            gn.ravel(),
            np.full(n * n, receiver_depth_m),
        ]
    )
    from .propagation import rbf_eval_batch

    tl30, flags = rbf_eval_batch(interp, queries)
    mean_tl = tl30.mean(axis=1).reshape(n, n)
    return {
        "src_lat": src_lat,
        "src_lon": src_lon,
        "receiver_depth_m": receiver_depth_m,
        "lat": [float(v) for v in lats],
        "lon": [float(v) for v in lons],
        "tl_db": [[float(v) for v in row] for row in mean_tl],
        "extrapolated_fraction": float(np.mean(flags)),
    }
