"""Closed-loop voyage simulation, acoustic footprint analysis, and
baseline-vs-optimized comparison.

The loop is single-threaded and deterministic: per tick the ship advances
along the route according to the speed profile, mammals drift, and the
broadband received level at every mammal is logged.  Re-planning, when
enabled, re-optimizes the remaining legs on a fixed cadence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .geo import METERS_PER_NM, BathymetryGrid, GeoPoint, RegionMask
from .planner import Route
from .propagation import SOURCE_DEPTH_M, RbfInterpolant, rbf_eval_batch
from .source import ShipSpec, source_spectrum
from .speed import (
    GaConfig,
    InfeasibleConstraints,
    SpeedProfile,
    VoyageConstraints,
    optimize_speeds,
    tdt,
)
from .wildlife import MammalState, step_trajectory

DEFAULT_TICK_H = 1.0 / 60.0
DEFAULT_REPLAN_CADENCE_H = 0.5


@dataclass
class SimClock:
    t_h: float = 0.0
    dt_h: float = DEFAULT_TICK_H

    def __post_init__(self):
        if self.dt_h <= 0:
            raise ValueError("dt must be positive")


@dataclass
class EventLog:
    """Per-tick ship state, mammal states, and received levels."""

    times_h: np.ndarray                 # k
    ship_lat: np.ndarray                # k
    ship_lon: np.ndarray                # k
    v_kt: np.ndarray                    # k
    progress_nm: np.ndarray             # k
    mammal_ids: list[int]
    mammal_lat: np.ndarray              # m x k
    mammal_lon: np.ndarray              # m x k
    mammal_depth: np.ndarray            # m x k
    nl_db: np.ndarray                   # m x k

    def __post_init__(self):
        if self.times_h.size == 0:
            raise ValueError("event log must contain at least one tick")
        if np.any(np.diff(self.times_h) <= 0):
            raise ValueError("timestamps must be strictly increasing")


@dataclass
class FootprintReport:
    """Per-mammal exposure summary for one simulated voyage."""

    mammal_ids: list[int]
    spl_series_db: np.ndarray     # m x k
    times_h: np.ndarray
    sel_total_db: np.ndarray      # m
    mean_sel_db: float
    eta_h: float
    tdt_nm: float


@dataclass
class ComparisonRow:
    mammal_id: int
    baseline_sel_db: float
    optimized_sel_db: float
    delta_sel_db: float
    percent_reduction: float


@dataclass
class ComparisonTable:
    rows: list[ComparisonRow]
    baseline_mean_sel_db: float
    optimized_mean_sel_db: float
    delta_mean_sel_db: float
    mean_percent_reduction: float
    baseline_eta_h: float = 0.0
    optimized_eta_h: float = 0.0
    baseline_tdt_nm: float = 0.0
    optimized_tdt_nm: float = 0.0


def reduction_percent(drop_db: float) -> float:
    """Percent change in exposure for a dB drop; negative input (an increase)
    yields a negative percent."""
    mag = (1.0 - 10.0 ** (-abs(drop_db) / 10.0)) * 100.0
    return math.copysign(mag, drop_db) if drop_db != 0 else 0.0


def run_voyage(
    route: Route,
    profile: SpeedProfile,
    mammals: list[MammalState],
    ship_spec: ShipSpec,
    tl: RbfInterpolant | None,
    grid: BathymetryGrid | None = None,
    mask: RegionMask | None = None,
    replan_cadence_h: float = DEFAULT_REPLAN_CADENCE_H,
    dt_h: float = DEFAULT_TICK_H,
    rng: np.random.Generator | None = None,
    ga: GaConfig | None = None,
    v_bounds_kt: tuple[float, float] | None = None,
) -> EventLog:
    """Simulate the voyage and log every tick.

    ``replan_cadence_h = 0`` disables re-optimization.  The final tick is
    shortened so the log ends exactly at the profile duration, which keeps
    the cumulative distance equal to the profile's total distance.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    total_nm = tdt(profile)
    route_nm = route.length_nm
    if abs(total_nm - route_nm) > max(0.01 * route_nm, 0.25):
        raise ValueError(
            f"profile TDT {total_nm:.2f} NM inconsistent with route length {route_nm:.2f} NM"
        )

    duration = profile.duration_h
    ticks = [0.0]
    while ticks[-1] < duration - 1e-12:
        ticks.append(min(ticks[-1] + dt_h, duration))
    times = np.array(ticks)
    k = times.size
    m = len(mammals)

    nls_1kt = source_spectrum(1.0, ship_spec) if m else None

    ship_lat = np.empty(k)
    ship_lon = np.empty(k)
    v_kt = np.empty(k)
    progress = np.empty(k)
    mm_lat = np.empty((m, k))
    mm_lon = np.empty((m, k))
    mm_depth = np.empty((m, k))
    nl = np.empty((m, k))

    states = list(mammals)
    ref = route.ref
    kk = math.pi / 180.0 * 6_371_000.0
    cos_ref = math.cos(math.radians(ref.lat))

    current = profile
    next_replan = replan_cadence_h if replan_cadence_h > 0 else math.inf

    for idx, t in enumerate(times):
        if t >= next_replan and t < duration - 1e-9:
            current = _replan(current, route, states, ship_spec, tl, grid, mask, t, rng, ga,
                              v_bounds_kt)
            next_replan += replan_cadence_h

        if idx > 0:
            step = float(times[idx] - times[idx - 1])
            states = [step_trajectory(s, step, grid, mask) for s in states]

        dist_nm = current.distance_at(float(t))
        p = route.point_at_distance(dist_nm * METERS_PER_NM)
        ship_lat[idx] = ref.lat + p.y / kk
        ship_lon[idx] = ref.lon + p.x / (kk * cos_ref)
        speed = current.speed_at(float(t)) if t < duration else current.speeds_kt[-1]
        v_kt[idx] = speed
        progress[idx] = dist_nm

        for mi, s in enumerate(states):
            mm_lat[mi, idx] = s.position.lat
            mm_lon[mi, idx] = s.position.lon
            mm_depth[mi, idx] = s.position.depth

        if m and tl is not None:
            queries = np.array(
                [
                    [ship_lat[idx], ship_lon[idx], s.position.lat, s.position.lon,
                     s.position.depth]
                    for s in states
                ]
            )
            tl30, _ = rbf_eval_batch(tl, queries)
            nls = nls_1kt + 60.0 * math.log10(speed)
            nl[:, idx] = 10.0 * np.log10(
                np.sum(np.power(10.0, (nls[None, :] - tl30) / 10.0), axis=1)
            )

    return EventLog(
        times_h=times,
        ship_lat=ship_lat,
        ship_lon=ship_lon,
        v_kt=v_kt,
        progress_nm=progress,
        mammal_ids=[s.id for s in mammals],
        mammal_lat=mm_lat,
        mammal_lon=mm_lon,
        mammal_depth=mm_depth,
        nl_db=nl,
    )


def _replan(
    profile: SpeedProfile,
    route: Route,
    states: list[MammalState],
    ship_spec: ShipSpec,
    tl,
    grid,
    mask,
    t_h: float,
    rng: np.random.Generator,
    ga: GaConfig | None,
    v_bounds_kt: tuple[float, float] | None,
) -> SpeedProfile:
    """Re-optimize the whole future legs; keep the current leg as committed."""
    if tl is None or not states:
        return profile
    dt_leg = profile.dt_h
    k = int(math.ceil(t_h / dt_leg - 1e-9))
    n_left = profile.n_legs - k
    if n_left < 2:
        return profile
    dist_done = profile.distance_at(k * dt_leg)
    remaining_nm = tdt(profile) - dist_done
    remaining_h = n_left * dt_leg
    lo, hi = v_bounds_kt if v_bounds_kt else (ship_spec.v_min_kt, ship_spec.v_max_kt)
    try:
        cons = VoyageConstraints(
            eta_h=remaining_h, path_length_nm=remaining_nm, v_min_kt=lo, v_max_kt=hi
        )
        cons.check_feasible()
    except (ValueError, InfeasibleConstraints):
        return profile

    # Sub-route covering the remaining distance, re-anchored at progress.
    sub = _sub_route(route, dist_done * METERS_PER_NM)
    ga_cfg = ga or GaConfig(population=120, max_generations=40, time_budget_s=20.0)
    ga_cfg = replace(ga_cfg, seed=int(rng.integers(2**31)))
    try:
        new_tail, _ = optimize_speeds(
            sub, cons, states, ship_spec, tl, ga_cfg, n_legs=n_left, grid=grid, mask=mask
        )
    except Exception:
        return profile
    speeds = profile.speeds_kt.copy()
    speeds[k:] = new_tail.speeds_kt
    return SpeedProfile(speeds_kt=speeds, dt_h=dt_leg)


def _sub_route(route: Route, from_m: float) -> Route:
    """Tail of the route polyline starting at arc length ``from_m``."""
    cum = np.concatenate([[0.0], np.cumsum(route.segment_lengths_m)])
    start = route.point_at_distance(from_m)
    pts = [np.array([start.x, start.y])]
    for i, c in enumerate(cum):
        if c > from_m:
            pts.append(route.xy[i])
    if len(pts) < 2:
        pts.append(route.xy[-1])
    from .planner import Se2State

    waypoints = [Se2State(float(p[0]), float(p[1])) for p in pts]
    return Route(waypoints=waypoints, ref=route.ref)


def footprint(log: EventLog, eta_h: float | None = None) -> FootprintReport:
    """Per-mammal SEL from tick-level energy summation, plus the mean."""
    if log.times_h.size < 2:
        raise ValueError("footprint needs a log with at least two ticks")
    if log.nl_db.size == 0:
        raise ValueError("footprint needs at least one mammal in the log")
    dts = np.diff(log.times_h)                       # hours per interval
    energy = np.power(10.0, log.nl_db[:, :-1] / 10.0) @ dts
    sel = 10.0 * np.log10(energy)
    return FootprintReport(
        mammal_ids=list(log.mammal_ids),
        spl_series_db=log.nl_db,
        times_h=log.times_h,
        sel_total_db=sel,
        mean_sel_db=float(sel.mean()),
        eta_h=eta_h if eta_h is not None else float(log.times_h[-1]),
        tdt_nm=float(log.progress_nm[-1]),
    )


def compare(baseline: FootprintReport, optimized: FootprintReport) -> ComparisonTable:
    """Per-mammal and mean SEL deltas (optimized minus baseline)."""
    if baseline.mammal_ids != optimized.mammal_ids:
        raise ValueError(
            f"mammal id mismatch: {baseline.mammal_ids} vs {optimized.mammal_ids}"
        )
    rows = []
    for i, mid in enumerate(baseline.mammal_ids):
        b = float(baseline.sel_total_db[i])
        o = float(optimized.sel_total_db[i])
        rows.append(
            ComparisonRow(
                mammal_id=mid,
                baseline_sel_db=b,
                optimized_sel_db=o,
                delta_sel_db=o - b,
                percent_reduction=reduction_percent(b - o),
            )
        )
    delta_mean = optimized.mean_sel_db - baseline.mean_sel_db
    return ComparisonTable(
        rows=rows,
        baseline_mean_sel_db=baseline.mean_sel_db,
        optimized_mean_sel_db=optimized.mean_sel_db,
        delta_mean_sel_db=delta_mean,
        mean_percent_reduction=reduction_percent(-delta_mean),
        baseline_eta_h=baseline.eta_h,
        optimized_eta_h=optimized.eta_h,
        baseline_tdt_nm=baseline.tdt_nm,
        optimized_tdt_nm=optimized.tdt_nm,
    )


# --- persistence -------------------------------------------------------------------

def write_event_log_csv(path, log: EventLog) -> None:
    cols = ["t_h", "ship_lat", "ship_lon", "v_kt"]
    for mid in log.mammal_ids:
        cols += [f"m{mid}_lat", f"m{mid}_lon", f"m{mid}_depth", f"m{mid}_nl_db"]
    lines = [",".join(cols)]
    for i in range(log.times_h.size):
        row = [
            repr(float(log.times_h[i])),
            repr(float(log.ship_lat[i])),
            repr(float(log.ship_lon[i])),
            repr(float(log.v_kt[i])),
        ]
        for mi in range(len(log.mammal_ids)):
            row += [
                repr(float(log.mammal_lat[mi, i])),
                repr(float(log.mammal_lon[mi, i])),
                repr(float(log.mammal_depth[mi, i])),
                repr(float(log.nl_db[mi, i])),
            ]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_footprint_csv(path, report: FootprintReport) -> None:
    lines = ["mammal_id,sel_db"]
    for mid, sel in zip(report.mammal_ids, report.sel_total_db):
        lines.append(f"{mid},{float(sel)!r}")
    lines.append(f"mean,{report.mean_sel_db!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_comparison_csv(path, table: ComparisonTable) -> None:
    lines = ["mammal_id,baseline_sel_db,optimized_sel_db,delta_sel_db,percent_reduction"]
    for r in table.rows:
        lines.append(
            f"{r.mammal_id},{r.baseline_sel_db!r},{r.optimized_sel_db!r},"
            f"{r.delta_sel_db!r},{r.percent_reduction!r}"
        )
    lines.append(
        f"mean,{table.baseline_mean_sel_db!r},{table.optimized_mean_sel_db!r},"
        f"{table.delta_mean_sel_db!r},{table.mean_percent_reduction!r}"
    )
    Path(path).write_text("\n".join(lines) + "\n")


def comparison_summary(table: ComparisonTable) -> str:
    """Human-readable voyage comparison (ETA, TDT, mean SEL, delta)."""
    lines = [
        "voyage comparison",
        "=================",
        f"{'':>12} {'ETA (h)':>10} {'TDT (NM)':>10} {'J_s (dB re 1 uPa^2 h)':>24}",
        f"{'baseline':>12} {table.baseline_eta_h:>10.2f} {table.baseline_tdt_nm:>10.2f}"
        f" {table.baseline_mean_sel_db:>24.2f}",
        f"{'optimized':>12} {table.optimized_eta_h:>10.2f} {table.optimized_tdt_nm:>10.2f}"
        f" {table.optimized_mean_sel_db:>24.2f}",
        "",
        f"delta J_s: {table.delta_mean_sel_db:+.2f} dB"
        f" ({table.mean_percent_reduction:.2f}% exposure reduction)",
    ]
    for r in table.rows:
        lines.append(
            f"  mammal {r.mammal_id}: {r.delta_sel_db:+.2f} dB"
            f" ({r.percent_reduction:.2f}%)"
        )
    return "\n".join(lines)
