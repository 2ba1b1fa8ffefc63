"""Scenario configuration files, AIS track ingestion, and result bundles.

Scenario files are JSON with unit-suffixed keys (eta_h, length_ft, v_max_kt);
relative data paths resolve against the scenario file's directory.  The TL
cache directory is validated lazily by the commands that need it, so the same
file can drive cache precomputation.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geo import METERS_PER_NM, GeoPoint, planar_distance_m, to_planar
from .planner import Route, Se2State
from .source import ShipClass, ShipSpec
from .speed import SpeedProfile

MAX_AIS_GAP_S = 30 * 60


class ScenarioError(ValueError):
    """Structured scenario parse error naming the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class IngestError(ValueError):
    """Raised for malformed or gap-ridden baseline tracks."""


@dataclass
class ScenarioConfig:
    departure: GeoPoint
    destination: GeoPoint
    eta_h: float
    ship: ShipSpec
    bathymetry: Path
    lane_mask: Path | None
    sightings: Path | None
    dive_depths: Path | None
    tl_cache_dir: Path
    ais_track: Path | None = None
    mammal_count: int | None = None
    mammals: list[dict] | None = None
    seed_planner: int = 7
    seed_ga: int = 11
    seed_wildlife: int = 3
    n_legs: int = 24
    replan_cadence_h: float = 0.0
    min_depth_m: float = 15.0
    ga_population: int = 1000
    ga_max_generations: int = 120
    ga_time_budget_s: float = 240.0
    planner_batch_size: int = 150
    planner_max_batches: int = 4
    planner_time_budget_s: float = 55.0

    def serialize(self) -> dict:
        out = {
            "departure": {"lat": self.departure.lat, "lon": self.departure.lon},
            "destination": {"lat": self.destination.lat, "lon": self.destination.lon},
            "eta_h": self.eta_h,
            "ship": {
                "name": self.ship.name,
                "ais_type_id": self.ship.ais_type_id,
                "ship_class": self.ship.ship_class.value,
                "length_ft": self.ship.length_ft,
                "v_min_kt": self.ship.v_min_kt,
                "v_max_kt": self.ship.v_max_kt,
            },
            "data": {
                "bathymetry": str(self.bathymetry),
                "tl_cache_dir": str(self.tl_cache_dir),
            },
            "seeds": {
                "planner": self.seed_planner,
                "ga": self.seed_ga,
                "wildlife": self.seed_wildlife,
            },
            "n_legs": self.n_legs,
            "replan_cadence_h": self.replan_cadence_h,
            "min_depth_m": self.min_depth_m,
            "ga_population": self.ga_population,
            "ga_max_generations": self.ga_max_generations,
            "ga_time_budget_s": self.ga_time_budget_s,
            "planner_batch_size": self.planner_batch_size,
            "planner_max_batches": self.planner_max_batches,
            "planner_time_budget_s": self.planner_time_budget_s,
        }
        if self.lane_mask is not None:
            out["data"]["lane_mask"] = str(self.lane_mask)
        if self.sightings is not None:
            out["data"]["sightings"] = str(self.sightings)
        if self.dive_depths is not None:
            out["data"]["dive_depths"] = str(self.dive_depths)
        if self.ais_track is not None:
            out["ais_track"] = str(self.ais_track)
        if self.mammals is not None:
            out["mammals"] = self.mammals
        elif self.mammal_count is not None:
            out["mammal_count"] = self.mammal_count
        return out


def _require(obj: dict, key: str, kind, parent: str = ""):
    name = f"{parent}{key}"
    if key not in obj:
        raise ScenarioError(name, "missing required key")
    val = obj[key]
    if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
        return float(val)
    if kind is int and isinstance(val, int) and not isinstance(val, bool):
        return val
    if not isinstance(val, kind):
        raise ScenarioError(name, f"expected {kind.__name__}, got {type(val).__name__}")
    return val


def _geopoint(obj: dict, key: str) -> GeoPoint:
    sub = _require(obj, key, dict)
    lat = _require(sub, "lat", float, f"{key}.")
    lon = _require(sub, "lon", float, f"{key}.")
    try:
        return GeoPoint(lat, lon)
    except ValueError as exc:
        raise ScenarioError(key, str(exc)) from exc


def parse_scenario(path: str | Path) -> ScenarioConfig:
    """Load and validate a scenario file, applying explicit defaults."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(str(path), "scenario file not found")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(str(path), f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return config_from_dict(raw, path.parent)


def config_from_dict(raw: dict, base: Path) -> ScenarioConfig:
    """Validate a scenario dict; relative paths resolve against ``base``."""
    departure = _geopoint(raw, "departure")
    destination = _geopoint(raw, "destination")
    if (departure.lat, departure.lon) == (destination.lat, destination.lon):
        raise ScenarioError("destination", "must differ from departure")
    eta_h = _require(raw, "eta_h", float)
    if eta_h <= 0:
        raise ScenarioError("eta_h", f"must be positive, got {eta_h}")

    ship_raw = _require(raw, "ship", dict)
    cls_name = _require(ship_raw, "ship_class", str, "ship.")
    try:
        ship_class = ShipClass(cls_name)
    except ValueError:
        raise ScenarioError(
            "ship.ship_class",
            f"unknown class {cls_name!r}; expected one of "
            f"{sorted(c.value for c in ShipClass)}",
        ) from None
    try:
        ship = ShipSpec(
            name=_require(ship_raw, "name", str, "ship."),
            ais_type_id=_require(ship_raw, "ais_type_id", int, "ship."),
            ship_class=ship_class,
            length_ft=_require(ship_raw, "length_ft", float, "ship."),
            v_min_kt=_require(ship_raw, "v_min_kt", float, "ship."),
            v_max_kt=_require(ship_raw, "v_max_kt", float, "ship."),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError("ship", str(exc)) from exc

    data = _require(raw, "data", dict)

    def resolve(key: str, required: bool, must_exist: bool = True) -> Path | None:
        if key not in data:
            if required:
                raise ScenarioError(f"data.{key}", "missing required key")
            return None
        p = Path(data[key])
        if not p.is_absolute():
            p = (base / p).resolve()
        if must_exist and not p.exists():
            raise ScenarioError(f"data.{key}", f"path does not exist: {p}")
        return p

    bathymetry = resolve("bathymetry", required=True)
    lane_mask = resolve("lane_mask", required=False)
    sightings = resolve("sightings", required=False)
    dive_depths = resolve("dive_depths", required=False)
    tl_cache_dir = resolve("tl_cache_dir", required=True, must_exist=False)

    ais_track = None
    if "ais_track" in raw:
        p = Path(raw["ais_track"])
        if not p.is_absolute():
            p = (base / p).resolve()
        if not p.exists():
            raise ScenarioError("ais_track", f"path does not exist: {p}")
        ais_track = p

    mammal_count = raw.get("mammal_count")
    mammals = raw.get("mammals")
    if mammals is not None and mammal_count is not None:
        warnings.warn("both mammals and mammal_count given; explicit mammals win")
        mammal_count = None
    if mammals is not None:
        for i, m in enumerate(mammals):
            for k in ("lat", "lon", "depth_m"):
                _require(m, k, float, f"mammals[{i}].")
    elif mammal_count is not None:
        if not isinstance(mammal_count, int) or mammal_count < 0:
            raise ScenarioError("mammal_count", f"must be a non-negative integer")
        if mammal_count > 0 and (sightings is None or dive_depths is None):
            raise ScenarioError(
                "mammal_count", "needs data.sightings and data.dive_depths for sampling"
            )

    seeds = raw.get("seeds", {})

    cfg = ScenarioConfig(
        departure=departure,
        destination=destination,
        eta_h=eta_h,
        ship=ship,
        bathymetry=bathymetry,
        lane_mask=lane_mask,
        sightings=sightings,
        dive_depths=dive_depths,
        tl_cache_dir=tl_cache_dir,
        ais_track=ais_track,
        mammal_count=mammal_count,
        mammals=mammals,
        seed_planner=int(seeds.get("planner", 7)),
        seed_ga=int(seeds.get("ga", 11)),
        seed_wildlife=int(seeds.get("wildlife", 3)),
        n_legs=int(raw.get("n_legs", 24)),
        replan_cadence_h=float(raw.get("replan_cadence_h", 0.0)),
        min_depth_m=float(raw.get("min_depth_m", 15.0)),
        ga_population=int(raw.get("ga_population", 1000)),
        ga_max_generations=int(raw.get("ga_max_generations", 120)),
        ga_time_budget_s=float(raw.get("ga_time_budget_s", 240.0)),
        planner_batch_size=int(raw.get("planner_batch_size", 150)),
        planner_max_batches=int(raw.get("planner_max_batches", 4)),
        planner_time_budget_s=float(raw.get("planner_time_budget_s", 55.0)),
    )
    if cfg.n_legs < 2:
        raise ScenarioError("n_legs", "must be at least 2")
    return cfg


# --- AIS ingestion -----------------------------------------------------------------

@dataclass
class AisTrack:
    timestamps_s: np.ndarray
    lat: np.ndarray
    lon: np.ndarray
    sog_kt: np.ndarray

    @property
    def duration_h(self) -> float:
        return float(self.timestamps_s[-1] - self.timestamps_s[0]) / 3600.0


def read_ais_track(path: str | Path) -> AisTrack:
    """Parse a (timestamp_s, lat, lon, sog_kt) CSV; blank speeds interpolate.

    A recording dropout (an interval well above the track's own cadence) longer
    than 30 minutes is an error; a uniformly sampled track is never a dropout,
    whatever its cadence.
    """
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("timestamp_s"):
        raise IngestError(f"{path}: expected header timestamp_s,lat,lon,sog_kt")
    ts, lat, lon, sog = [], [], [], []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise IngestError(f"{path}:{ln}: expected 4 fields, got {len(parts)}")
        ts.append(float(parts[0]))
        lat.append(float(parts[1]))
        lon.append(float(parts[2]))
        sog.append(float(parts[3]) if parts[3].strip() else math.nan)
    if len(ts) < 2:
        raise IngestError(f"{path}: need at least 2 records, got {len(ts)}")
    t = np.array(ts)
    if np.any(np.diff(t) <= 0):
        bad = int(np.flatnonzero(np.diff(t) <= 0)[0]) + 2
        raise IngestError(f"{path}: timestamps not strictly increasing at line {bad}")
    gaps = np.diff(t)
    median_dt = float(np.median(gaps))
    too_big = np.flatnonzero((gaps > 2.0 * median_dt) & (gaps > MAX_AIS_GAP_S))
    if too_big.size:
        spans = ", ".join(
            f"[{t[i]:.0f}s .. {t[i + 1]:.0f}s]" for i in too_big[:5]
        )
        raise IngestError(f"{path}: gaps over {MAX_AIS_GAP_S / 60:.0f} min at {spans}")
    sog_arr = np.array(sog)
    missing = np.isnan(sog_arr)
    if np.all(missing):
        raise IngestError(f"{path}: every sog value is missing")
    if np.any(missing):
        good = ~missing
        sog_arr[missing] = np.interp(t[missing], t[good], sog_arr[good])
    if np.any(sog_arr < 0):
        raise IngestError(f"{path}: negative sog values")
    return AisTrack(timestamps_s=t, lat=np.array(lat), lon=np.array(lon), sog_kt=sog_arr)


def ingest_ais(path: str | Path, n_legs: int = 24) -> tuple[Route, SpeedProfile, dict]:
    """Baseline route and per-leg profile from an AIS track.

    Leg speeds come from the distance actually covered per leg interval, so
    the profile's total distance equals the track polyline length exactly.
    Returns (route, profile, info) with derived eta_h and tdt_nm.
    """
    track = read_ais_track(path)
    ref = GeoPoint(track.lat[0], track.lon[0])
    k = math.pi / 180.0 * 6_371_000.0
    x = (track.lon - ref.lon) * k * math.cos(math.radians(ref.lat))
    y = (track.lat - ref.lat) * k
    seg = np.hypot(np.diff(x), np.diff(y))
    cum_m = np.concatenate([[0.0], np.cumsum(seg)])
    total_nm = cum_m[-1] / METERS_PER_NM
    eta_h = track.duration_h
    if eta_h <= 0:
        raise IngestError(f"{path}: zero-duration track")

    waypoints = [Se2State(float(px), float(py)) for px, py in zip(x, y)]
    route = Route(waypoints=waypoints, ref=ref)

    t_rel_h = (track.timestamps_s - track.timestamps_s[0]) / 3600.0
    dt = eta_h / n_legs
    bounds = np.linspace(0.0, eta_h, n_legs + 1)
    dist_at = np.interp(bounds, t_rel_h, cum_m) / METERS_PER_NM
    speeds = np.diff(dist_at) / dt
    profile = SpeedProfile(speeds_kt=speeds, dt_h=dt)
    info = {"eta_h": eta_h, "tdt_nm": total_nm, "n_records": int(track.timestamps_s.size)}
    return route, profile, info


# --- result bundle -----------------------------------------------------------------

@dataclass
class ResultBundle:
    """Everything one optimization run produces, reproducible from config+seeds."""

    config: dict
    baseline_route_csv: list[dict]
    optimized_route_csv: list[dict]
    baseline_profile_csv: list[dict]
    optimized_profile_csv: list[dict]
    baseline_footprint: dict
    optimized_footprint: dict
    comparison: dict
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "baseline_route": self.baseline_route_csv,
            "optimized_route": self.optimized_route_csv,
            "baseline_profile": self.baseline_profile_csv,
            "optimized_profile": self.optimized_profile_csv,
            "baseline_footprint": self.baseline_footprint,
            "optimized_footprint": self.optimized_footprint,
            "comparison": self.comparison,
            "metadata": self.metadata,
        }
