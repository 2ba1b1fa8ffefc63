"""Bundled synthetic study region and scenario fixtures.

Everything here is generated deterministically: a strait-like bathymetry box
with one elongated island, lane masks, sighting and dive-depth samples, a
synthetic baseline track, and ready-to-run scenario files.  The formats match
the engine's external interfaces exactly, so the same loaders serve real data.

Regenerate with::

    python -m quietvoyage.fixtures <output-dir>
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .geo import (
    METERS_PER_NM,
    BathymetryGrid,
    GeoPoint,
    PlanarPoint,
    RegionMask,
    from_planar,
    to_planar,
    write_ascii_grid,
    write_mask,
)

# Region box: a ~1.4 x 2.8 degree strait-like area.
LAT_MIN, LON_MIN = 48.0, -125.4
CELL_DEG = 0.01
ROWS, COLS = 141, 281

#: Pinned receiver used by the single-mammal scenarios.
PINNED_MAMMAL = {"lat": 48.646343, "lon": -123.313054, "depth_m": 1.0}

#: Short-voyage scenario: the lane passes the pinned mammal 2.5 km abeam with
#: flanking islands that shadow everything except the abeam window.
STRAIT_DEPARTURE = (48.80, -123.60)
STRAIT_LENGTH_M = 44_000.0
STRAIT_ETA_H = 2.0
MAMMAL_ABEAM_M = 2_500.0
ISLAND_T_M = (800.0, 1_700.0)       # cross-track band of the flanking islands
ISLAND_S_GAP_M = 5_000.0            # half-width of the exposed abeam window
ISLAND_S_END_M = 20_000.0           # along-track extent of each island

#: Long-voyage scenario endpoints and published-style voyage configuration.
LONG_DEPARTURE = (49.20, -125.00)
LONG_DESTINATION = (48.25, -122.90)
LONG_ETA_H = 12.36
LONG_TDT_NM = 156.91

SHIP_SPEC = {
    "name": "carrier_a",
    "ais_type_id": 0,
    "ship_class": "Other",
    "length_ft": 684.97,
    "v_min_kt": 8.0,
    "v_max_kt": 16.0,
}


def _strait_axis() -> tuple[np.ndarray, np.ndarray, float]:
    """Unit along-track vector, planar mammal position, and its along-track s.

    The axis starts at the departure point and is rotated so the pinned mammal
    sits exactly ``MAMMAL_ABEAM_M`` to port.
    """
    dep = GeoPoint(*STRAIT_DEPARTURE)
    m = to_planar(GeoPoint(PINNED_MAMMAL["lat"], PINNED_MAMMAL["lon"]), dep)
    mv = np.array([m.x, m.y])
    dist = float(np.linalg.norm(mv))
    phi = math.asin(MAMMAL_ABEAM_M / dist)
    c, s = math.cos(-phi), math.sin(-phi)
    u = np.array([c * mv[0] - s * mv[1], s * mv[0] + c * mv[1]]) / dist
    # cross-track of the mammal must come out positive (port side)
    if u[0] * mv[1] - u[1] * mv[0] < 0:
        c, s = math.cos(phi), math.sin(phi)
        u = np.array([c * mv[0] - s * mv[1], s * mv[0] + c * mv[1]]) / dist
    s_m = float(np.dot(mv, u))
    return u, mv, s_m


def strait_destination() -> tuple[float, float]:
    dep = GeoPoint(*STRAIT_DEPARTURE)
    u, _, _ = _strait_axis()
    g = from_planar(PlanarPoint(u[0] * STRAIT_LENGTH_M, u[1] * STRAIT_LENGTH_M), dep)
    return (round(g.lat, 6), round(g.lon, 6))


def make_region() -> tuple[BathymetryGrid, np.ndarray]:
    """Build the synthetic bathymetry grid and lane mask (as a bool array)."""
    lat = LAT_MIN + np.arange(ROWS) * CELL_DEG
    lon = LON_MIN + np.arange(COLS) * CELL_DEG
    glat, glon = np.meshgrid(lat, lon, indexing="ij")
    depth = 180.0 + 60.0 * np.sin(2 * np.pi * (glat - 48.0) / 0.7) * np.cos(
        2 * np.pi * (glon + 125.4) / 1.1
    )
    depth = np.round(depth, 2)

    # Flanking islands in the short-voyage lane's axis frame: they shadow the
    # track's long limbs from the pinned mammal, leaving the abeam window lit.
    dep = GeoPoint(*STRAIT_DEPARTURE)
    u, _, s_m = _strait_axis()
    k = math.pi / 180.0 * 6_371_000.0
    cx = (glon - dep.lon) * k * math.cos(math.radians(dep.lat))
    cy = (glat - dep.lat) * k
    s = cx * u[0] + cy * u[1]
    t = -cx * u[1] + cy * u[0]  # positive on the mammal's side
    in_t = (t >= ISLAND_T_M[0]) & (t <= ISLAND_T_M[1])
    ds = s - s_m
    in_s = (np.abs(ds) >= ISLAND_S_GAP_M) & (np.abs(ds) <= ISLAND_S_END_M)
    depth[in_t & in_s] = -40.0
    # A small decorative islet well away from the lane.
    depth[110:113, 80:82] = -25.0

    grid = BathymetryGrid(GeoPoint(LAT_MIN, LON_MIN), CELL_DEG, depth)
    lane = depth > 0
    lane[:3, :] = False
    lane[-3:, :] = False
    lane[:, :3] = False
    lane[:, -3:] = False
    return grid, lane


def region_mask(grid: BathymetryGrid, lane: np.ndarray) -> RegionMask:
    return RegionMask.from_grid(grid, lane)


def _sightings(rng: np.random.Generator) -> np.ndarray:
    """Clustered sighting points in open water, (lat, lon) rows."""
    hotspots = [(48.55, -123.25, 0.04), (48.75, -123.45, 0.05), (48.40, -123.15, 0.03)]
    pts = []
    for clat, clon, spread in hotspots:
        n = 40
        pts.append(
            np.column_stack(
                [rng.normal(clat, spread, n), rng.normal(clon, spread * 1.4, n)]
            )
        )
    return np.vstack(pts)


def _dive_depths(rng: np.random.Generator) -> np.ndarray:
    d = rng.lognormal(mean=3.0, sigma=0.6, size=150)
    return np.clip(d, 2.0, 98.0)


def _long_track_points() -> list[tuple[float, float]]:
    """Dog-legged track whose planar length is scaled to LONG_TDT_NM."""
    dep = GeoPoint(*LONG_DEPARTURE)
    via = [
        LONG_DEPARTURE,
        (48.95, -124.35),
        (48.72, -123.85),
        (48.58, -123.42),
        (48.47, -123.18),
        LONG_DESTINATION,
    ]
    pts = [to_planar(GeoPoint(la, lo), dep) for la, lo in via]
    xy = np.array([[p.x, p.y] for p in pts])
    seg = np.hypot(*np.diff(xy, axis=0).T)
    length_m = seg.sum()
    scale = (LONG_TDT_NM * METERS_PER_NM) / length_m
    xy *= scale
    out = []
    for x, y in xy:
        g = from_planar(PlanarPoint(float(x), float(y)), dep)
        out.append((g.lat, g.lon))
    return out


def _ais_track_rows() -> list[tuple[int, float, float, float]]:
    """(timestamp_s, lat, lon, sog_kt) sampled every 3 minutes."""
    dep = GeoPoint(*LONG_DEPARTURE)
    via = _long_track_points()
    xy = np.array([[to_planar(GeoPoint(la, lo), dep).x,
                    to_planar(GeoPoint(la, lo), dep).y] for la, lo in via])
    seg = np.hypot(*np.diff(xy, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total_m = cum[-1]

    dt_h = 3.0 / 60.0
    n = int(round(LONG_ETA_H / dt_h)) + 1
    t = np.linspace(0.0, LONG_ETA_H, n)
    v_mean = total_m / METERS_PER_NM / LONG_ETA_H
    raw = 1.0 + 0.12 * np.sin(2 * np.pi * t / LONG_ETA_H * 3.0)
    mid = 0.5 * (raw[:-1] + raw[1:])
    dist = np.concatenate([[0.0], np.cumsum(mid)])
    dist *= total_m / dist[-1]                      # normalize to exact length
    speeds_kt = v_mean * raw

    rows = []
    t0 = 1_700_000_000  # fixed epoch for determinism
    for i in range(n):
        x = np.interp(dist[i], cum, xy[:, 0])
        y = np.interp(dist[i], cum, xy[:, 1])
        g = from_planar(PlanarPoint(float(x), float(y)), dep)
        rows.append((t0 + int(round(t[i] * 3600)), g.lat, g.lon, float(speeds_kt[i])))
    return rows


def _scenario(
    departure, destination, eta_h, data_dir: str, mammals, seeds, **extra
) -> dict:
    cfg = {
        "departure": {"lat": departure[0], "lon": departure[1]},
        "destination": {"lat": destination[0], "lon": destination[1]},
        "eta_h": eta_h,
        "ship": dict(SHIP_SPEC),
        "data": {
            "bathymetry": f"{data_dir}/bathymetry.asc",
            "lane_mask": f"{data_dir}/lane_mask.asc",
            "sightings": f"{data_dir}/sightings.csv",
            "dive_depths": f"{data_dir}/dive_depths.csv",
            "tl_cache_dir": f"{data_dir}/tl_cache_strait",
        },
        "seeds": {"planner": 7, "ga": 11, "wildlife": 3},
        "n_legs": 24,
        "replan_cadence_h": 0.0,
        "min_depth_m": 15.0,
    }
    if isinstance(mammals, int):
        cfg["mammal_count"] = mammals
    else:
        cfg["mammals"] = mammals
    cfg["seeds"].update(seeds)
    cfg.update(extra)
    return cfg


def strait_sources() -> list[GeoPoint]:
    """TL-cache source positions along the short-voyage lane."""
    dep = GeoPoint(*STRAIT_DEPARTURE)
    dst = GeoPoint(*strait_destination())
    end = to_planar(dst, dep)
    n = STRAIT_CACHE_SOURCES
    out = []
    for i in range(n):
        f = i / (n - 1)
        out.append(from_planar(PlanarPoint(end.x * f, end.y * f), dep))
    return out


# Dense source line: the surrogate's along-lane resolution is set by the
# source spacing, which must stay well under the exposed-window width.
STRAIT_CACHE_RADIUS_M = 25_000.0
STRAIT_CACHE_NODES = 150
STRAIT_CACHE_SOURCES = 30
STRAIT_CACHE_DEPTHS = (1.0, 50.0, 100.0)


def write_fixture_tree(out_dir: str | Path) -> dict:
    """Write every fixture file; returns a manifest of paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20_25)

    grid, lane = make_region()
    mask = region_mask(grid, lane)
    from .geo import is_navigable

    for name, (la, lo) in (
        ("mammal", (PINNED_MAMMAL["lat"], PINNED_MAMMAL["lon"])),
        ("departure", STRAIT_DEPARTURE),
        ("destination", strait_destination()),
        ("long departure", LONG_DEPARTURE),
        ("long destination", LONG_DESTINATION),
    ):
        if not is_navigable(GeoPoint(la, lo), mask, grid, 15.0):
            raise RuntimeError(f"fixture invariant broken: {name} not navigable")
    write_ascii_grid(out / "bathymetry.asc", grid)
    write_mask(out / "lane_mask.asc", grid, lane)

    s = _sightings(rng)
    lines = ["lat,lon"] + [
        f"{round(float(la), 6)!r},{round(float(lo), 6)!r}" for la, lo in s
    ]
    (out / "sightings.csv").write_text("\n".join(lines) + "\n")

    d = _dive_depths(rng)
    lines = ["max_depth_m"] + [repr(round(float(v), 2)) for v in d]
    (out / "dive_depths.csv").write_text("\n".join(lines) + "\n")

    rows = _ais_track_rows()
    lines = ["timestamp_s,lat,lon,sog_kt"] + [
        f"{ts},{round(la, 6)!r},{round(lo, 6)!r},{round(sog, 3)!r}" for ts, la, lo, sog in rows
    ]
    (out / "ais_track.csv").write_text("\n".join(lines) + "\n")

    dst = strait_destination()
    strait = _scenario(
        STRAIT_DEPARTURE,
        dst,
        STRAIT_ETA_H,
        ".",
        [dict(PINNED_MAMMAL)],
        seeds={},
        ga_population=400,
        ga_max_generations=80,
    )
    (out / "strait_m1.json").write_text(json.dumps(strait, indent=2) + "\n")

    strait_m5 = _scenario(
        STRAIT_DEPARTURE, dst, STRAIT_ETA_H, ".", 5, seeds={},
        ga_population=400, ga_max_generations=80,
    )
    (out / "strait_m5.json").write_text(json.dumps(strait_m5, indent=2) + "\n")

    long_m1 = _scenario(
        LONG_DEPARTURE,
        LONG_DESTINATION,
        LONG_ETA_H,
        ".",
        [dict(PINNED_MAMMAL)],
        seeds={},
        ais_track="./ais_track.csv",
    )
    (out / "c1_m1.json").write_text(json.dumps(long_m1, indent=2) + "\n")

    return {
        "bathymetry": str(out / "bathymetry.asc"),
        "lane_mask": str(out / "lane_mask.asc"),
        "sightings": str(out / "sightings.csv"),
        "dive_depths": str(out / "dive_depths.csv"),
        "ais_track": str(out / "ais_track.csv"),
        "scenarios": [
            str(out / "strait_m1.json"),
            str(out / "strait_m5.json"),
            str(out / "c1_m1.json"),
        ],
    }


def build_strait_cache(out_dir: str | Path, fixture_dir: str | Path) -> None:
    """Precompute and persist the TL cache for the strait scenarios."""
    from .propagation import LatticeSpec, precompute_field, write_cache
    from .geo import read_ascii_grid

    grid = read_ascii_grid(Path(fixture_dir) / "bathymetry.asc")
    lattice = LatticeSpec(
        radius_m=STRAIT_CACHE_RADIUS_M,
        n_nodes=STRAIT_CACHE_NODES,
        depths_m=STRAIT_CACHE_DEPTHS,
        min_range_m=600.0,
    )
    cache = precompute_field(strait_sources(), STRAIT_CACHE_RADIUS_M, grid, lattice)
    write_cache(out_dir, cache)


def main(argv=None) -> int:
    import argparse

    ap = argparse.ArgumentParser(description="generate the bundled synthetic fixtures")
    ap.add_argument("out_dir")
    ap.add_argument("--with-cache", action="store_true",
                    help="also precompute the strait TL cache (slower)")
    args = ap.parse_args(argv)
    manifest = write_fixture_tree(args.out_dir)
    if args.with_cache:
        build_strait_cache(Path(args.out_dir) / "tl_cache_strait", args.out_dir)
    print(json.dumps(manifest, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
