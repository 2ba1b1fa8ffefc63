"""Simulated mammal receivers: KDE-based initialization and linear-drift motion.

Positions are drawn from a kernel density fit of sighting data, depths from a
separate fit of dive-depth records.  During a voyage each mammal drifts on a
straight heading at constant speed, reflecting off coastlines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .geo import (
    METERS_PER_NM,
    BathymetryGrid,
    GeoPoint,
    PlanarPoint,
    RegionMask,
    from_planar,
    is_navigable,
)

MAX_MAMMAL_DEPTH_M = 100.0
DEFAULT_SPEED_RANGE_KT = (0.5, 2.5)
_REJECTION_BUDGET = 1000


class SamplingError(RuntimeError):
    """Raised when rejection sampling cannot place a point in navigable water."""


@dataclass(frozen=True)
class MammalState:
    """One simulated receiver: position/depth plus a drift velocity."""

    id: int
    position: GeoPoint
    speed_kt: float
    heading_deg: float

    def __post_init__(self):
        if self.speed_kt < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed_kt}")
        if not 0.0 <= self.position.depth <= MAX_MAMMAL_DEPTH_M:
            raise ValueError(f"depth {self.position.depth} outside [0, {MAX_MAMMAL_DEPTH_M}]")


@dataclass(frozen=True)
class KdeModel:
    """Gaussian product-kernel density estimate with per-dimension bandwidth."""

    points: np.ndarray     # n x d
    bandwidth: np.ndarray  # d

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def kde_fit(data: np.ndarray, bandwidth: str | float | Sequence[float] = "scott") -> KdeModel:
    """Fit a KDE; ``bandwidth`` is Scott's rule by default or explicit values.

    Scott's rule sets h_k = n^(-1/(d+4)) * std_k per dimension.  Dimensions
    with zero spread (or n = 1) get a tiny floor so the model stays a valid
    density.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    if data.shape[0] == 0:
        raise ValueError("kde_fit needs at least one data point")
    if not np.all(np.isfinite(data)):
        raise ValueError("kde_fit data must be finite")
    n, d = data.shape
    if isinstance(bandwidth, str):
        if bandwidth != "scott":
            raise ValueError(f"unknown bandwidth rule: {bandwidth}")
        h = n ** (-1.0 / (d + 4)) * data.std(axis=0, ddof=1 if n > 1 else 0)
        h[~np.isfinite(h) | (h <= 0)] = 1e-9
    elif np.isscalar(bandwidth):
        h = np.full(d, float(bandwidth))
    else:
        h = np.asarray(bandwidth, dtype=float)
        if h.shape != (d,):
            raise ValueError(f"bandwidth must have {d} entries")
    if np.any(h <= 0):
        raise ValueError("bandwidth must be positive")
    return KdeModel(points=data, bandwidth=h)


def kde_pdf(model: KdeModel, x: np.ndarray) -> float | np.ndarray:
    """Density at ``x`` (one point or m x d): mean of scaled Gaussian kernels."""
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    xs = np.atleast_2d(x)
    if xs.shape[1] != model.d:
        raise ValueError(f"query dimension {xs.shape[1]} != model dimension {model.d}")
    z = (xs[:, None, :] - model.points[None, :, :]) / model.bandwidth
    log_norm = -0.5 * model.d * math.log(2.0 * math.pi) - np.sum(np.log(model.bandwidth))
    dens = np.exp(log_norm - 0.5 * np.sum(z * z, axis=2)).mean(axis=1)
    return float(dens[0]) if single else dens


def kde_sample(
    model: KdeModel,
    count: int,
    rng: np.random.Generator,
    accept: Callable[[np.ndarray], bool] | None = None,
) -> np.ndarray:
    """Draw ``count`` points: pick a data point uniformly, add h-scaled noise.

    When ``accept`` is given, each draw is rejection-resampled until accepted,
    up to a fixed budget per point.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    out = np.empty((count, model.d))
    for i in range(count):
        for _ in range(_REJECTION_BUDGET):
            j = rng.integers(model.n)
            p = model.points[j] + rng.standard_normal(model.d) * model.bandwidth
            if accept is None or accept(p):
                out[i] = p
                break
        else:
            raise SamplingError(
                f"could not place sample {i + 1}/{count} in navigable water after "
                f"{_REJECTION_BUDGET} attempts near {model.points.mean(axis=0)}"
            )
    return out


def init_population(
    count: int,
    pos_model: KdeModel,
    depth_model: KdeModel,
    rng: np.random.Generator,
    grid: BathymetryGrid | None = None,
    mask: RegionMask | None = None,
    min_depth_m: float = 1.0,
    speed_range_kt: tuple[float, float] = DEFAULT_SPEED_RANGE_KT,
) -> list[MammalState]:
    """Initialize ``count`` mammals: KDE positions and depths, random drift.

    Depths are clamped to [0, 100] m.  Ids run 1..count.
    """
    if count < 1:
        raise ValueError("count must be >= 1")

    accept = None
    if grid is not None and mask is not None:
        def accept(p, _grid=grid, _mask=mask):
            lat, lon = float(p[0]), float(p[1])
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                return False
            gp = GeoPoint(lat, lon)
            return _grid.contains(gp) and is_navigable(gp, _mask, _grid, min_depth_m)

    positions = kde_sample(pos_model, count, rng, accept)
    depths = np.clip(kde_sample(depth_model, count, rng)[:, 0], 0.0, MAX_MAMMAL_DEPTH_M)
    lo, hi = speed_range_kt
    speeds = rng.uniform(lo, hi, size=count)
    headings = rng.uniform(0.0, 360.0, size=count)
    return [
        MammalState(
            id=i + 1,
            position=GeoPoint(float(positions[i, 0]), float(positions[i, 1]), float(depths[i])),
            speed_kt=float(speeds[i]),
            heading_deg=float(headings[i]),
        )
        for i in range(count)
    ]


def _displace(p: GeoPoint, dx_m: float, dy_m: float) -> GeoPoint:
    moved = from_planar(PlanarPoint(dx_m, dy_m), p, depth=p.depth)
    return moved


def step_trajectory(
    state: MammalState,
    dt_h: float,
    grid: BathymetryGrid | None = None,
    mask: RegionMask | None = None,
    min_depth_m: float = 1.0,
) -> MammalState:
    """Advance one drift step of ``speed * dt`` along the heading.

    If the target cell is not navigable the heading is mirrored about the
    blocked axis and the step retried once; if still blocked the mammal holds
    position (with the new heading).
    """
    if dt_h <= 0:
        raise ValueError("dt must be positive")
    if state.speed_kt == 0.0:
        return state
    dist_m = state.speed_kt * dt_h * METERS_PER_NM

    def try_heading(heading_deg: float) -> GeoPoint | None:
        th = math.radians(heading_deg)
        target = _displace(state.position, dist_m * math.sin(th), dist_m * math.cos(th))
        if grid is None or mask is None:
            return target
        if grid.contains(target) and is_navigable(target, mask, grid, min_depth_m):
            return target
        return None

    target = try_heading(state.heading_deg)
    if target is not None:
        return replace(state, position=target)

    # Mirror about whichever axis is blocked; fall back to a full reversal.
    th = math.radians(state.heading_deg)
    dx, dy = dist_m * math.sin(th), dist_m * math.cos(th)
    x_ok = _probe(state.position, dx, 0.0, grid, mask, min_depth_m)
    y_ok = _probe(state.position, 0.0, dy, grid, mask, min_depth_m)
    if not x_ok and y_ok:
        new_heading = (-state.heading_deg) % 360.0
    elif x_ok and not y_ok:
        new_heading = (180.0 - state.heading_deg) % 360.0
    else:
        new_heading = (state.heading_deg + 180.0) % 360.0

    target = try_heading(new_heading)
    if target is not None:
        return replace(state, position=target, heading_deg=new_heading)
    return replace(state, heading_deg=new_heading)


def _probe(p: GeoPoint, dx: float, dy: float, grid, mask, min_depth_m: float) -> bool:
    if grid is None or mask is None:
        return True
    target = _displace(p, dx, dy)
    return grid.contains(target) and is_navigable(target, mask, grid, min_depth_m)
