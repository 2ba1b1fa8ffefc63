"""Geographic primitives: planar projection, bathymetry grid, masks, terrain occlusion.

All engine geometry lives on an equirectangular plane anchored at a reference
point (the departure coordinate).  The study regions handled here span less
than a few degrees, where the projection distortion is well under 0.5%.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EARTH_RADIUS_M = 6_371_000.0
METERS_PER_NM = 1852.0
LOS_STEP_M = 250.0


class CoordinateError(ValueError):
    """Raised for non-finite or out-of-domain coordinates."""


class GridRangeError(ValueError):
    """Raised when a query point falls outside the grid bounds."""


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude in degrees, depth in meters below the surface."""

    lat: float
    lon: float
    depth: float = 0.0

    def __post_init__(self):
        for name in ("lat", "lon", "depth"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.lat) and math.isfinite(self.lon) and math.isfinite(self.depth)):
            raise CoordinateError(f"non-finite coordinate: {self!r}")
        if not -90.0 <= self.lat <= 90.0:
            raise CoordinateError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise CoordinateError(f"longitude {self.lon} outside [-180, 180]")
        if self.depth < 0.0:
            raise CoordinateError(f"depth {self.depth} must be >= 0")


@dataclass(frozen=True)
class PlanarPoint:
    """Meters east (x) and north (y) of the projection reference."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise CoordinateError(f"non-finite planar point: {self!r}")


def to_planar(p: GeoPoint, ref: GeoPoint) -> PlanarPoint:
    """Project ``p`` onto the local equirectangular plane about ``ref``.

    x = (lon - ref.lon) * pi/180 * R * cos(ref.lat),  y = (lat - ref.lat) * pi/180 * R.
    """
    if abs(p.lat) >= 89.0:
        raise CoordinateError(f"latitude {p.lat} too close to the pole for planar projection")
    k = math.pi / 180.0 * EARTH_RADIUS_M
    x = (p.lon - ref.lon) * k * math.cos(math.radians(ref.lat))
    y = (p.lat - ref.lat) * k
    return PlanarPoint(x, y)


def from_planar(pp: PlanarPoint, ref: GeoPoint, depth: float = 0.0) -> GeoPoint:
    """Inverse of :func:`to_planar` about the same reference."""
    k = math.pi / 180.0 * EARTH_RADIUS_M
    lat = ref.lat + pp.y / k
    lon = ref.lon + pp.x / (k * math.cos(math.radians(ref.lat)))
    return GeoPoint(lat, lon, depth)


def planar_distance_m(a: GeoPoint, b: GeoPoint) -> float:
    """Horizontal distance in meters on the equirectangular plane about ``a``."""
    pb = to_planar(b, a)
    return math.hypot(pb.x, pb.y)


class BathymetryGrid:
    """Regular lat/lon grid of depths; positive values are water depth in
    meters, negative values are land elevation.

    ``origin`` is the south-west node; row 0 of ``depth`` is the southernmost
    row (ESRI ASCII files store north-first and are flipped on load).
    """

    def __init__(self, origin: GeoPoint, cell_size: float, depth: np.ndarray):
        depth = np.asarray(depth, dtype=float)
        if depth.ndim != 2 or depth.size == 0:
            raise ValueError("depth must be a non-empty 2-D matrix")
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        if not np.all(np.isfinite(depth)):
            raise ValueError("depth values must be finite")
        self.origin = origin
        self.cell_size = float(cell_size)
        self.depth = depth
        self.rows, self.cols = depth.shape

    @property
    def lat_max(self) -> float:
        return self.origin.lat + (self.rows - 1) * self.cell_size

    @property
    def lon_max(self) -> float:
        return self.origin.lon + (self.cols - 1) * self.cell_size

    def contains(self, p: GeoPoint) -> bool:
        return (
            self.origin.lat <= p.lat <= self.lat_max
            and self.origin.lon <= p.lon <= self.lon_max
        )

    def _fractional_index(self, lat, lon):
        r = (np.asarray(lat) - self.origin.lat) / self.cell_size
        c = (np.asarray(lon) - self.origin.lon) / self.cell_size
        return r, c

    def depth_at(self, p: GeoPoint) -> float:
        """Bilinear interpolation of the four surrounding grid nodes."""
        if not self.contains(p):
            raise GridRangeError(f"point {p.lat:.6f},{p.lon:.6f} outside grid bounds")
        return float(self.depth_at_arrays(np.array([p.lat]), np.array([p.lon]))[0])

    def depth_at_arrays(self, lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
        """Vectorized bilinear depth lookup; inputs must be inside bounds."""
        r, c = self._fractional_index(lat, lon)
        r0 = np.clip(np.floor(r).astype(int), 0, self.rows - 2) if self.rows > 1 else np.zeros_like(r, dtype=int)
        c0 = np.clip(np.floor(c).astype(int), 0, self.cols - 2) if self.cols > 1 else np.zeros_like(c, dtype=int)
        fr = r - r0
        fc = c - c0
        r1 = np.minimum(r0 + 1, self.rows - 1)
        c1 = np.minimum(c0 + 1, self.cols - 1)
        d00 = self.depth[r0, c0]
        d01 = self.depth[r0, c1]
        d10 = self.depth[r1, c0]
        d11 = self.depth[r1, c1]
        return (
            d00 * (1 - fr) * (1 - fc)
            + d01 * (1 - fr) * fc
            + d10 * fr * (1 - fc)
            + d11 * fr * fc
        )

    def is_land_at_arrays(self, lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
        """Nearest-cell land test (depth < 0) for occlusion sampling."""
        r, c = self._fractional_index(lat, lon)
        ri = np.clip(np.rint(r).astype(int), 0, self.rows - 1)
        ci = np.clip(np.rint(c).astype(int), 0, self.cols - 1)
        return self.depth[ri, ci] < 0.0


class RegionMask:
    """Boolean land/lane layers aligned with a :class:`BathymetryGrid`."""

    def __init__(self, is_land: np.ndarray, is_lane: np.ndarray):
        is_land = np.asarray(is_land, dtype=bool)
        is_lane = np.asarray(is_lane, dtype=bool)
        if is_land.shape != is_lane.shape:
            raise ValueError("is_land and is_lane must share a shape")
        if np.any(is_land & is_lane):
            raise ValueError("is_land and is_lane must be disjoint per cell")
        self.is_land = is_land
        self.is_lane = is_lane

    @classmethod
    def from_grid(cls, grid: BathymetryGrid, is_lane: np.ndarray | None = None) -> "RegionMask":
        land = grid.depth < 0.0
        lane = ~land if is_lane is None else (np.asarray(is_lane, dtype=bool) & ~land)
        return cls(land, lane)


def _cell_index(grid: BathymetryGrid, p: GeoPoint) -> tuple[int, int]:
    if not grid.contains(p):
        raise GridRangeError(f"point {p.lat:.6f},{p.lon:.6f} outside grid bounds")
    r = int(round((p.lat - grid.origin.lat) / grid.cell_size))
    c = int(round((p.lon - grid.origin.lon) / grid.cell_size))
    return min(max(r, 0), grid.rows - 1), min(max(c, 0), grid.cols - 1)


def is_navigable(p: GeoPoint, mask: RegionMask, grid: BathymetryGrid, min_depth: float) -> bool:
    """True iff the cell under ``p`` is lane, not land, and deep enough."""
    r, c = _cell_index(grid, p)
    if mask.is_land[r, c] or not mask.is_lane[r, c]:
        return False
    return grid.depth_at(p) >= min_depth


def is_navigable_arrays(
    lat: np.ndarray,
    lon: np.ndarray,
    mask: RegionMask,
    grid: BathymetryGrid,
    min_depth: float,
) -> np.ndarray:
    """Vectorized navigability; points outside the grid are non-navigable."""
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    inside = (
        (lat >= grid.origin.lat)
        & (lat <= grid.lat_max)
        & (lon >= grid.origin.lon)
        & (lon <= grid.lon_max)
    )
    ok = np.zeros(lat.shape, dtype=bool)
    if not np.any(inside):
        return ok
    la = lat[inside]
    lo = lon[inside]
    r = np.clip(np.rint((la - grid.origin.lat) / grid.cell_size).astype(int), 0, grid.rows - 1)
    c = np.clip(np.rint((lo - grid.origin.lon) / grid.cell_size).astype(int), 0, grid.cols - 1)
    good = mask.is_lane[r, c] & ~mask.is_land[r, c]
    deep = grid.depth_at_arrays(la, lo) >= min_depth
    ok[inside] = good & deep
    return ok


def blocked_fraction(src: GeoPoint, rcv: GeoPoint, grid: BathymetryGrid) -> float:
    """Fraction of samples along the src-rcv segment whose cell is land.

    Samples are spaced every <= 250 m including both endpoints, so the result
    is symmetric in the endpoints and lies in [0, 1].
    """
    for p in (src, rcv):
        if not grid.contains(p):
            raise GridRangeError(f"point {p.lat:.6f},{p.lon:.6f} outside grid bounds")
    # midpoint-latitude scaling keeps the distance, and therefore the sample
    # count, exactly symmetric in the endpoints
    k = math.pi / 180.0 * EARTH_RADIUS_M
    dx = (rcv.lon - src.lon) * k * math.cos(math.radians((src.lat + rcv.lat) / 2.0))
    dy = (rcv.lat - src.lat) * k
    dist = math.hypot(dx, dy)
    n = max(2, int(math.ceil(dist / LOS_STEP_M)) + 1)
    lats = np.linspace(src.lat, rcv.lat, n)
    lons = np.linspace(src.lon, rcv.lon, n)
    land = grid.is_land_at_arrays(lats, lons)
    return float(np.count_nonzero(land)) / n


# --- ESRI-ASCII-style grid I/O -------------------------------------------------

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value")


def read_ascii_grid(path: str | Path) -> BathymetryGrid:
    """Load an ESRI-ASCII-style grid (header + row-major values, north first)."""
    text = Path(path).read_text().split()
    header: dict[str, float] = {}
    i = 0
    while i + 1 < len(text) and text[i][0].isalpha():
        header[text[i]] = float(text[i + 1])
        i += 2
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise ValueError(f"grid file {path} missing header keys: {missing}")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    vals = np.array([float(v) for v in text[i:]], dtype=float)
    if vals.size != nrows * ncols:
        raise ValueError(f"grid file {path}: expected {nrows * ncols} values, got {vals.size}")
    nodata = header["NODATA_value"]
    vals[vals == nodata] = np.nan
    if np.any(np.isnan(vals)):
        raise ValueError(f"grid file {path} contains NODATA cells; fill before use")
    depth = vals.reshape(nrows, ncols)[::-1, :]  # file stores north-first; row 0 = south
    origin = GeoPoint(header["yllcorner"], header["xllcorner"])
    return BathymetryGrid(origin, header["cellsize"], depth)


def write_ascii_grid(path: str | Path, grid: BathymetryGrid, nodata: float = -9999.0) -> None:
    lines = [
        f"ncols {grid.cols}",
        f"nrows {grid.rows}",
        f"xllcorner {grid.origin.lon!r}",
        f"yllcorner {grid.origin.lat!r}",
        f"cellsize {grid.cell_size!r}",
        f"NODATA_value {nodata!r}",
    ]
    for row in grid.depth[::-1, :]:  # north first on disk
        lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_mask(path: str | Path, grid: BathymetryGrid) -> np.ndarray:
    """Load a 0/1 mask stored in the same ASCII grid format and shape."""
    m = read_ascii_grid(path)
    if m.depth.shape != grid.depth.shape:
        raise ValueError(f"mask {path} shape {m.depth.shape} != grid shape {grid.depth.shape}")
    return m.depth > 0.5


def write_mask(path: str | Path, grid: BathymetryGrid, mask: np.ndarray) -> None:
    write_ascii_grid(path, BathymetryGrid(grid.origin, grid.cell_size, mask.astype(float)))
