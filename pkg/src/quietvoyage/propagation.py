"""Transmission loss: synthetic field generation, PCA band compression, and a
Gaussian RBF surrogate for fast source-to-receiver queries.

The synthetic field replaces an external ray-tracing run while keeping the
same cache and query interface: spherical spreading plus Thorp absorption,
with a 60 dB penalty scaled by the land-blocked fraction of the line of
sight.  That occlusion term is what produces the shadow zones the optimizer
exploits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.cluster.vq import kmeans2

from .geo import (
    BathymetryGrid,
    CoordinateError,
    GeoPoint,
    PlanarPoint,
    blocked_fraction,
    from_planar,
    to_planar,
)
from .source import BAND_CENTERS_HZ, N_BANDS, broadband_level

SOURCE_DEPTH_M = 6.0
OCCLUSION_DB = 60.0
RIDGE = 1e-8
N_COMPONENTS = 10

CACHE_FORMAT_VERSION = "1"


class FitError(RuntimeError):
    """Raised when the interpolation system cannot be solved."""


def thorp_db_per_km(f_hz: float) -> float:
    """Thorp volume absorption coefficient, dB/km, for frequency in Hz."""
    f2 = (f_hz / 1000.0) ** 2
    return 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003


_THORP_BANDS = np.array([thorp_db_per_km(f) for f in BAND_CENTERS_HZ])


def _slant_range_m(src: GeoPoint, rcv: GeoPoint) -> float:
    p = to_planar(rcv, src)
    return math.sqrt(p.x**2 + p.y**2 + (src.depth - rcv.depth) ** 2)


def synth_tl(src: GeoPoint, rcv: GeoPoint, f_hz: float, grid: BathymetryGrid) -> float:
    """Single-band synthetic transmission loss in dB (always >= 0)."""
    r = _slant_range_m(src, rcv)
    spread = 20.0 * math.log10(max(r, 1.0))
    absorb = thorp_db_per_km(f_hz) * r / 1000.0
    occ = OCCLUSION_DB * blocked_fraction(src, rcv, grid)
    return spread + absorb + occ


def synth_tl_bands(src: GeoPoint, rcv: GeoPoint, grid: BathymetryGrid) -> np.ndarray:
    """All 30 band TLs at once; spreading and occlusion are band-independent."""
    r = _slant_range_m(src, rcv)
    base = 20.0 * math.log10(max(r, 1.0)) + OCCLUSION_DB * blocked_fraction(src, rcv, grid)
    return base + _THORP_BANDS * (r / 1000.0)


# --- sampled field cache --------------------------------------------------------

@dataclass(frozen=True)
class TlSample:
    """One 5-D input (s_lat, s_lon, r_lat, r_lon, r_z) and its 30-band TL."""

    x: np.ndarray
    tl: np.ndarray


@dataclass
class LatticeSpec:
    """Deterministic per-source sampling lattice over a disc, times depths.

    ``rings`` mode is a plain range x bearing product.  ``spiral`` mode places
    the same kind of nodes on a golden-angle spiral, which keeps the center
    spacing quasi-uniform; the kernel-width rule (median nearest-neighbor
    distance) needs that uniformity to stay well conditioned.
    """

    radius_m: float
    mode: str = "spiral"
    n_ranges: int = 10
    n_bearings: int = 16
    n_nodes: int = 120
    depths_m: tuple[float, ...] = (1.0, 25.0, 50.0, 75.0, 100.0)
    min_range_m: float = 1500.0

    def nodes_xy(self) -> np.ndarray:
        """Planar (x, y) offsets of the horizontal lattice nodes."""
        if self.mode == "rings":
            ranges = np.linspace(self.min_range_m, self.radius_m, self.n_ranges)
            bearings = np.linspace(0.0, 2.0 * math.pi, self.n_bearings, endpoint=False)
            return np.array(
                [(r * math.sin(b), r * math.cos(b)) for r in ranges for b in bearings]
            )
        if self.mode == "spiral":
            golden = math.pi * (3.0 - math.sqrt(5.0))
            k = np.arange(self.n_nodes)
            r = self.min_range_m + (self.radius_m - self.min_range_m) * np.sqrt(
                (k + 0.5) / self.n_nodes
            )
            th = k * golden
            return np.column_stack([r * np.sin(th), r * np.cos(th)])
        raise ValueError(f"unknown lattice mode: {self.mode}")


@dataclass
class TlFieldCache:
    """Sampled TL field for a list of sources at 6 m depth."""

    sources: list[GeoPoint]
    lattice: LatticeSpec
    inputs: np.ndarray   # n x 5
    tl: np.ndarray       # n x 30
    version: str = CACHE_FORMAT_VERSION

    def __post_init__(self):
        if self.inputs.shape[0] != self.tl.shape[0] or self.tl.shape[1] != N_BANDS:
            raise ValueError("inputs and tl shapes disagree")
        if np.any(self.tl < 0):
            raise ValueError("TL values must be >= 0")


def precompute_field(
    sources: list[GeoPoint],
    radius_m: float,
    grid: BathymetryGrid,
    lattice: LatticeSpec | None = None,
) -> TlFieldCache:
    """Sample the synthetic TL field on a deterministic lattice per source.

    Lattice nodes that fall outside the bathymetry grid or on land are skipped;
    everything else is sampled for all 30 bands.
    """
    if not sources:
        raise ValueError("precompute_field needs at least one source")
    if radius_m <= 0:
        raise ValueError("radius must be positive")
    lattice = lattice or LatticeSpec(radius_m=radius_m)
    inputs = []
    tls = []
    for src_raw in sources:
        src = GeoPoint(src_raw.lat, src_raw.lon, SOURCE_DEPTH_M)
        for x, y in lattice.nodes_xy():
            try:
                pt = from_planar(PlanarPoint(x, y), src)
            except CoordinateError:
                continue
            if not grid.contains(pt):
                continue
            rng = math.hypot(x, y)
            base = blocked_fraction(src, GeoPoint(pt.lat, pt.lon), grid)
            for depth in lattice.depths_m:
                r = math.sqrt(rng * rng + (SOURCE_DEPTH_M - depth) ** 2)
                tl = (
                    20.0 * math.log10(max(r, 1.0))
                    + OCCLUSION_DB * base
                    + _THORP_BANDS * (r / 1000.0)
                )
                inputs.append([src.lat, src.lon, pt.lat, pt.lon, depth])
                tls.append(tl)
    if not inputs:
        raise ValueError("lattice produced no in-bounds samples")
    return TlFieldCache(
        sources=[GeoPoint(s.lat, s.lon, SOURCE_DEPTH_M) for s in sources],
        lattice=lattice,
        inputs=np.array(inputs),
        tl=np.array(tls),
    )


# --- PCA over the 30 bands ------------------------------------------------------

@dataclass
class PcaBasis:
    """Top principal directions of the mean-centered 30-band TL samples."""

    mean: np.ndarray
    components: np.ndarray          # k x 30, orthonormal rows
    explained_variance: np.ndarray  # k, non-increasing


def pca_fit(samples: np.ndarray, n_components: int = N_COMPONENTS) -> PcaBasis:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < n_components:
        raise ValueError(f"pca_fit needs at least {n_components} samples")
    mean = samples.mean(axis=0)
    centered = samples - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=True)
    var = np.zeros(vt.shape[0])
    var[: s.size] = s**2 / max(samples.shape[0] - 1, 1)
    return PcaBasis(mean=mean, components=vt[:n_components], explained_variance=var[:n_components])


def pca_project(basis: PcaBasis, tl30: np.ndarray) -> np.ndarray:
    return (np.asarray(tl30) - basis.mean) @ basis.components.T


def pca_reconstruct(basis: PcaBasis, coeffs: np.ndarray) -> np.ndarray:
    return basis.mean + np.asarray(coeffs) @ basis.components


# --- Gaussian RBF surrogate ------------------------------------------------------

@dataclass
class RbfInterpolant:
    """Gaussian RBF fit over normalized 5-D inputs, one weight column per
    principal component.  Immutable after fit; safe for concurrent evaluation."""

    centers: np.ndarray       # n x 5 (raw coordinates)
    weights: np.ndarray       # n x k
    sigma: float              # kernel width in normalized space
    basis: PcaBasis
    norm_mean: np.ndarray     # 5
    norm_scale: np.ndarray    # 5
    train_lo: np.ndarray = field(default=None)  # bbox of training inputs, normalized
    train_hi: np.ndarray = field(default=None)

    def _normalize(self, x: np.ndarray) -> np.ndarray:
        return (x - self.norm_mean) / self.norm_scale


def _normalized(inputs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = inputs.mean(axis=0)
    scale = inputs.std(axis=0)
    scale[scale == 0.0] = 1.0  # constant dims (e.g. single source) stay put
    return (inputs - mean) / scale, mean, scale


def _select_centers(
    norm_inputs: np.ndarray, clusters: int, per_cluster: int, seed: int
) -> np.ndarray:
    """k-means the normalized inputs, then take a uniform subset per cluster."""
    n = norm_inputs.shape[0]
    clusters = min(clusters, n)
    _, labels = kmeans2(norm_inputs, clusters, minit="++", seed=seed)
    picked: list[int] = []
    rng = np.random.default_rng(seed)
    for c in range(clusters):
        idx = np.flatnonzero(labels == c)
        if idx.size == 0:
            continue
        take = min(per_cluster, idx.size)
        picked.extend(rng.choice(idx, size=take, replace=False))
    return np.unique(np.array(picked, dtype=int))


def rbf_fit(
    cache: TlFieldCache,
    clusters: int = 125,
    per_cluster: int = 4,
    seed: int = 0,
    n_components: int = N_COMPONENTS,
) -> RbfInterpolant:
    """Fit the surrogate: cluster-subsample centers, solve (Psi + ridge I) w = y.

    sigma is the median nearest-neighbor distance among the selected centers in
    per-dimension normalized coordinates.
    """
    if clusters * per_cluster > cache.inputs.shape[0]:
        raise ValueError("clusters * per_cluster exceeds available samples")
    basis = pca_fit(cache.tl, n_components)
    norm_inputs, mean, scale = _normalized(cache.inputs)
    idx = _select_centers(norm_inputs, clusters, per_cluster, seed)
    if idx.size < 1:
        raise FitError("center selection produced no centers")
    centers_norm = norm_inputs[idx]
    targets = pca_project(basis, cache.tl[idx])  # n x k

    d2 = _pairwise_sq_dists(centers_norm, centers_norm)
    if centers_norm.shape[0] > 1:
        d2_offdiag = d2.copy()
        np.fill_diagonal(d2_offdiag, np.inf)
        nn = np.sqrt(d2_offdiag.min(axis=1))
        sigma = float(np.median(nn))
    else:
        sigma = 1.0
    if sigma <= 0:
        sigma = 1.0

    psi = np.exp(-0.5 * d2 / sigma**2)
    system = psi + RIDGE * np.eye(psi.shape[0])
    try:
        cho = np.linalg.cholesky(system)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(system)
        raise FitError(f"kernel system not positive definite (cond={cond:.3e})") from exc
    weights = np.linalg.solve(cho.T, np.linalg.solve(cho, targets))

    return RbfInterpolant(
        centers=cache.inputs[idx],
        weights=weights,
        sigma=sigma,
        basis=basis,
        norm_mean=mean,
        norm_scale=scale,
        train_lo=norm_inputs.min(axis=0),
        train_hi=norm_inputs.max(axis=0),
    )


def _pairwise_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aa = np.sum(a * a, axis=1)[:, None]
    bb = np.sum(b * b, axis=1)[None, :]
    d2 = aa + bb - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def rbf_eval_batch(interp: RbfInterpolant, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the surrogate at q x 5 raw-coordinate queries.

    Returns (q x 30 TL clamped at 0 dB, q extrapolation flags).  A query is
    flagged, not rejected, when it leaves the training box inflated by 2 sigma.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    qn = interp._normalize(queries)
    cn = interp._normalize(interp.centers)
    d2 = _pairwise_sq_dists(qn, cn)
    psi = np.exp(-0.5 * d2 / interp.sigma**2)
    coeffs = psi @ interp.weights
    tl = pca_reconstruct(interp.basis, coeffs)
    np.maximum(tl, 0.0, out=tl)
    pad = 2.0 * interp.sigma
    outside = np.any((qn < interp.train_lo - pad) | (qn > interp.train_hi + pad), axis=1)
    return tl, outside


def rbf_eval(interp: RbfInterpolant, src: GeoPoint, rcv: GeoPoint) -> np.ndarray:
    """30-band TL for one source/receiver pair (source pinned to 6 m depth)."""
    q = np.array([[src.lat, src.lon, rcv.lat, rcv.lon, rcv.depth]])
    tl, _ = rbf_eval_batch(interp, q)
    return tl[0]


def received_level(nls_db: np.ndarray, tl_db: np.ndarray) -> float:
    """Passive sonar equation per band (NL = NLS - TL), then power-summed."""
    nls = np.asarray(nls_db, dtype=float)
    tl = np.asarray(tl_db, dtype=float)
    if nls.shape != tl.shape:
        raise ValueError(f"band count mismatch: {nls.shape} vs {tl.shape}")
    return broadband_level(nls - tl)


# --- persistence ------------------------------------------------------------------

def write_cache(dir_path: str | Path, cache: TlFieldCache) -> None:
    d = Path(dir_path)
    d.mkdir(parents=True, exist_ok=True)
    header = "s_lat,s_lon,r_lat,r_lon,r_z," + ",".join(f"tl_b{i+1}" for i in range(N_BANDS))
    rows = [header]
    for x, tl in zip(cache.inputs, cache.tl):
        rows.append(",".join(repr(float(v)) for v in (*x, *tl)))
    (d / "tl_cache.csv").write_text("\n".join(rows) + "\n")
    man = [
        f"format_version {cache.version}",
        f"radius_m {cache.lattice.radius_m!r}",
        f"mode {cache.lattice.mode}",
        f"n_ranges {cache.lattice.n_ranges}",
        f"n_bearings {cache.lattice.n_bearings}",
        f"n_nodes {cache.lattice.n_nodes}",
        f"min_range_m {cache.lattice.min_range_m!r}",
        "depths_m " + " ".join(repr(v) for v in cache.lattice.depths_m),
        "sources " + " ".join(f"{s.lat!r}:{s.lon!r}" for s in cache.sources),
    ]
    (d / "tl_cache_manifest.txt").write_text("\n".join(man) + "\n")


def read_cache(dir_path: str | Path) -> TlFieldCache:
    d = Path(dir_path)
    man: dict[str, str] = {}
    for line in (d / "tl_cache_manifest.txt").read_text().splitlines():
        key, _, rest = line.partition(" ")
        man[key] = rest
    lattice = LatticeSpec(
        radius_m=float(man["radius_m"]),
        mode=man.get("mode", "rings"),
        n_ranges=int(man["n_ranges"]),
        n_bearings=int(man["n_bearings"]),
        n_nodes=int(man.get("n_nodes", "0") or 0),
        depths_m=tuple(float(v) for v in man["depths_m"].split()),
        min_range_m=float(man["min_range_m"]),
    )
    sources = []
    for tok in man["sources"].split():
        lat, _, lon = tok.partition(":")
        sources.append(GeoPoint(float(lat), float(lon), SOURCE_DEPTH_M))
    body = (d / "tl_cache.csv").read_text().splitlines()
    data = np.array([[float(v) for v in line.split(",")] for line in body[1:]])
    return TlFieldCache(
        sources=sources,
        lattice=lattice,
        inputs=data[:, :5],
        tl=data[:, 5:],
        version=man["format_version"],
    )


def write_interpolant(dir_path: str | Path, interp: RbfInterpolant) -> None:
    d = Path(dir_path)
    d.mkdir(parents=True, exist_ok=True)

    def block(name: str, arr: np.ndarray) -> list[str]:
        arr = np.atleast_2d(arr)
        out = [f"# {name} {arr.shape[0]} {arr.shape[1]}"]
        out.extend(",".join(repr(float(v)) for v in row) for row in arr)
        return out

    lines = []
    lines += block("centers", interp.centers)
    lines += block("weights", interp.weights)
    lines += block("mean", interp.basis.mean)
    lines += block("components", interp.basis.components)
    lines += block("explained_variance", interp.basis.explained_variance)
    lines += block("norm_mean", interp.norm_mean)
    lines += block("norm_scale", interp.norm_scale)
    lines += block("train_lo", interp.train_lo)
    lines += block("train_hi", interp.train_hi)
    (d / "rbf_interpolant.csv").write_text("\n".join(lines) + "\n")
    (d / "rbf_manifest.txt").write_text(
        f"format_version {CACHE_FORMAT_VERSION}\nsigma {interp.sigma!r}\n"
    )


def read_interpolant(dir_path: str | Path) -> RbfInterpolant:
    d = Path(dir_path)
    man: dict[str, str] = {}
    for line in (d / "rbf_manifest.txt").read_text().splitlines():
        key, _, rest = line.partition(" ")
        man[key] = rest
    blocks: dict[str, np.ndarray] = {}
    name = None
    rows: list[list[float]] = []
    for line in (d / "rbf_interpolant.csv").read_text().splitlines():
        if line.startswith("#"):
            if name is not None:
                blocks[name] = np.array(rows)
            name = line.split()[1]
            rows = []
        else:
            rows.append([float(v) for v in line.split(",")])
    if name is not None:
        blocks[name] = np.array(rows)
    basis = PcaBasis(
        mean=blocks["mean"][0],
        components=blocks["components"],
        explained_variance=blocks["explained_variance"][0],
    )
    return RbfInterpolant(
        centers=blocks["centers"],
        weights=blocks["weights"],
        sigma=float(man["sigma"]),
        basis=basis,
        norm_mean=blocks["norm_mean"][0],
        norm_scale=blocks["norm_scale"][0],
        train_lo=blocks["train_lo"][0],
        train_hi=blocks["train_hi"][0],
    )
