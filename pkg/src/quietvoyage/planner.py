"""Route search over the masked planar workspace.

The planner is an anytime batched informed tree search: batches of uniform
samples form an implicit random geometric graph, a tree grows from the start
ordered by cost-to-come plus an admissible cost-to-go, and once an incumbent
route exists further samples are drawn from the ellipsoid that can still
improve it.  Samples that provably cannot improve the incumbent are pruned
between batches.

The objective is transmission-loss-aware: each state's local cost is a fixed
offset minus the mean TL to the mammal nodes, so states acoustically shielded
from the mammals are cheap.  The offset keeps costs non-negative, which the
heuristic ordering requires; with no mammals the objective reduces to path
length.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geo import (
    METERS_PER_NM,
    BathymetryGrid,
    GeoPoint,
    PlanarPoint,
    RegionMask,
    from_planar,
    is_navigable,
    is_navigable_arrays,
    to_planar,
)
from .propagation import OCCLUSION_DB, RbfInterpolant, rbf_eval_batch, thorp_db_per_km
from .source import BAND_CENTERS_HZ
from .wildlife import MammalState

#: Offset added to the (negative) mean-TL local cost so route costs are
#: non-negative; reported in output metadata.
COST_OFFSET_DB = 200.0

EDGE_CHECK_STEP_M = 100.0
DEFAULT_GOAL_RADIUS_M = 500.0

_MEAN_THORP = float(np.mean([thorp_db_per_km(f) for f in BAND_CENTERS_HZ]))


class PlanningError(RuntimeError):
    """Raised when no route reaches the goal region within the budget."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class Se2State:
    x: float
    y: float
    yaw: float = 0.0


@dataclass
class PlannerConfig:
    batch_size: int = 150
    max_batches: int = 4
    time_budget_s: float = 55.0
    goal_radius_m: float = DEFAULT_GOAL_RADIUS_M
    seed: int = 0
    min_depth_m: float = 10.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class Route:
    """Ordered waypoints in the planar frame anchored at ``ref``.

    ``incumbent_history`` holds the planner's internal additive cost after
    each batch (monotone non-increasing); ``cost`` is the reporting objective,
    the arc-length-weighted mean local cost.
    """

    waypoints: list[Se2State]
    ref: GeoPoint
    cost: float = 0.0
    incumbent_history: list[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("a route needs at least two waypoints")

    @property
    def xy(self) -> np.ndarray:
        return np.array([[w.x, w.y] for w in self.waypoints])

    @property
    def segment_lengths_m(self) -> np.ndarray:
        d = np.diff(self.xy, axis=0)
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def length_m(self) -> float:
        return float(self.segment_lengths_m.sum())

    @property
    def length_nm(self) -> float:
        return self.length_m / METERS_PER_NM

    def to_geo(self) -> list[GeoPoint]:
        return [from_planar(PlanarPoint(w.x, w.y), self.ref) for w in self.waypoints]

    def point_at_distance(self, s_m: float) -> PlanarPoint:
        xy = self.points_at_distances(np.array([s_m]))
        return PlanarPoint(float(xy[0, 0]), float(xy[0, 1]))

    def points_at_distances(self, s_m: np.ndarray) -> np.ndarray:
        """Points on the polyline at arc lengths ``s_m`` (clamped); m x 2."""
        xy = self.xy
        cum = np.concatenate([[0.0], np.cumsum(self.segment_lengths_m)])
        s = np.clip(np.asarray(s_m, dtype=float), 0.0, cum[-1])
        x = np.interp(s, cum, xy[:, 0])
        y = np.interp(s, cum, xy[:, 1])
        return np.column_stack([x, y])


class Workspace:
    """Planar view of the grid/mask about a reference point, with vectorized
    state and edge validity checks."""

    def __init__(self, grid: BathymetryGrid, mask: RegionMask, ref: GeoPoint, min_depth_m: float):
        self.grid = grid
        self.mask = mask
        self.ref = ref
        self.min_depth_m = min_depth_m
        corners = [
            GeoPoint(grid.origin.lat, grid.origin.lon),
            GeoPoint(grid.origin.lat, grid.lon_max),
            GeoPoint(grid.lat_max, grid.origin.lon),
            GeoPoint(grid.lat_max, grid.lon_max),
        ]
        pts = [to_planar(c, ref) for c in corners]
        self.x_min = min(p.x for p in pts)
        self.x_max = max(p.x for p in pts)
        self.y_min = min(p.y for p in pts)
        self.y_max = max(p.y for p in pts)

    @property
    def diagonal_m(self) -> float:
        return math.hypot(self.x_max - self.x_min, self.y_max - self.y_min)

    def to_geo_arrays(self, xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k = math.pi / 180.0 * 6_371_000.0
        lat = self.ref.lat + xy[:, 1] / k
        lon = self.ref.lon + xy[:, 0] / (k * math.cos(math.radians(self.ref.lat)))
        return lat, lon

    def valid_states(self, xy: np.ndarray) -> np.ndarray:
        lat, lon = self.to_geo_arrays(np.atleast_2d(xy))
        return is_navigable_arrays(lat, lon, self.mask, self.grid, self.min_depth_m)

    def valid_state(self, x: float, y: float) -> bool:
        return bool(self.valid_states(np.array([[x, y]]))[0])

    def edge_valid(self, a: np.ndarray, b: np.ndarray) -> bool:
        """Interpolate the segment at <= 100 m steps and check every point."""
        dist = math.hypot(b[0] - a[0], b[1] - a[1])
        n = max(2, int(math.ceil(dist / EDGE_CHECK_STEP_M)) + 1)
        xs = np.linspace(a[0], b[0], n)
        ys = np.linspace(a[1], b[1], n)
        return bool(np.all(self.valid_states(np.column_stack([xs, ys]))))


def local_cost(
    state: Se2State,
    mammals: list[MammalState],
    tl: RbfInterpolant | None,
    workspace: Workspace,
) -> float:
    """Offset minus the mean over mammals of the band-mean TL from ``state``."""
    if not mammals or tl is None:
        return COST_OFFSET_DB
    xy = np.array([[state.x, state.y]])
    lat, lon = workspace.to_geo_arrays(xy)
    queries = np.array(
        [[lat[0], lon[0], m.position.lat, m.position.lon, m.position.depth] for m in mammals]
    )
    tl30, _ = rbf_eval_batch(tl, queries)
    return COST_OFFSET_DB - float(np.mean(tl30))


def route_cost(
    route: Route,
    mammals: list[MammalState],
    tl: RbfInterpolant | None,
    workspace: Workspace,
) -> float:
    """Sum of local costs weighted by normalized arc-length increments.

    Each waypoint carries half of its adjacent segment lengths, so the weights
    are convex and the result is the length-weighted mean local cost.
    """
    seg = route.segment_lengths_m
    total = seg.sum()
    if total == 0:
        return local_cost(route.waypoints[0], mammals, tl, workspace)
    n = len(route.waypoints)
    w = np.zeros(n)
    w[:-1] += seg / 2.0
    w[1:] += seg / 2.0
    w /= total
    costs = np.array([local_cost(s, mammals, tl, workspace) for s in route.waypoints])
    return float(np.dot(w, costs))


def min_local_cost(mammals, workspace: Workspace) -> float:
    """Admissible per-meter cost floor used by the search heuristics."""
    if not mammals:
        return COST_OFFSET_DB
    d = max(workspace.diagonal_m, 1.0)
    tl_upper = 20.0 * math.log10(d) + _MEAN_THORP * d / 1000.0 + OCCLUSION_DB
    return max(0.0, COST_OFFSET_DB - tl_upper)


def plan_route(
    start: GeoPoint,
    goal: GeoPoint,
    mammals: list[MammalState],
    tl: RbfInterpolant | None,
    grid: BathymetryGrid,
    mask: RegionMask,
    config: PlannerConfig | None = None,
) -> Route:
    """Plan a collision-free route from ``start`` to the goal region.

    Returns the best route found when the batch/time budget is exhausted;
    raises :class:`PlanningError` if no route reaches the goal region.
    Deterministic for a fixed config and seed.
    """
    config = config or PlannerConfig()
    ws = Workspace(grid, mask, start, config.min_depth_m)
    for name, p in (("start", start), ("goal", goal)):
        if not grid.contains(p) or not is_navigable(p, mask, grid, config.min_depth_m):
            raise PlanningError(f"{name} point is not navigable: {p.lat:.6f},{p.lon:.6f}")
    p_start = np.array([0.0, 0.0])
    gpl = to_planar(goal, start)
    p_goal = np.array([gpl.x, gpl.y])
    dist_sg = float(np.linalg.norm(p_goal - p_start))
    if dist_sg == 0:
        raise PlanningError("start and goal coincide")

    c_unit = min_local_cost(mammals, ws)
    rng = np.random.default_rng(config.seed)
    cost_cache: dict[tuple[float, float], float] = {}

    def vertex_local(xy: np.ndarray) -> float:
        key = (round(float(xy[0]), 3), round(float(xy[1]), 3))
        if key not in cost_cache:
            cost_cache[key] = local_cost(Se2State(xy[0], xy[1]), mammals, tl, ws)
        return cost_cache[key]

    def edge_cost(a: np.ndarray, b: np.ndarray) -> float:
        length = float(np.linalg.norm(b - a))
        return 0.5 * (vertex_local(a) + vertex_local(b)) * length

    if dist_sg <= config.goal_radius_m and ws.edge_valid(p_start, p_goal):
        route = _build_route([p_start, p_goal], start, mammals, tl, ws)
        route.incumbent_history = [edge_cost(p_start, p_goal)]
        return route

    def h_hat(xy: np.ndarray) -> float:
        return c_unit * float(np.linalg.norm(p_goal - xy))

    def g_hat(xy: np.ndarray) -> float:
        return c_unit * float(np.linalg.norm(xy - p_start))

    incumbent = math.inf
    best_path: list[np.ndarray] | None = None
    incumbent_history: list[float] = []
    carried: list[np.ndarray] = [p_goal.copy()]  # samples reused across batches
    t0 = time.monotonic()
    closest_approach = dist_sg

    def sample_batch() -> list[np.ndarray]:
        out: list[np.ndarray] = []
        attempts = 0
        while len(out) < config.batch_size and attempts < config.batch_size * 50:
            m = config.batch_size * 2
            attempts += m
            pts = np.column_stack(
                [rng.uniform(ws.x_min, ws.x_max, m), rng.uniform(ws.y_min, ws.y_max, m)]
            )
            if math.isfinite(incumbent) and c_unit > 0:
                # Improvement ellipsoid: g-hat + h-hat must beat the incumbent.
                dd = np.linalg.norm(pts - p_start, axis=1) + np.linalg.norm(pts - p_goal, axis=1)
                pts = pts[dd * c_unit <= incumbent]
                if pts.size == 0:
                    continue
            ok = ws.valid_states(pts)
            for p in pts[ok]:
                out.append(p)
                if len(out) >= config.batch_size:
                    break
        return out

    for batch in range(config.max_batches):
        if time.monotonic() - t0 > config.time_budget_s:
            break

        # Assemble this batch's node set: start, carried samples, new samples.
        nodes: list[np.ndarray] = [p_start] + [np.array(p) for p in carried]
        goal_id = 1
        for p in sample_batch():
            nodes.append(p)
        if math.isfinite(incumbent) and c_unit > 0:
            keep = [
                i
                for i in range(len(nodes))
                if i <= goal_id or g_hat(nodes[i]) + h_hat(nodes[i]) <= incumbent
            ]
            nodes = [nodes[i] for i in keep]

        n_total = len(nodes)
        if math.isfinite(incumbent):
            area = (ws.x_max - ws.x_min) * (ws.y_max - ws.y_min)
            radius = max(
                2.0 * math.sqrt(area * math.log(n_total + 1) / math.pi / (n_total + 1)),
                dist_sg / 4.0,
            )
        else:
            radius = math.inf

        parent = {0: -1}
        g_cost = {0: 0.0}
        in_tree = {0}
        unconnected = set(range(1, n_total))

        queue: list[tuple[float, int, int, int]] = []
        tick = 0

        def push_edges(v: int):
            nonlocal tick
            for s in sorted(unconnected):
                d = float(np.linalg.norm(nodes[s] - nodes[v]))
                if d > radius:
                    continue
                f = g_cost[v] + c_unit * d + h_hat(nodes[s])
                if f < incumbent:
                    tick += 1
                    heapq.heappush(queue, (f, tick, v, s))

        push_edges(0)
        while queue:
            if time.monotonic() - t0 > config.time_budget_s:
                break
            f, _, v, s = heapq.heappop(queue)
            if f >= incumbent:
                break  # everything left is provably worse
            if s not in unconnected:
                continue
            if not ws.edge_valid(nodes[v], nodes[s]):
                continue
            cost = g_cost[v] + edge_cost(nodes[v], nodes[s])
            if cost + h_hat(nodes[s]) >= incumbent:
                continue
            parent[s] = v
            g_cost[s] = cost
            in_tree.add(s)
            unconnected.discard(s)
            closest_approach = min(closest_approach, float(np.linalg.norm(nodes[s] - p_goal)))
            if s == goal_id:
                incumbent = cost
                best_path = _extract(parent, goal_id, nodes)
                break
            push_edges(s)

        incumbent_history.append(incumbent)
        if best_path is not None:
            # Carry the incumbent path's interior vertices plus the goal so the
            # next informed batch can rediscover or improve on it.
            carried = [p_goal.copy()] + [np.array(p) for p in best_path[1:-1]]
        else:
            carried = [p_goal.copy()] + [nodes[i] for i in sorted(in_tree) if i != 0]

    if best_path is None:
        raise PlanningError(
            "no route reached the goal region within the batch budget",
            diagnostics={
                "closest_approach_m": closest_approach,
                "batches": len(incumbent_history),
            },
        )

    route = _build_route(best_path, start, mammals, tl, ws)
    route.incumbent_history = incumbent_history
    return route


def _extract(parent: dict[int, int], goal_id: int, nodes: list[np.ndarray]) -> list[np.ndarray]:
    path = []
    v = goal_id
    while v != -1:
        path.append(nodes[v])
        v = parent[v]
    return path[::-1]


def _build_route(path_xy, ref: GeoPoint, mammals, tl, ws: Workspace) -> Route:
    waypoints = []
    yaw = 0.0
    for i, p in enumerate(path_xy):
        if i + 1 < len(path_xy):
            nxt = path_xy[i + 1]
            yaw = math.atan2(nxt[0] - p[0], nxt[1] - p[1])
        waypoints.append(Se2State(float(p[0]), float(p[1]), yaw))
    route = Route(waypoints=waypoints, ref=ref)
    route.cost = route_cost(route, mammals, tl, ws)
    return route


def write_route_csv(path, route: Route) -> None:
    geos = route.to_geo()
    cum_nm = np.concatenate([[0.0], np.cumsum(route.segment_lengths_m)]) / METERS_PER_NM
    lines = ["index,lat,lon,cumulative_nm"]
    for i, (gp, s) in enumerate(zip(geos, cum_nm)):
        lines.append(f"{i},{gp.lat!r},{gp.lon!r},{float(s)!r}")
    Path(path).write_text("\n".join(lines) + "\n")
