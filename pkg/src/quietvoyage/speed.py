"""Per-leg speed optimization under distance/time/speed-bound constraints.

The route from the planner is sailed as ``n_legs`` legs of equal duration
``dt = eta / n_legs``; the decision vector is the speed per leg.  A real-coded
genetic algorithm minimizes the mean sound exposure level across mammals,
handling the total-distance constraint with feasibility-first ranking plus a
graded penalty.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .geo import METERS_PER_NM, BathymetryGrid, RegionMask
from .planner import Route
from .propagation import RbfInterpolant, rbf_eval_batch
from .source import ShipSpec, source_spectrum
from .wildlife import MammalState, step_trajectory

DISTANCE_TOLERANCE_M = 100.0
PENALTY_DB_PER_EPSILON = 10.0
DEFAULT_N_LEGS = 24


class InfeasibleConstraints(ValueError):
    """Raised when no speed profile can satisfy the voyage constraints."""


class OptimizationError(RuntimeError):
    """Raised when the GA ends without any distance-feasible individual."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass
class SpeedProfile:
    """Speeds per sailing leg; every leg lasts ``dt_h`` hours."""

    speeds_kt: np.ndarray
    dt_h: float

    def __post_init__(self):
        self.speeds_kt = np.asarray(self.speeds_kt, dtype=float)
        if self.speeds_kt.size < 1:
            raise ValueError("a profile needs at least one leg")
        if self.dt_h <= 0:
            raise ValueError("dt must be positive")

    @property
    def n_legs(self) -> int:
        return self.speeds_kt.size

    @property
    def duration_h(self) -> float:
        return self.n_legs * self.dt_h

    def speed_at(self, t_h: float) -> float:
        i = min(int(t_h / self.dt_h), self.n_legs - 1)
        return float(self.speeds_kt[max(i, 0)])

    def distance_at(self, t_h: float) -> float:
        """Cumulative distance in NM at voyage time ``t_h``."""
        t = min(max(t_h, 0.0), self.duration_h)
        full = int(t / self.dt_h)
        d = float(self.speeds_kt[:full].sum()) * self.dt_h
        if full < self.n_legs:
            d += float(self.speeds_kt[full]) * (t - full * self.dt_h)
        return d


@dataclass(frozen=True)
class VoyageConstraints:
    eta_h: float
    path_length_nm: float
    v_min_kt: float
    v_max_kt: float
    epsilon_m: float = DISTANCE_TOLERANCE_M

    def __post_init__(self):
        if self.eta_h <= 0:
            raise ValueError("ETA must be positive")
        if self.path_length_nm <= 0:
            raise ValueError("path length must be positive")

    @property
    def mean_speed_kt(self) -> float:
        return self.path_length_nm / self.eta_h

    def check_feasible(self) -> None:
        v = self.mean_speed_kt
        if not self.v_min_kt <= v <= self.v_max_kt:
            raise InfeasibleConstraints(
                f"required mean speed {v:.2f} kt outside [{self.v_min_kt}, {self.v_max_kt}] kt"
            )


@dataclass
class GaConfig:
    population: int = 1000
    max_generations: int = 120
    objective_tolerance_db: float = 0.01
    stagnation_generations: int = 20
    time_budget_s: float = 240.0
    mutation_rate_start: float = 0.3
    mutation_rate_end: float = 0.05
    crossover_rate: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")


@dataclass
class ExposureLedger:
    """Per-mammal per-leg received levels and exposure bookkeeping."""

    mammal_ids: list[int]
    leg_nl_db: np.ndarray      # m x n_legs
    dt_h: float
    leg_energy: np.ndarray = field(init=False)   # uPa^2*h per leg
    sel_total_db: np.ndarray = field(init=False)  # m

    def __post_init__(self):
        self.leg_nl_db = np.atleast_2d(np.asarray(self.leg_nl_db, dtype=float))
        self.leg_energy = np.power(10.0, self.leg_nl_db / 10.0) * self.dt_h
        self.sel_total_db = 10.0 * np.log10(self.leg_energy.sum(axis=1))

    @property
    def mean_sel_db(self) -> float:
        return float(self.sel_total_db.mean())


def tdt(profile: SpeedProfile) -> float:
    """Total distance traveled in NM: sum of leg speed times leg duration."""
    return float(profile.speeds_kt.sum()) * profile.dt_h


def sel_total(leg_levels_db, dt_h: float) -> float:
    """Total sound exposure level: 10 log10((dt / 1 h) * sum 10^(NL/10))."""
    levels = np.asarray(leg_levels_db, dtype=float)
    if levels.size == 0:
        raise ValueError("sel_total needs at least one leg level")
    if dt_h <= 0:
        raise ValueError("dt must be positive")
    return float(10.0 * np.log10(dt_h * np.sum(np.power(10.0, levels / 10.0))))


def leg_noise(
    v_kt: float,
    ship_pos,
    mammal: MammalState,
    ship_spec: ShipSpec,
    tl: RbfInterpolant,
) -> float:
    """Broadband received level for one leg: power sum of NLS(v) - TL per band."""
    if v_kt <= 0:
        raise ValueError("leg speed must be positive")
    nls = source_spectrum(v_kt, ship_spec)
    q = np.array([[ship_pos.lat, ship_pos.lon, mammal.position.lat, mammal.position.lon,
                   mammal.position.depth]])
    tl30, _ = rbf_eval_batch(tl, q)
    nl = nls - tl30[0]
    return float(10.0 * np.log10(np.sum(np.power(10.0, nl / 10.0))))


def forecast_mammals(
    mammals: list[MammalState],
    times_h: np.ndarray,
    grid: BathymetryGrid | None = None,
    mask: RegionMask | None = None,
) -> list[list[MammalState]]:
    """Drift each mammal to every requested time (sorted); outer index = time."""
    out: list[list[MammalState]] = []
    current = list(mammals)
    t_prev = 0.0
    for t in times_h:
        dt = float(t) - t_prev
        if dt > 0:
            current = [step_trajectory(m, dt, grid, mask) for m in current]
            t_prev = float(t)
        out.append(list(current))
    return out


class _Objective:
    """Mean-SEL objective for a fixed route, mammal forecast, and surrogate.

    Ship positions are taken at leg midpoints of the cumulative-distance
    profile; mammal states are the drift forecast at the same midpoint times.
    Population evaluation is batched through the surrogate.
    """

    def __init__(
        self,
        route: Route,
        constraints: VoyageConstraints,
        mammals: list[MammalState],
        ship_spec: ShipSpec,
        tl: RbfInterpolant,
        n_legs: int,
        grid: BathymetryGrid | None = None,
        mask: RegionMask | None = None,
    ):
        if not mammals:
            raise ValueError("objective undefined for zero mammals")
        self.route = route
        self.constraints = constraints
        self.ship_spec = ship_spec
        self.tl = tl
        self.n_legs = n_legs
        self.dt_h = constraints.eta_h / n_legs
        mid_times = (np.arange(n_legs) + 0.5) * self.dt_h
        self.forecast = forecast_mammals(mammals, mid_times, grid, mask)
        self.m = len(mammals)
        # Receiver part of the 5-D query is speed-independent.
        self.rcv = np.array(
            [
                [st.position.lat, st.position.lon, st.position.depth]
                for states in self.forecast
                for st in states
            ]
        )  # (n_legs*m) x 3
        # Per-band source level at 1 kt; speed enters as 60 log10(v).
        self.nls_1kt = source_spectrum(1.0, ship_spec)

    def __call__(self, speeds: np.ndarray) -> float:
        return float(self.evaluate_batch(speeds[None, :])[0])

    def evaluate_batch(self, pop: np.ndarray) -> np.ndarray:
        """Mean SEL in dB for each candidate speed vector (p x n_legs)."""
        pop = np.atleast_2d(pop)
        p, n = pop.shape
        cum = np.cumsum(pop, axis=1) * self.dt_h                     # NM at leg ends
        mid_nm = cum - pop * self.dt_h / 2.0                         # NM at leg midpoints
        ship_xy = self.route.points_at_distances(
            (mid_nm * METERS_PER_NM).ravel()
        )  # (p*n) x 2
        k = math.pi / 180.0 * 6_371_000.0
        ref = self.route.ref
        ship_lat = ref.lat + ship_xy[:, 1] / k
        ship_lon = ref.lon + ship_xy[:, 0] / (k * math.cos(math.radians(ref.lat)))

        # Queries: candidate x leg x mammal.
        src = np.column_stack([ship_lat, ship_lon])                  # (p*n) x 2
        src_rep = np.repeat(src, self.m, axis=0)                     # (p*n*m) x 2
        rcv_rep = np.tile(self.rcv, (p, 1))                          # (p*n*m) x 3
        queries = np.column_stack([src_rep, rcv_rep])
        tl30, _ = rbf_eval_batch(self.tl, queries)                   # (p*n*m) x 30

        nls = self.nls_1kt[None, :] + 60.0 * np.log10(pop).reshape(p * n, 1)
        nls_rep = np.repeat(nls, self.m, axis=0)
        nl_broadband = 10.0 * np.log10(
            np.sum(np.power(10.0, (nls_rep - tl30) / 10.0), axis=1)
        ).reshape(p, n, self.m)

        energy = np.power(10.0, nl_broadband / 10.0) * self.dt_h     # p x n x m
        sel = 10.0 * np.log10(energy.sum(axis=1))                    # p x m
        return sel.mean(axis=1)

    def ledger(self, speeds: np.ndarray) -> ExposureLedger:
        pop = np.asarray(speeds, dtype=float)[None, :]
        p, n = pop.shape
        cum = np.cumsum(pop, axis=1) * self.dt_h
        mid_nm = cum - pop * self.dt_h / 2.0
        ship_xy = self.route.points_at_distances((mid_nm * METERS_PER_NM).ravel())
        k = math.pi / 180.0 * 6_371_000.0
        ref = self.route.ref
        ship_lat = ref.lat + ship_xy[:, 1] / k
        ship_lon = ref.lon + ship_xy[:, 0] / (k * math.cos(math.radians(ref.lat)))
        src = np.column_stack([ship_lat, ship_lon])
        src_rep = np.repeat(src, self.m, axis=0)
        queries = np.column_stack([src_rep, self.rcv])
        tl30, _ = rbf_eval_batch(self.tl, queries)
        nls = self.nls_1kt[None, :] + 60.0 * np.log10(pop).reshape(n, 1)
        nls_rep = np.repeat(nls, self.m, axis=0)
        nl = 10.0 * np.log10(
            np.sum(np.power(10.0, (nls_rep - tl30) / 10.0), axis=1)
        ).reshape(n, self.m)
        ids = [m.id for m in self.forecast[0]]
        return ExposureLedger(mammal_ids=ids, leg_nl_db=nl.T, dt_h=self.dt_h)


def objective(
    profile: SpeedProfile,
    route: Route,
    mammals: list[MammalState],
    ship_spec: ShipSpec,
    tl: RbfInterpolant,
    constraints: VoyageConstraints,
    grid: BathymetryGrid | None = None,
    mask: RegionMask | None = None,
) -> float:
    """Mean SEL across mammals for one profile (convenience wrapper)."""
    obj = _Objective(
        route, constraints, mammals, ship_spec, tl, profile.n_legs, grid, mask
    )
    return obj(profile.speeds_kt)


def distance_violation_m(profile_tdt_nm: float, constraints: VoyageConstraints) -> float:
    return abs(profile_tdt_nm - constraints.path_length_nm) * METERS_PER_NM


def penalized_fitness(
    profile: SpeedProfile, constraints: VoyageConstraints, objective_value: float
) -> float:
    """Objective plus a graded penalty per tolerance-multiple of violation."""
    viol = distance_violation_m(tdt(profile), constraints)
    eps = constraints.epsilon_m
    return objective_value + PENALTY_DB_PER_EPSILON * max(0.0, viol - eps) / eps


def _rank_keys(sel: np.ndarray, viol_m: np.ndarray, eps: float) -> np.ndarray:
    """Feasibility-first ranking: every tolerance-feasible candidate precedes
    every infeasible one; ties break on the penalized objective."""
    infeasible = (viol_m > eps).astype(float)
    penalized = sel + PENALTY_DB_PER_EPSILON * np.maximum(0.0, viol_m - eps) / eps
    return np.lexsort((penalized, infeasible))


def optimize_speeds(
    route: Route,
    constraints: VoyageConstraints,
    mammals: list[MammalState],
    ship_spec: ShipSpec,
    tl: RbfInterpolant,
    ga: GaConfig | None = None,
    n_legs: int = DEFAULT_N_LEGS,
    grid: BathymetryGrid | None = None,
    mask: RegionMask | None = None,
) -> tuple[SpeedProfile, ExposureLedger]:
    """GA over per-leg speeds; returns the best distance-feasible profile.

    The genome is clipped to the speed bounds after every operator.  The
    population is seeded around the constant feasible speed, so a feasible
    individual always exists, and elitism guarantees the result is never worse
    than the best feasible member of the initial population.
    """
    ga = ga or GaConfig()
    constraints.check_feasible()
    rng = np.random.default_rng(ga.seed)
    dt_h = constraints.eta_h / n_legs
    v_base = constraints.mean_speed_kt
    lo, hi = constraints.v_min_kt, constraints.v_max_kt

    obj = _Objective(route, constraints, mammals, ship_spec, tl, n_legs, grid, mask)

    def repair(pop: np.ndarray) -> np.ndarray:
        return np.clip(pop, lo, hi)

    pop = np.empty((ga.population, n_legs))
    pop[0] = v_base  # exactly feasible constant profile
    n_jitter = ga.population // 2
    pop[1:n_jitter] = v_base * (1.0 + rng.uniform(-0.2, 0.2, (n_jitter - 1, n_legs)))
    pop[n_jitter:] = rng.uniform(lo, hi, (ga.population - n_jitter, n_legs))
    pop = repair(pop)

    def assess(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sel = obj.evaluate_batch(p)
        viol = np.abs(p.sum(axis=1) * dt_h - constraints.path_length_nm) * METERS_PER_NM
        return sel, viol

    sel, viol = assess(pop)
    order = _rank_keys(sel, viol, constraints.epsilon_m)
    pop, sel, viol = pop[order], sel[order], viol[order]

    best_track: list[float] = []
    t0 = time.monotonic()
    n_parents = max(ga.population // 2, 2)

    for gen in range(ga.max_generations):
        if time.monotonic() - t0 > ga.time_budget_s:
            break
        frac = gen / max(ga.max_generations - 1, 1)
        mut_rate = ga.mutation_rate_start + frac * (ga.mutation_rate_end - ga.mutation_rate_start)

        parents = pop[:n_parents]
        i = rng.integers(0, n_parents, ga.population - 1)
        j = rng.integers(0, n_parents, ga.population - 1)
        alpha = rng.uniform(-0.1, 1.1, (ga.population - 1, n_legs))
        do_cross = rng.random(ga.population - 1) < ga.crossover_rate
        children = np.where(
            do_cross[:, None],
            alpha * parents[i] + (1.0 - alpha) * parents[j],
            parents[i],
        )
        mutate = rng.random(children.shape) < mut_rate
        children = children + mutate * rng.normal(0.0, 0.1 * (hi - lo), children.shape)
        children = repair(children)

        # Distance repair: rescale toward the required total where possible.
        totals = children.sum(axis=1) * dt_h
        scale = constraints.path_length_nm / np.where(totals == 0, 1.0, totals)
        children = repair(children * scale[:, None])

        new_pop = np.vstack([pop[0:1], children])  # elitism
        sel, viol = assess(new_pop)
        order = _rank_keys(sel, viol, constraints.epsilon_m)
        pop, sel, viol = new_pop[order], sel[order], viol[order]

        feasible = viol <= constraints.epsilon_m
        best_now = sel[feasible][0] if np.any(feasible) else math.inf
        best_track.append(best_now)
        if (
            len(best_track) > ga.stagnation_generations
            and best_track[-ga.stagnation_generations - 1] - best_now
            < ga.objective_tolerance_db
        ):
            break

    feasible = viol <= constraints.epsilon_m
    if not np.any(feasible):
        raise OptimizationError(
            "no distance-feasible profile found",
            diagnostics={"best_violation_m": float(viol.min()), "generations": len(best_track)},
        )
    idx = int(np.flatnonzero(feasible)[0])
    best = pop[idx]
    profile = SpeedProfile(speeds_kt=best, dt_h=dt_h)
    return profile, obj.ledger(best)


def write_profile_csv(path, profile: SpeedProfile) -> None:
    from pathlib import Path

    lines = ["leg_index,t_start_h,v_knots,cumulative_nm"]
    cum = 0.0
    for i, v in enumerate(profile.speeds_kt):
        t = i * profile.dt_h
        cum += float(v) * profile.dt_h
        lines.append(f"{i},{t!r},{float(v)!r},{cum!r}")
    Path(path).write_text("\n".join(lines) + "\n")
