import math

import numpy as np
import pytest

from quietvoyage.geo import METERS_PER_NM, BathymetryGrid, GeoPoint, RegionMask
from quietvoyage.planner import Route, Se2State
from quietvoyage.propagation import LatticeSpec, precompute_field, rbf_fit, rbf_eval_batch
from quietvoyage.sim import (
    ComparisonTable,
    EventLog,
    compare,
    comparison_summary,
    footprint,
    reduction_percent,
    run_voyage,
    write_comparison_csv,
    write_event_log_csv,
    write_footprint_csv,
)
from quietvoyage.source import ShipClass, ShipSpec, source_spectrum
from quietvoyage.speed import SpeedProfile
from quietvoyage.wildlife import MammalState

SHIP = ShipSpec("test_ship", 0, ShipClass.OTHER, 684.97, 8.0, 16.0)


def straight_route(length_nm, ref=GeoPoint(48.05, -123.55)):
    return Route(waypoints=[Se2State(0, 0), Se2State(length_nm * METERS_PER_NM, 0)], ref=ref)


def open_grid():
    return BathymetryGrid(GeoPoint(47.9, -123.7), 0.01, np.full((90, 220), 200.0))


def small_interp(route, radius_m=25000.0):
    grid = open_grid()
    k = math.pi / 180.0 * 6_371_000.0
    pts = route.points_at_distances(np.linspace(0, route.length_m, 4))
    sources = [
        GeoPoint(route.ref.lat + y / k,
                 route.ref.lon + x / (k * math.cos(math.radians(route.ref.lat))))
        for x, y in pts
    ]
    lattice = LatticeSpec(radius_m=radius_m, n_nodes=40, depths_m=(1.0, 50.0, 100.0))
    cache = precompute_field(sources, radius_m, grid, lattice)
    clusters = min(100, cache.inputs.shape[0] // 3)
    return rbf_fit(cache, clusters=clusters, per_cluster=3, seed=1), grid


class TestReductionPercent:
    def test_zero(self):
        assert reduction_percent(0.0) == 0.0

    def test_half_power(self):
        assert reduction_percent(3.0103) == pytest.approx(50.0, abs=1e-3)

    def test_published_pairs(self):
        assert reduction_percent(7.14) == pytest.approx(80.68, abs=0.05)
        assert reduction_percent(4.90) == pytest.approx(67.6, abs=0.2)
        assert reduction_percent(0.92) == pytest.approx(19.11, abs=0.2)

    def test_signed_for_increase(self):
        assert reduction_percent(-3.0103) == pytest.approx(-50.0, abs=1e-3)


class TestRunVoyage:
    def test_zero_mammals_completes_at_eta(self):
        route = straight_route(12.0)
        profile = SpeedProfile([12.0] * 4, 0.25)  # 1 h voyage, TDT 12 NM
        log = run_voyage(route, profile, [], SHIP, None, replan_cadence_h=0.0)
        assert log.nl_db.shape[0] == 0
        assert log.times_h[-1] == pytest.approx(1.0, abs=1.0 / 60.0)
        assert log.progress_nm[-1] == pytest.approx(12.0, rel=1e-3)

    def test_constant_profile_nl_matches_closed_form(self):
        route = straight_route(6.0)
        profile = SpeedProfile([12.0, 12.0], 0.25)  # 0.5 h
        interp, grid = small_interp(route)
        mammal = MammalState(1, GeoPoint(48.14, -123.45, 10.0), 0.0, 0.0)
        log = run_voyage(route, profile, [mammal], SHIP, interp, replan_cadence_h=0.0)
        nls = source_spectrum(12.0, SHIP)
        k = math.pi / 180.0 * 6_371_000.0
        for i, t in enumerate(log.times_h):
            d_nm = profile.distance_at(float(t))
            p = route.point_at_distance(d_nm * METERS_PER_NM)
            lat = route.ref.lat + p.y / k
            lon = route.ref.lon + p.x / (k * math.cos(math.radians(route.ref.lat)))
            tl30, _ = rbf_eval_batch(
                interp, np.array([[lat, lon, 48.14, -123.45, 10.0]])
            )
            want = 10.0 * math.log10(np.sum(np.power(10.0, (nls - tl30[0]) / 10.0)))
            assert log.nl_db[0, i] == pytest.approx(want, abs=1e-6)

    def test_cumulative_distance_matches_tdt(self):
        route = straight_route(10.0)
        profile = SpeedProfile([8.0, 12.0, 10.0, 10.0], 0.25)
        log = run_voyage(route, profile, [], SHIP, None, replan_cadence_h=0.0)
        assert log.progress_nm[-1] == pytest.approx(10.0, rel=1e-3)

    def test_inconsistent_profile_rejected(self):
        route = straight_route(10.0)
        profile = SpeedProfile([16.0] * 4, 1.0)  # 64 NM vs 10 NM route
        with pytest.raises(ValueError):
            run_voyage(route, profile, [], SHIP, None)

    def test_deterministic_with_moving_mammals(self):
        route = straight_route(6.0)
        profile = SpeedProfile([12.0, 12.0], 0.25)
        interp, grid = small_interp(route)
        mask = RegionMask.from_grid(grid)
        mammals = [
            MammalState(1, GeoPoint(48.1, -123.45, 10.0), 1.5, 45.0),
            MammalState(2, GeoPoint(48.11, -123.5, 20.0), 2.0, 200.0),
        ]
        a = run_voyage(route, profile, mammals, SHIP, interp, grid, mask,
                       replan_cadence_h=0.0, rng=np.random.default_rng(4))
        b = run_voyage(route, profile, mammals, SHIP, interp, grid, mask,
                       replan_cadence_h=0.0, rng=np.random.default_rng(4))
        np.testing.assert_array_equal(a.nl_db, b.nl_db)
        np.testing.assert_array_equal(a.mammal_lat, b.mammal_lat)

    def test_replanning_path_runs(self):
        route = straight_route(6.0)
        profile = SpeedProfile([12.0, 12.0, 12.0, 12.0], 0.125)  # 0.5 h
        interp, grid = small_interp(route)
        mask = RegionMask.from_grid(grid)
        mammal = MammalState(1, GeoPoint(48.12, -123.47, 10.0), 0.0, 0.0)
        from quietvoyage.speed import GaConfig

        log = run_voyage(
            route, profile, [mammal], SHIP, interp, grid, mask,
            replan_cadence_h=0.2, rng=np.random.default_rng(0),
            ga=GaConfig(population=30, max_generations=5, seed=1),
            v_bounds_kt=(8.0, 16.0),
        )
        assert log.progress_nm[-1] == pytest.approx(6.0, rel=0.02)


class TestFootprint:
    def _constant_log(self, level_db=100.0, hours=1.0, dt=1.0 / 60.0):
        n = int(round(hours / dt)) + 1
        times = np.linspace(0.0, hours, n)
        z = np.zeros(n)
        return EventLog(
            times_h=times,
            ship_lat=z + 48.0,
            ship_lon=z - 123.0,
            v_kt=z + 10.0,
            progress_nm=np.linspace(0, 10.0, n),
            mammal_ids=[1],
            mammal_lat=np.full((1, n), 48.1),
            mammal_lon=np.full((1, n), -123.1),
            mammal_depth=np.full((1, n), 10.0),
            nl_db=np.full((1, n), level_db),
        )

    def test_constant_hour(self):
        report = footprint(self._constant_log())
        assert report.sel_total_db[0] == pytest.approx(100.0, abs=0.01)
        assert report.mean_sel_db == pytest.approx(report.sel_total_db[0])

    def test_tick_refinement(self):
        coarse = footprint(self._constant_log(dt=1.0 / 60.0))
        fine = footprint(self._constant_log(dt=1.0 / 120.0))
        assert abs(coarse.sel_total_db[0] - fine.sel_total_db[0]) < 0.01

    def test_matches_leg_arithmetic(self):
        # piecewise-constant levels: 0.5 h at 100 dB then 0.5 h at 110 dB
        n = 61
        times = np.linspace(0.0, 1.0, n)
        nl = np.where(times[:-1] < 0.5, 100.0, 110.0)
        nl = np.append(nl, 110.0)[None, :]
        z = np.zeros(n)
        log = EventLog(
            times_h=times, ship_lat=z, ship_lon=z, v_kt=z, progress_nm=np.linspace(0, 1, n),
            mammal_ids=[1], mammal_lat=z[None, :], mammal_lon=z[None, :],
            mammal_depth=z[None, :], nl_db=nl,
        )
        from quietvoyage.speed import sel_total

        want = sel_total([100.0, 110.0], 0.5)
        got = footprint(log).sel_total_db[0]
        assert got == pytest.approx(want, abs=0.05)

    def test_empty_log_rejected(self):
        log = self._constant_log()
        log.nl_db = np.empty((0, log.times_h.size))
        with pytest.raises(ValueError):
            footprint(log)


class TestCompare:
    def _report(self, sels, eta=1.0, dist=10.0):
        n = 3
        times = np.linspace(0, 1.0, n)
        m = len(sels)
        from quietvoyage.sim import FootprintReport

        return FootprintReport(
            mammal_ids=list(range(1, m + 1)),
            spl_series_db=np.zeros((m, n)),
            times_h=times,
            sel_total_db=np.array(sels, dtype=float),
            mean_sel_db=float(np.mean(sels)),
            eta_h=eta,
            tdt_nm=dist,
        )

    def test_identical_reports(self):
        a = self._report([100.0, 105.0])
        table = compare(a, a)
        assert table.delta_mean_sel_db == 0.0
        assert table.mean_percent_reduction == 0.0
        for row in table.rows:
            assert row.delta_sel_db == 0.0 and row.percent_reduction == 0.0

    def test_published_identity_714(self):
        base = self._report([117.81])
        opt = self._report([110.67])
        table = compare(base, opt)
        assert table.delta_mean_sel_db == pytest.approx(-7.14, abs=1e-9)
        assert table.mean_percent_reduction == pytest.approx(80.68, abs=0.05)

    def test_published_identity_490(self):
        base = self._report([118.55])
        opt = self._report([113.65])
        table = compare(base, opt)
        assert table.mean_percent_reduction == pytest.approx(67.6, abs=0.2)

    def test_antisymmetry(self):
        a = self._report([100.0, 104.0, 96.0])
        b = self._report([98.0, 106.0, 95.0])
        ab = compare(a, b)
        ba = compare(b, a)
        assert ab.delta_mean_sel_db == pytest.approx(-ba.delta_mean_sel_db, abs=1e-12)
        for ra, rb in zip(ab.rows, ba.rows):
            assert ra.delta_sel_db == pytest.approx(-rb.delta_sel_db, abs=1e-12)

    def test_id_mismatch(self):
        a = self._report([100.0])
        b = self._report([100.0, 101.0])
        with pytest.raises(ValueError):
            compare(a, b)

    def test_summary_text(self):
        table = compare(self._report([117.81]), self._report([110.67]))
        text = comparison_summary(table)
        assert "-7.14" in text and "80.68" in text


class TestPersistence:
    def test_event_log_csv(self, tmp_path):
        route = straight_route(3.0)
        profile = SpeedProfile([12.0], 0.25)
        interp, grid = small_interp(route, radius_m=15000.0)
        mammal = MammalState(1, GeoPoint(48.1, -123.5, 10.0), 0.0, 0.0)
        log = run_voyage(route, profile, [mammal], SHIP, interp, replan_cadence_h=0.0)
        path = tmp_path / "log.csv"
        write_event_log_csv(path, log)
        lines = path.read_text().splitlines()
        assert lines[0] == "t_h,ship_lat,ship_lon,v_kt,m1_lat,m1_lon,m1_depth,m1_nl_db"
        assert len(lines) == log.times_h.size + 1
        # values round-trip through repr
        first = lines[1].split(",")
        assert float(first[0]) == log.times_h[0]
        assert float(first[7]) == log.nl_db[0, 0]

    def test_footprint_and_comparison_csv(self, tmp_path):
        times = np.linspace(0, 1.0, 61)
        z = np.zeros(61)
        log = EventLog(
            times_h=times, ship_lat=z, ship_lon=z, v_kt=z,
            progress_nm=np.linspace(0, 10, 61),
            mammal_ids=[1, 2],
            mammal_lat=np.zeros((2, 61)), mammal_lon=np.zeros((2, 61)),
            mammal_depth=np.zeros((2, 61)),
            nl_db=np.vstack([np.full(61, 100.0), np.full(61, 104.0)]),
        )
        rep = footprint(log)
        write_footprint_csv(tmp_path / "fp.csv", rep)
        body = (tmp_path / "fp.csv").read_text().splitlines()
        assert body[0] == "mammal_id,sel_db"
        assert len(body) == 4  # two mammals + mean

        table = compare(rep, rep)
        write_comparison_csv(tmp_path / "cmp.csv", table)
        body = (tmp_path / "cmp.csv").read_text().splitlines()
        assert body[0].startswith("mammal_id,baseline_sel_db")
        assert body[-1].startswith("mean,")
