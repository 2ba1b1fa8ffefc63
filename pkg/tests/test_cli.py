import json
from pathlib import Path

import pytest

from quietvoyage.cli import main


def run_cli(*args) -> int:
    return main(list(args))


class TestCliValidation:
    def test_unknown_flag_exits_1(self, capsys):
        assert run_cli("--bogus-flag", "compare", "x.json") == 1

    def test_missing_config_exits_1(self, tmp_path, capsys):
        assert run_cli("compare", str(tmp_path / "nope.json")) == 1
        assert "error" in capsys.readouterr().err

    def test_baseline_without_ais_exits_1(self, quick_scenario_path, tmp_path, capsys):
        code = run_cli(
            "--out-dir", str(tmp_path), "simulate", str(quick_scenario_path), "--baseline"
        )
        assert code == 1
        assert "ais_track" in capsys.readouterr().err

    def test_version_flag(self):
        assert run_cli("--version") == 0


class TestCliPipeline:
    def test_precompute_and_fit(self, fixture_dir, tmp_path, capsys):
        # a second scenario sharing the region but with its own cache dir
        raw = json.loads((fixture_dir / "strait_m1.json").read_text())
        raw["data"]["tl_cache_dir"] = str(tmp_path / "cache2")
        p = fixture_dir / "own_cache.json"
        p.write_text(json.dumps(raw))
        assert run_cli("precompute-tl", str(p)) == 0
        assert (tmp_path / "cache2" / "tl_cache.csv").is_file()
        assert run_cli("fit-rbf", str(p)) == 0
        assert (tmp_path / "cache2" / "rbf_interpolant.csv").is_file()

    def test_fit_rbf_without_cache_exits_1(self, fixture_dir, tmp_path, capsys):
        raw = json.loads((fixture_dir / "strait_m1.json").read_text())
        raw["data"]["tl_cache_dir"] = str(tmp_path / "missing_cache")
        p = fixture_dir / "no_cache.json"
        p.write_text(json.dumps(raw))
        assert run_cli("fit-rbf", str(p)) == 1

    def test_plan_writes_route(self, quick_scenario_path, tmp_path, capsys):
        out = tmp_path / "plan_out"
        assert run_cli("--out-dir", str(out), "plan", str(quick_scenario_path)) == 0
        lines = (out / "route.csv").read_text().splitlines()
        assert lines[0] == "index,lat,lon,cumulative_nm"
        assert len(lines) >= 3

    def test_simulate_baseline_with_ais(self, fixture_dir, strait_cfg, tmp_path, capsys):
        # attach the bundled track to the quick scenario
        raw = json.loads((fixture_dir / "strait_m1_quick.json").read_text())
        raw["ais_track"] = "./ais_track.csv"
        raw["eta_h"] = 12.36
        p = fixture_dir / "quick_with_ais.json"
        p.write_text(json.dumps(raw))
        out = tmp_path / "base_out"
        assert run_cli("--out-dir", str(out), "simulate", str(p), "--baseline") == 0
        lines = (out / "baseline_events.csv").read_text().splitlines()
        assert lines[0].startswith("t_h,ship_lat,ship_lon,v_kt")
        assert (out / "baseline_footprint.csv").is_file()

    def test_compare_emits_delta_column(self, quick_scenario_path, tmp_path, capsys):
        out = tmp_path / "cmp_out"
        assert run_cli("--out-dir", str(out), "compare", str(quick_scenario_path)) == 0
        lines = (out / "comparison.csv").read_text().splitlines()
        assert "delta_sel_db" in lines[0]
        assert lines[-1].startswith("mean,")
        assert (out / "result.json").is_file()
        assert (out / "summary.txt").is_file()

    def test_simulate_deterministic_bytes(self, quick_scenario_path, tmp_path, capsys):
        out1 = tmp_path / "d1"
        out2 = tmp_path / "d2"
        assert run_cli("--out-dir", str(out1), "simulate", str(quick_scenario_path)) == 0
        assert run_cli("--out-dir", str(out2), "simulate", str(quick_scenario_path)) == 0
        a = (out1 / "optimized_events.csv").read_bytes()
        b = (out2 / "optimized_events.csv").read_bytes()
        assert a == b
        fa = (out1 / "optimized_footprint.csv").read_bytes()
        fb = (out2 / "optimized_footprint.csv").read_bytes()
        assert fa == fb
