"""Noise-aware route planning in the bundled strait region.

Plans the strait voyage twice: once with no mammals (pure shortest path) and
once with the pinned mammal and the TL surrogate driving the local cost.
Builds the TL cache on first run (about half a minute).
"""
import time
from pathlib import Path

from quietvoyage import pipeline
from quietvoyage.planner import PlannerConfig, plan_route
from quietvoyage.scenario import parse_scenario

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

cfg = parse_scenario(FIXTURES / "strait_m1.json")
env = pipeline.load_environment(cfg)

if pipeline.cache_missing(cfg):
    print("TL cache missing; sampling the field (one-time, ~30 s)...")
    t0 = time.time()
    pipeline.precompute_tl(cfg, env)
    print(f"  done in {time.time() - t0:.0f} s")
interp = pipeline.load_interpolant(cfg)
mammals = pipeline.build_mammals(cfg, env)
print(f"scenario: {cfg.departure.lat:.3f},{cfg.departure.lon:.3f} -> "
      f"{cfg.destination.lat:.3f},{cfg.destination.lon:.3f}, ETA {cfg.eta_h} h, "
      f"{len(mammals)} mammal(s)")

pc = PlannerConfig(batch_size=cfg.planner_batch_size, max_batches=cfg.planner_max_batches,
                   seed=cfg.seed_planner, min_depth_m=cfg.min_depth_m)

print("\n=== Shortest-path planning (no mammals) ===")
plain = plan_route(cfg.departure, cfg.destination, [], None, env.grid, env.mask, pc)
print(f"  {len(plain.waypoints)} waypoints, {plain.length_nm:.2f} NM, "
      f"cost {plain.cost:.2f} (offset units)")

print("\n=== Noise-aware planning (pinned mammal + surrogate) ===")
aware = plan_route(cfg.departure, cfg.destination, mammals, interp, env.grid, env.mask, pc)
print(f"  {len(aware.waypoints)} waypoints, {aware.length_nm:.2f} NM, "
      f"cost {aware.cost:.2f}")
print(f"  length premium over shortest path: "
      f"{(aware.length_nm / plain.length_nm - 1) * 100:.2f}%")
print(f"  incumbent history (planner objective): "
      f"{['%.3g' % c for c in aware.incumbent_history]}")
