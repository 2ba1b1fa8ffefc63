"""Command-line entry points.

Exit status: 0 on success, 1 on validation problems (bad config, bad flags,
infeasible constraints), 2 on runtime failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, pipeline
from .scenario import IngestError, ScenarioError, parse_scenario
from .sim import comparison_summary, footprint, run_voyage, write_event_log_csv, write_footprint_csv
from .speed import InfeasibleConstraints, OptimizationError
from .planner import PlanningError

log = logging.getLogger("quietvoyage")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quietvoyage",
        description="plan and replay ship voyages that minimize underwater noise exposure",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--seed", type=int, default=None,
                    help="override every scenario seed with this value")
    ap.add_argument("--out-dir", default="out", help="directory for output files")
    ap.add_argument("--log-level", default="INFO",
                    choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = ap.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("precompute-tl", "sample the transmission-loss field into the scenario cache"),
        ("fit-rbf", "fit the fast TL surrogate from the precomputed cache"),
        ("plan", "plan the noise-aware route and write it as CSV"),
        ("simulate", "simulate a voyage and write logs and footprint reports"),
        ("compare", "run baseline and optimized voyages and write the comparison"),
        ("serve", "start the HTTP service"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="scenario file")
        if name == "simulate":
            p.add_argument("--baseline", action="store_true",
                           help="replay the recorded baseline track instead of optimizing")
        if name == "serve":
            p.add_argument("--port", type=int, default=8080)
    return ap


def _apply_seed_override(cfg, seed: int | None):
    if seed is not None:
        cfg.seed_planner = seed
        cfg.seed_ga = seed
        cfg.seed_wildlife = seed
    return cfg


def _write_bundle(bundle, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)

    def csv_from_rows(path: Path, rows: list[dict]):
        if not rows:
            path.write_text("")
            return
        cols = list(rows[0])
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c])
                                   for c in cols))
        path.write_text("\n".join(lines) + "\n")

    csv_from_rows(out_dir / "baseline_route.csv", bundle.baseline_route_csv)
    csv_from_rows(out_dir / "optimized_route.csv", bundle.optimized_route_csv)
    csv_from_rows(out_dir / "baseline_profile.csv", bundle.baseline_profile_csv)
    csv_from_rows(out_dir / "optimized_profile.csv", bundle.optimized_profile_csv)
    csv_from_rows(out_dir / "comparison.csv", _comparison_rows(bundle.comparison))
    (out_dir / "result.json").write_text(json.dumps(bundle.to_json_dict()) + "\n")
    if bundle.comparison.get("rows"):
        from .sim import ComparisonRow, ComparisonTable

        table = ComparisonTable(
            rows=[ComparisonRow(**r) for r in bundle.comparison["rows"]],
            baseline_mean_sel_db=bundle.comparison["baseline_mean_sel_db"],
            optimized_mean_sel_db=bundle.comparison["optimized_mean_sel_db"],
            delta_mean_sel_db=bundle.comparison["delta_mean_sel_db"],
            mean_percent_reduction=bundle.comparison["mean_percent_reduction"],
            baseline_eta_h=bundle.comparison["baseline_eta_h"],
            optimized_eta_h=bundle.comparison["optimized_eta_h"],
            baseline_tdt_nm=bundle.comparison["baseline_tdt_nm"],
            optimized_tdt_nm=bundle.comparison["optimized_tdt_nm"],
        )
        (out_dir / "summary.txt").write_text(comparison_summary(table) + "\n")
    base_log, opt_log = getattr(bundle, "_logs", (None, None))
    if base_log is not None:
        write_event_log_csv(out_dir / "baseline_events.csv", base_log)
    if opt_log is not None:
        write_event_log_csv(out_dir / "optimized_events.csv", opt_log)


def _comparison_rows(comparison: dict) -> list[dict]:
    rows = [dict(r) for r in comparison.get("rows", [])]
    if comparison.get("delta_mean_sel_db") is not None:
        rows.append(
            {
                "mammal_id": "mean",
                "baseline_sel_db": comparison["baseline_mean_sel_db"],
                "optimized_sel_db": comparison["optimized_mean_sel_db"],
                "delta_sel_db": comparison["delta_mean_sel_db"],
                "percent_reduction": comparison["mean_percent_reduction"],
            }
        )
    return rows


def _cmd_precompute(cfg, out_dir: Path) -> int:
    env = pipeline.load_environment(cfg)
    pipeline.precompute_tl(cfg, env)
    print(f"TL cache written to {cfg.tl_cache_dir}")
    return 0


def _cmd_fit_rbf(cfg, out_dir: Path) -> int:
    if pipeline.cache_missing(cfg):
        print(f"error: TL cache missing in {cfg.tl_cache_dir}; run precompute-tl first",
              file=sys.stderr)
        return 1
    interp = pipeline.fit_rbf(cfg)
    print(f"surrogate fitted: {interp.centers.shape[0]} centers, sigma={interp.sigma:.4f}")
    return 0


def _cmd_plan(cfg, out_dir: Path) -> int:
    env = pipeline.load_environment(cfg)
    interp = pipeline.load_interpolant(cfg)
    mammals = pipeline.build_mammals(cfg, env)
    route = pipeline.plan_optimized_route(cfg, env, interp if mammals else None, mammals)
    out_dir.mkdir(parents=True, exist_ok=True)
    from .planner import write_route_csv

    write_route_csv(out_dir / "route.csv", route)
    print(f"route: {len(route.waypoints)} waypoints, {route.length_nm:.2f} NM, "
          f"cost {route.cost:.2f}; written to {out_dir / 'route.csv'}")
    return 0


def _cmd_simulate(cfg, out_dir: Path, baseline: bool) -> int:
    env = pipeline.load_environment(cfg)
    interp = pipeline.load_interpolant(cfg)
    mammals = pipeline.build_mammals(cfg, env)
    out_dir.mkdir(parents=True, exist_ok=True)
    if baseline:
        if cfg.ais_track is None:
            print("error: simulate --baseline needs an ais_track path in the scenario",
                  file=sys.stderr)
            return 1
        route, profile, info = pipeline.baseline_voyage(cfg, env)
        log_csv = out_dir / "baseline_events.csv"
        fp_csv = out_dir / "baseline_footprint.csv"
    else:
        route = pipeline.plan_optimized_route(cfg, env, interp if mammals else None, mammals)
        from .speed import VoyageConstraints, optimize_speeds

        constraints = VoyageConstraints(
            eta_h=cfg.eta_h, path_length_nm=route.length_nm,
            v_min_kt=cfg.ship.v_min_kt, v_max_kt=cfg.ship.v_max_kt,
        )
        if mammals:
            profile, _ = optimize_speeds(
                route, constraints, mammals, cfg.ship, interp, pipeline.ga_config(cfg),
                n_legs=cfg.n_legs, grid=env.grid, mask=env.mask,
            )
        else:
            from .speed import SpeedProfile

            v = route.length_nm / cfg.eta_h
            profile = SpeedProfile(np.full(cfg.n_legs, v), cfg.eta_h / cfg.n_legs)
        log_csv = out_dir / "optimized_events.csv"
        fp_csv = out_dir / "optimized_footprint.csv"

    rng = np.random.default_rng(cfg.seed_wildlife + 1)
    log = run_voyage(
        route, profile, mammals, cfg.ship, interp if mammals else None,
        env.grid, env.mask,
        replan_cadence_h=0.0 if baseline else cfg.replan_cadence_h,
        rng=rng, ga=pipeline.ga_config(cfg) if not baseline else None,
        v_bounds_kt=(cfg.ship.v_min_kt, cfg.ship.v_max_kt),
    )
    write_event_log_csv(log_csv, log)
    print(f"event log written to {log_csv}")
    if mammals:
        report = footprint(log)
        write_footprint_csv(fp_csv, report)
        print(f"footprint written to {fp_csv} (mean SEL {report.mean_sel_db:.2f} dB)")
    return 0


def _cmd_compare(cfg, out_dir: Path) -> int:
    bundle = pipeline.run_comparison(cfg)
    _write_bundle(bundle, out_dir)
    print(f"comparison written to {out_dir}")
    if bundle.comparison.get("delta_mean_sel_db") is not None:
        print(
            f"delta J_s: {bundle.comparison['delta_mean_sel_db']:+.2f} dB "
            f"({bundle.comparison['mean_percent_reduction']:.2f}% reduction)"
        )
    return 0


def _cmd_serve(cfg, port: int) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(cfg)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return 0


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the CLI contract wants 1
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(level=getattr(logging, args.log_level))
    out_dir = Path(args.out_dir)

    try:
        cfg = _apply_seed_override(parse_scenario(args.config), args.seed)
        if args.command == "precompute-tl":
            return _cmd_precompute(cfg, out_dir)
        if args.command == "fit-rbf":
            return _cmd_fit_rbf(cfg, out_dir)
        if args.command == "plan":
            return _cmd_plan(cfg, out_dir)
        if args.command == "simulate":
            return _cmd_simulate(cfg, out_dir, args.baseline)
        if args.command == "compare":
            return _cmd_compare(cfg, out_dir)
        if args.command == "serve":
            return _cmd_serve(cfg, args.port)
        print(f"error: unknown command {args.command}", file=sys.stderr)
        return 1
    except (ScenarioError, IngestError, InfeasibleConstraints) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PlanningError, OptimizationError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        log.exception("unhandled failure")
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
