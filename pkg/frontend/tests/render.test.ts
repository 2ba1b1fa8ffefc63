import { describe, expect, it } from "vitest";

import resultA from "./fixtures/result_m1.json";
import { buildResultView } from "../src/render.js";
import type { ResultBundle } from "../src/types.js";

const bundle = resultA as unknown as ResultBundle;

describe("buildResultView", () => {
  it("headline strings are the exact stringification of bundle fields", () => {
    const view = buildResultView(bundle);
    expect(view.headline).not.toBeNull();
    expect(view.headline!.delta_js_db).toBe(String(bundle.comparison.delta_mean_sel_db));
    expect(view.headline!.percent_reduction).toBe(
      String(bundle.comparison.mean_percent_reduction)
    );
    expect(view.headline!.baseline_mean_sel_db).toBe(
      String(bundle.comparison.baseline_mean_sel_db)
    );
  });

  it("is idempotent: identical payloads produce identical view models", () => {
    const a = buildResultView(bundle);
    const b = buildResultView(JSON.parse(JSON.stringify(bundle)) as ResultBundle);
    expect(b).toEqual(a);
  });

  it("builds both route layers with speed coloring on the optimized one", () => {
    const view = buildResultView(bundle);
    const baseline = view.mapLayers.find((l) => l.kind === "baseline-route")!;
    const optimized = view.mapLayers.find((l) => l.kind === "optimized-route")!;
    expect(baseline.points.length).toBe(bundle.baseline_route.length);
    expect(optimized.points.length).toBe(bundle.optimized_route.length);
    expect(optimized.speeds_kt).toHaveLength(bundle.optimized_route.length);
    const vmin = Math.min(...bundle.optimized_profile.map((r) => r.v_knots));
    const vmax = Math.max(...bundle.optimized_profile.map((r) => r.v_knots));
    for (const v of optimized.speeds_kt!) {
      expect(v).toBeGreaterThanOrEqual(vmin - 1e-12);
      expect(v).toBeLessThanOrEqual(vmax + 1e-12);
    }
  });

  it("chart series carry the raw profile and SPL arrays", () => {
    const view = buildResultView(bundle);
    const opt = view.speedChart.find((s) => s.label.includes("optimized"))!;
    expect(opt.y).toEqual(bundle.optimized_profile.map((r) => r.v_knots));
    expect(view.splCharts.length).toBeGreaterThan(0);
    expect(view.splCharts[0].x).toEqual(bundle.optimized_footprint.t_h);
  });

  it("SEL bars mirror the comparison rows exactly", () => {
    const view = buildResultView(bundle);
    expect(view.selBars).toHaveLength(bundle.comparison.rows.length);
    view.selBars.forEach((bar, i) => {
      const row = bundle.comparison.rows[i];
      expect(bar.baseline_sel_db).toBe(row.baseline_sel_db);
      expect(bar.optimized_sel_db).toBe(row.optimized_sel_db);
      expect(bar.delta_sel_db).toBe(row.delta_sel_db);
      expect(bar.percent_reduction).toBe(row.percent_reduction);
    });
  });

  it("hides acoustic panels for mammal-free scenarios", () => {
    const empty = JSON.parse(JSON.stringify(bundle)) as ResultBundle;
    empty.optimized_footprint = { mammal_ids: [], sel_db: [], mean_sel_db: null };
    empty.baseline_footprint = { mammal_ids: [], sel_db: [], mean_sel_db: null };
    empty.comparison = { rows: [], delta_mean_sel_db: null, mean_percent_reduction: null };
    const view = buildResultView(empty);
    expect(view.hasAcoustics).toBe(false);
    expect(view.headline).toBeNull();
    expect(view.splCharts).toHaveLength(0);
    expect(view.selBars).toHaveLength(0);
  });
});
