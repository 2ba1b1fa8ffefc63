/** Pure view-model builders for the result screens.
 *
 * The console performs no acoustic or optimization arithmetic: every number
 * shown is a result-bundle field, and headline strings are the exact
 * stringification of those fields.  Builders are pure, so re-rendering the
 * same payload yields an identical view model.
 */
import type { Comparison, ProfileRow, ResultBundle, RouteRow } from "./types.js";

export interface MapLayer {
  kind: "baseline-route" | "optimized-route" | "mammal-track";
  label: string;
  points: { lat: number; lon: number }[];
  /** per-point speed for the speed-colored optimized route */
  speeds_kt?: number[];
  mammalId?: number;
}

export interface ChartSeries {
  label: string;
  x: number[];
  y: number[];
}

export interface SelBar {
  mammal_id: number;
  baseline_sel_db: number;
  optimized_sel_db: number;
  delta_sel_db: number;
  percent_reduction: number;
}

export interface Headline {
  delta_js_db: string;
  percent_reduction: string;
  baseline_mean_sel_db: string;
  optimized_mean_sel_db: string;
}

export interface ResultView {
  headline: Headline | null;
  mapLayers: MapLayer[];
  speedChart: ChartSeries[];
  splCharts: ChartSeries[];
  selBars: SelBar[];
  hasAcoustics: boolean;
}

function routeLayer(
  kind: MapLayer["kind"],
  label: string,
  rows: RouteRow[],
  profile?: ProfileRow[]
): MapLayer {
  const layer: MapLayer = {
    kind,
    label,
    points: rows.map((r) => ({ lat: r.lat, lon: r.lon })),
  };
  if (profile && profile.length > 0) {
    // speed at each route point: the profile leg active at that distance
    layer.speeds_kt = rows.map((r) => {
      let v = profile[0].v_knots;
      for (const leg of profile) {
        if (leg.cumulative_nm >= r.cumulative_nm) {
          v = leg.v_knots;
          break;
        }
        v = leg.v_knots;
      }
      return v;
    });
  }
  return layer;
}

export function buildHeadline(comparison: Comparison): Headline | null {
  if (comparison.delta_mean_sel_db === null || comparison.delta_mean_sel_db === undefined) {
    return null;
  }
  return {
    delta_js_db: String(comparison.delta_mean_sel_db),
    percent_reduction: String(comparison.mean_percent_reduction),
    baseline_mean_sel_db: String(comparison.baseline_mean_sel_db),
    optimized_mean_sel_db: String(comparison.optimized_mean_sel_db),
  };
}

export function buildResultView(bundle: ResultBundle): ResultView {
  const mapLayers: MapLayer[] = [
    routeLayer("baseline-route", "baseline route", bundle.baseline_route),
    routeLayer(
      "optimized-route",
      "optimized route (speed-colored)",
      bundle.optimized_route,
      bundle.optimized_profile
    ),
  ];

  const speedChart: ChartSeries[] = [
    {
      label: "baseline speed (kt)",
      x: bundle.baseline_profile.map((r) => r.t_start_h),
      y: bundle.baseline_profile.map((r) => r.v_knots),
    },
    {
      label: "optimized speed (kt)",
      x: bundle.optimized_profile.map((r) => r.t_start_h),
      y: bundle.optimized_profile.map((r) => r.v_knots),
    },
  ];

  const splCharts: ChartSeries[] = [];
  const fp = bundle.optimized_footprint;
  const base = bundle.baseline_footprint;
  const hasAcoustics = fp.mammal_ids.length > 0;
  if (hasAcoustics && fp.t_h && fp.spl_db) {
    fp.mammal_ids.forEach((mid, i) => {
      splCharts.push({
        label: `mammal ${mid} SPL optimized (dB)`,
        x: fp.t_h ?? [],
        y: fp.spl_db?.[i] ?? [],
      });
      if (base.t_h && base.spl_db) {
        splCharts.push({
          label: `mammal ${mid} SPL baseline (dB)`,
          x: base.t_h,
          y: base.spl_db[i],
        });
      }
    });
  }

  const selBars: SelBar[] = bundle.comparison.rows.map((r) => ({
    mammal_id: r.mammal_id,
    baseline_sel_db: r.baseline_sel_db,
    optimized_sel_db: r.optimized_sel_db,
    delta_sel_db: r.delta_sel_db,
    percent_reduction: r.percent_reduction,
  }));

  return {
    headline: buildHeadline(bundle.comparison),
    mapLayers,
    speedChart,
    splCharts,
    selBars,
    hasAcoustics,
  };
}
