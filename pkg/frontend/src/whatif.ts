/** Side-by-side comparison of two completed results: overlaid routes, paired
 * SEL bars, and a delta-of-deltas table.  Results from different regions
 * (different server-side environment data) cannot be compared.
 */
import type { MapLayer } from "./render.js";
import type { ResultBundle } from "./types.js";

export interface PairedSelBar {
  mammal_id: number;
  delta_a_db: number;
  delta_b_db: number;
  delta_delta_db: number;
}

export interface WhatIfView {
  enabled: boolean;
  disabledReason?: string;
  overlaidRoutes: MapLayer[];
  pairedBars: PairedSelBar[];
  headline: {
    delta_a_db: string;
    delta_b_db: string;
    delta_delta_db: string;
  } | null;
}

function regionOf(bundle: ResultBundle): string {
  const data = (bundle.config as { data?: { bathymetry?: string } }).data;
  return data?.bathymetry ?? "";
}

export function whatifCompare(a: ResultBundle, b: ResultBundle): WhatIfView {
  if (regionOf(a) !== regionOf(b)) {
    return {
      enabled: false,
      disabledReason: "results come from different regions",
      overlaidRoutes: [],
      pairedBars: [],
      headline: null,
    };
  }

  const overlaidRoutes: MapLayer[] = [
    {
      kind: "optimized-route",
      label: "variant A optimized route",
      points: a.optimized_route.map((r) => ({ lat: r.lat, lon: r.lon })),
    },
    {
      kind: "optimized-route",
      label: "variant B optimized route",
      points: b.optimized_route.map((r) => ({ lat: r.lat, lon: r.lon })),
    },
  ];

  const byIdB = new Map(b.comparison.rows.map((r) => [r.mammal_id, r]));
  const pairedBars: PairedSelBar[] = [];
  for (const rowA of a.comparison.rows) {
    const rowB = byIdB.get(rowA.mammal_id);
    if (rowB === undefined) continue;
    pairedBars.push({
      mammal_id: rowA.mammal_id,
      delta_a_db: rowA.delta_sel_db,
      delta_b_db: rowB.delta_sel_db,
      delta_delta_db: rowB.delta_sel_db - rowA.delta_sel_db,
    });
  }

  const da = a.comparison.delta_mean_sel_db;
  const db = b.comparison.delta_mean_sel_db;
  const headline =
    da === null || db === null
      ? null
      : {
          delta_a_db: String(da),
          delta_b_db: String(db),
          delta_delta_db: String(db - da),
        };

  return { enabled: true, overlaidRoutes, pairedBars, headline };
}
