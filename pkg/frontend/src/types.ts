/** Payload types mirroring the engine's result bundle and scenario schema.
 * Field names match the server's JSON keys and CSV column names exactly.
 */

export interface LatLon {
  lat: number;
  lon: number;
}

export interface ShipDraft {
  name: string;
  ais_type_id: number;
  ship_class: string;
  length_ft: number;
  v_min_kt: number;
  v_max_kt: number;
}

export interface MammalMarker {
  lat: number;
  lon: number;
  depth_m: number;
  speed_kt?: number;
  heading_deg?: number;
}

/** Editable mirror of the server scenario; data paths stay server-side. */
export interface ScenarioDraft {
  departure: LatLon;
  destination: LatLon;
  eta_h: number;
  ship: ShipDraft;
  mammals?: MammalMarker[];
  mammal_count?: number;
  seeds?: { planner?: number; ga?: number; wildlife?: number };
  ga_population?: number;
  ga_max_generations?: number;
  planner_batch_size?: number;
  planner_max_batches?: number;
}

export interface RouteRow {
  index: number;
  lat: number;
  lon: number;
  cumulative_nm: number;
}

export interface ProfileRow {
  leg_index: number;
  t_start_h: number;
  v_knots: number;
  cumulative_nm: number;
}

export interface Footprint {
  mammal_ids: number[];
  sel_db: number[];
  mean_sel_db: number | null;
  eta_h?: number;
  tdt_nm?: number;
  t_h?: number[];
  spl_db?: number[][];
}

export interface ComparisonRow {
  mammal_id: number;
  baseline_sel_db: number;
  optimized_sel_db: number;
  delta_sel_db: number;
  percent_reduction: number;
}

export interface Comparison {
  rows: ComparisonRow[];
  baseline_mean_sel_db?: number;
  optimized_mean_sel_db?: number;
  delta_mean_sel_db: number | null;
  mean_percent_reduction: number | null;
  baseline_eta_h?: number;
  optimized_eta_h?: number;
  baseline_tdt_nm?: number;
  optimized_tdt_nm?: number;
}

export interface ResultBundle {
  config: Record<string, unknown>;
  baseline_route: RouteRow[];
  optimized_route: RouteRow[];
  baseline_profile: ProfileRow[];
  optimized_profile: ProfileRow[];
  baseline_footprint: Footprint;
  optimized_footprint: Footprint;
  comparison: Comparison;
  metadata: Record<string, unknown>;
}

export interface JobState {
  id: string;
  scenario_id: string;
  status: "queued" | "running" | "done" | "failed";
  progress: number;
  stage: string;
  error?: string;
}

export interface TlTile {
  src_lat: number;
  src_lon: number;
  receiver_depth_m: number;
  lat: number[];
  lon: number[];
  tl_db: number[][];
  extrapolated_fraction: number;
}

export interface FieldError {
  loc: string;
  msg: string;
}
