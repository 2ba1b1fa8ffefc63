/** Client-side draft validation mirroring the server's scenario rules, so
 * obviously bad drafts are blocked before submission.  The server remains
 * authoritative; these checks only mirror it.
 */
import type { FieldError, ScenarioDraft } from "./types.js";

const EARTH_RADIUS_M = 6371000;
const M_PER_NM = 1852;

export function straightLineNm(draft: ScenarioDraft): number {
  const k = (Math.PI / 180) * EARTH_RADIUS_M;
  const dy = (draft.destination.lat - draft.departure.lat) * k;
  const dx =
    (draft.destination.lon - draft.departure.lon) *
    k *
    Math.cos((draft.departure.lat * Math.PI) / 180);
  return Math.hypot(dx, dy) / M_PER_NM;
}

export function validateDraft(draft: ScenarioDraft): FieldError[] {
  const errors: FieldError[] = [];
  const push = (loc: string, msg: string) => errors.push({ loc, msg });

  const checkLatLon = (loc: string, p: { lat: number; lon: number }) => {
    if (!Number.isFinite(p.lat) || p.lat < -90 || p.lat > 90) {
      push(`${loc}.lat`, `latitude ${p.lat} outside [-90, 90]`);
    }
    if (!Number.isFinite(p.lon) || p.lon < -180 || p.lon > 180) {
      push(`${loc}.lon`, `longitude ${p.lon} outside [-180, 180]`);
    }
  };
  checkLatLon("departure", draft.departure);
  checkLatLon("destination", draft.destination);
  if (
    draft.departure.lat === draft.destination.lat &&
    draft.departure.lon === draft.destination.lon
  ) {
    push("destination", "must differ from departure");
  }

  if (!(draft.eta_h > 0)) {
    push("eta_h", `must be positive, got ${draft.eta_h}`);
  }

  const ship = draft.ship;
  if (!(ship.length_ft > 0)) push("ship.length_ft", "must be positive");
  if (!(ship.v_min_kt > 0) || !(ship.v_min_kt <= ship.v_max_kt)) {
    push("ship.v_min_kt", `need 0 < v_min <= v_max, got [${ship.v_min_kt}, ${ship.v_max_kt}]`);
  }

  // ETA feasibility against the straight-line lower bound on path length:
  // any real route is at least this long, so l/ETA > v_max can never work.
  if (draft.eta_h > 0 && ship.v_max_kt > 0) {
    const minSpeed = straightLineNm(draft) / draft.eta_h;
    if (minSpeed > ship.v_max_kt) {
      push(
        "eta_h",
        `infeasible: straight-line distance needs ${minSpeed.toFixed(1)} kt ` +
          `but v_max is ${ship.v_max_kt} kt`
      );
    }
  }

  if (draft.mammals !== undefined) {
    draft.mammals.forEach((m, i) => {
      if (!Number.isFinite(m.lat) || !Number.isFinite(m.lon)) {
        push(`mammals[${i}]`, "non-finite position");
      }
      if (!(m.depth_m >= 0 && m.depth_m <= 100)) {
        push(`mammals[${i}].depth_m`, `depth ${m.depth_m} outside [0, 100] m`);
      }
    });
  }
  if (draft.mammal_count !== undefined) {
    if (!Number.isInteger(draft.mammal_count) || draft.mammal_count < 0) {
      push("mammal_count", "must be a non-negative integer");
    }
  }
  return errors;
}
