/** Browser wiring: draft form, job progress, result rendering on canvas.
 * All numeric displays come straight from result-bundle fields; the modules
 * under test (validation, workflow, render, whatif) carry the logic.
 */
import { ApiClient } from "./api.js";
import type { MapLayer, ResultView } from "./render.js";
import { SessionStore } from "./store.js";
import type { ResultBundle, ScenarioDraft } from "./types.js";
import { DraftRejected, runAndPoll, submitScenario } from "./workflow.js";
import { whatifCompare } from "./whatif.js";

const api = new ApiClient("");
const store = new SessionStore();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function readDraft(): ScenarioDraft {
  const num = (id: string) => Number((el<HTMLInputElement>(id)).value);
  return {
    departure: { lat: num("dep-lat"), lon: num("dep-lon") },
    destination: { lat: num("dst-lat"), lon: num("dst-lon") },
    eta_h: num("eta"),
    ship: {
      name: el<HTMLInputElement>("ship-name").value,
      ais_type_id: num("ship-ais"),
      ship_class: el<HTMLInputElement>("ship-class").value,
      length_ft: num("ship-length"),
      v_min_kt: num("vmin"),
      v_max_kt: num("vmax"),
    },
    mammals: [
      {
        lat: num("m-lat"),
        lon: num("m-lon"),
        depth_m: num("m-depth"),
      },
    ],
    ga_population: 120,
    ga_max_generations: 25,
  };
}

function drawLayers(canvas: HTMLCanvasElement, layers: MapLayer[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pts = layers.flatMap((l) => l.points);
  if (pts.length === 0) return;
  const lats = pts.map((p) => p.lat);
  const lons = pts.map((p) => p.lon);
  const pad = 0.05;
  const latMin = Math.min(...lats) - pad;
  const latMax = Math.max(...lats) + pad;
  const lonMin = Math.min(...lons) - pad;
  const lonMax = Math.max(...lons) + pad;
  const toXY = (lat: number, lon: number): [number, number] => [
    ((lon - lonMin) / (lonMax - lonMin)) * canvas.width,
    canvas.height - ((lat - latMin) / (latMax - latMin)) * canvas.height,
  ];
  for (const layer of layers) {
    const speeds = layer.speeds_kt;
    for (let i = 1; i < layer.points.length; i++) {
      const [x0, y0] = toXY(layer.points[i - 1].lat, layer.points[i - 1].lon);
      const [x1, y1] = toXY(layer.points[i].lat, layer.points[i].lon);
      if (layer.kind === "optimized-route" && speeds) {
        const t = Math.max(0, Math.min(1, (speeds[i] - 8) / 8));
        ctx.strokeStyle = `rgb(${Math.round(255 * t)}, 60, ${Math.round(255 * (1 - t))})`;
        ctx.lineWidth = 3;
      } else if (layer.kind === "baseline-route") {
        ctx.strokeStyle = "#999";
        ctx.lineWidth = 1.5;
      } else {
        ctx.strokeStyle = "#2a2";
        ctx.lineWidth = 1;
      }
      ctx.beginPath();
      ctx.moveTo(x0, y0);
      ctx.lineTo(x1, y1);
      ctx.stroke();
    }
  }
}

function drawSeries(canvas: HTMLCanvasElement, series: { x: number[]; y: number[] }[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.y);
  if (allX.length === 0) return;
  const x0 = Math.min(...allX);
  const x1 = Math.max(...allX);
  const y0 = Math.min(...allY) - 1;
  const y1 = Math.max(...allY) + 1;
  const colors = ["#c33", "#36c", "#3a3", "#a3a"];
  series.forEach((s, k) => {
    ctx.strokeStyle = colors[k % colors.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    s.x.forEach((x, i) => {
      const px = ((x - x0) / (x1 - x0 || 1)) * canvas.width;
      const py = canvas.height - ((s.y[i] - y0) / (y1 - y0 || 1)) * canvas.height;
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  });
}

function renderResult(view: ResultView): void {
  const headline = el<HTMLDivElement>("headline");
  if (view.headline) {
    headline.textContent =
      `delta J_s: ${view.headline.delta_js_db} dB ` +
      `(${view.headline.percent_reduction}% exposure reduction)`;
  } else {
    headline.textContent = "feasibility-only profile (no mammals in scenario)";
  }
  drawLayers(el<HTMLCanvasElement>("map"), view.mapLayers);
  drawSeries(el<HTMLCanvasElement>("speed-chart"), view.speedChart);
  const splPanel = el<HTMLDivElement>("spl-panel");
  splPanel.style.display = view.hasAcoustics ? "block" : "none";
  if (view.hasAcoustics) {
    drawSeries(el<HTMLCanvasElement>("spl-chart"), view.splCharts);
  }
  const rows = view.selBars
    .map(
      (b) =>
        `<tr><td>${b.mammal_id}</td><td>${b.baseline_sel_db}</td>` +
        `<td>${b.optimized_sel_db}</td><td>${b.delta_sel_db}</td>` +
        `<td>${b.percent_reduction}</td></tr>`
    )
    .join("");
  el<HTMLTableElement>("sel-table").innerHTML =
    "<tr><th>mammal</th><th>baseline SEL</th><th>optimized SEL</th>" +
    "<th>delta dB</th><th>%</th></tr>" + rows;
}

function renderWhatIf(): void {
  const panel = el<HTMLDivElement>("whatif-panel");
  if (store.results.length < 2) {
    panel.textContent = "run two variants to compare them here";
    return;
  }
  const a = store.results[store.results.length - 2];
  const b = store.results[store.results.length - 1];
  const view = whatifCompare(a.bundle, b.bundle);
  if (!view.enabled) {
    panel.textContent = `comparison disabled: ${view.disabledReason}`;
    return;
  }
  const rows = view.pairedBars
    .map(
      (p) =>
        `<tr><td>${p.mammal_id}</td><td>${p.delta_a_db}</td>` +
        `<td>${p.delta_b_db}</td><td>${p.delta_delta_db}</td></tr>`
    )
    .join("");
  panel.innerHTML =
    `<p>${a.label} vs ${b.label}: ` +
    (view.headline
      ? `ΔJ_s A=${view.headline.delta_a_db} dB, B=${view.headline.delta_b_db} dB, ` +
        `ΔΔ=${view.headline.delta_delta_db} dB</p>`
      : "</p>") +
    `<table><tr><th>mammal</th><th>Δ A</th><th>Δ B</th><th>ΔΔ</th></tr>${rows}</table>`;
}

async function onRun(): Promise<void> {
  const status = el<HTMLDivElement>("status");
  const errBox = el<HTMLDivElement>("field-errors");
  errBox.textContent = "";
  const draft = readDraft();
  try {
    status.textContent = "submitting scenario...";
    const sid = await submitScenario(api, store, draft);
    status.textContent = `scenario ${sid}; optimizing...`;
    const outcome = await runAndPoll(api, store, sid, `run ${store.results.length + 1}`, {
      onProgress: (s) => {
        status.textContent = `job ${s.id}: ${s.status} ${(s.progress * 100).toFixed(0)}% ${s.stage}`;
      },
    });
    status.textContent = `scenario ${sid} complete`;
    renderResult(outcome.view);
    renderWhatIf();
  } catch (err) {
    if (err instanceof DraftRejected) {
      errBox.innerHTML = err.fieldErrors
        .map((e) => `<div class="err">${e.loc}: ${e.msg}</div>`)
        .join("");
      status.textContent = "draft rejected; fix the highlighted fields";
    } else {
      status.textContent = `failed: ${err instanceof Error ? err.message : err}`;
    }
    // the draft stays in the store, so operator edits survive the failure
  }
}

export function boot(): void {
  el<HTMLButtonElement>("run").addEventListener("click", () => void onRun());
}

declare global {
  interface Window {
    compareBundles: (a: ResultBundle, b: ResultBundle) => unknown;
  }
}

if (typeof document !== "undefined" && document.getElementById("run")) {
  boot();
  window.compareBundles = whatifCompare;
}
