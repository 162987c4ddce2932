import { ApiClient } from "./api.js";
import { barChart, heatmapChart, lineChart, scatterChart } from "./charts.js";
import { DashboardStore, ViewState } from "./state.js";
import type { Algorithm } from "./types.js";
import {
  decisionGrid,
  execTimeBars,
  heatmapCells,
  memoryBars,
  project2d,
  project3d,
  totalTimeSeries,
} from "./viewmodel.js";

const api = new ApiClient("");
const store = new DashboardStore(api);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let yaw = 0.6;
let pitch = 0.4;
let fitRunning = false;

function renderCommits(state: ViewState): void {
  for (const [id, selected] of [
    ["commit-select", state.selectedCommit],
    ["baseline-select", state.baselineCommit],
    ["updated-select", state.selectedCommit],
  ] as const) {
    const sel = $(id) as unknown as HTMLSelectElement;
    const current = sel.value;
    sel.innerHTML = state.commits
      .map((c) => `<option value="${c.commit_id}">${c.commit_id} (${c.records})</option>`)
      .join("");
    sel.value = current || selected || "";
  }
  $("chart-total").innerHTML = lineChart(
    state.commits.map((c) => c.commit_id),
    totalTimeSeries(state.commits).map((b) => b.value),
  );
}

async function renderCharts(commit: string): Promise<void> {
  try {
    const [profiles, corr, elbow] = await Promise.all([
      api.profiles(commit),
      api.correlation(commit),
      api.elbow(commit),
    ]);
    $("chart-time").innerHTML = barChart(execTimeBars(profiles.records));
    $("chart-memory").innerHTML = barChart(memoryBars(profiles.records), 640, 180, "#59a14f");
    $("chart-heatmap").innerHTML = heatmapChart(heatmapCells(corr), corr.attributes);
    $("chart-elbow").innerHTML = lineChart(
      elbow.k_values.map((k) => `k=${k}`),
      elbow.distortion,
    );
    $("elbow-knee").textContent =
      `knee: ${elbow.knee}` + (elbow.low_confidence ? " (low confidence)" : "");
  } catch (err) {
    $("banner").textContent = String(err);
  }
}

function renderScatter(state: ViewState): void {
  const target = $("chart-scatter");
  if (!state.clusters) {
    target.innerHTML = '<p class="empty">no cluster model yet</p>';
    return;
  }
  const pts = state.view3d
    ? project3d(state.clusters.points, yaw, pitch)
    : project2d(state.clusters.points);
  target.innerHTML = scatterChart(pts);
  const sizes = state.summary?.clusters
    .map((c) => `cluster ${c.label}: ${c.size}`)
    .join(", ");
  $("cluster-info").textContent = state.summary
    ? `${state.summary.algorithm}  ${sizes}  noise: ${state.summary.noise}`
    : "";
}

function renderDecision(state: ViewState): void {
  const target = $("decision-grid");
  if (!state.report) {
    target.innerHTML = '<p class="empty">no decision yet</p>';
    $("verdict").textContent = "";
    return;
  }
  const grid = decisionGrid(state.report);
  const cell = (text: string, flagged: boolean) =>
    `<td class="${flagged ? "flagged" : ""}">${text}</td>`;
  target.innerHTML =
    `<table${state.reportStale ? ' class="stale"' : ""}>` +
    `<tr><th>Checks</th>${grid.columns.map((c) => `<th>${c}</th>`).join("")}</tr>` +
    `<tr><th>TimeThreshold</th>${grid.thresholdRow.map((c) => cell(c.text, c.flagged)).join("")}</tr>` +
    `<tr><th>Gradient</th>${grid.gradientRow.map((c) => cell(c.text, c.flagged)).join("")}</tr>` +
    `</table>`;
  $("verdict").textContent =
    `flagged ${grid.flagged}/${grid.total} - verdict ${grid.verdict}` +
    (grid.uncertain ? " (uncertain)" : "") +
    (state.reportStale ? " [stale: model changed]" : "");
}

function render(state: ViewState): void {
  renderCommits(state);
  renderScatter(state);
  renderDecision(state);
  $("banner").textContent = state.banner ?? "";
  $("banner").style.display = state.banner ? "block" : "none";
  const disable = state.busy || fitRunning;
  for (const id of ["btn-refit", "btn-sample", "btn-decide"]) {
    ($(id) as unknown as HTMLButtonElement).disabled = disable;
  }
  $("plan-info").textContent = state.plan
    ? `sampled ${Object.values(state.plan.sampled).flat().length} inputs` +
      (state.planStale ? " [stale: model changed]" : "")
    : "";
  const algoSel = $("algo-select") as unknown as HTMLSelectElement;
  document.querySelectorAll<HTMLElement>("[data-algo]").forEach((el) => {
    el.style.display = el.dataset.algo!.split(" ").includes(algoSel.value) ? "" : "none";
  });
}

function bind(): void {
  const algoSel = $("algo-select") as unknown as HTMLSelectElement;
  algoSel.addEventListener("change", () => {
    void store.applyAlgorithm(algoSel.value as Algorithm);
  });
  $("commit-select").addEventListener("change", () => {
    const commit = ($("commit-select") as unknown as HTMLSelectElement).value;
    store.selectCommit(commit);
    void renderCharts(commit);
  });
  $("baseline-select").addEventListener("change", () => {
    store.selectBaseline(($("baseline-select") as unknown as HTMLSelectElement).value);
  });
  $("btn-refit").addEventListener("click", () => {
    store.setParams({
      k: Number(($("param-k") as unknown as HTMLInputElement).value),
      eps: Number(($("param-eps") as unknown as HTMLInputElement).value),
      min_pts: Number(($("param-minpts") as unknown as HTMLInputElement).value),
      seed: Number(($("param-seed") as unknown as HTMLInputElement).value),
    });
    void store.refit();
  });
  $("view-3d").addEventListener("change", () => {
    store.setView3d(($("view-3d") as unknown as HTMLInputElement).checked);
  });
  $("btn-sample").addEventListener("click", () => {
    void store.runSample(
      Number(($("param-percluster") as unknown as HTMLInputElement).value),
      Number(($("param-seed") as unknown as HTMLInputElement).value),
    );
  });
  $("btn-decide").addEventListener("click", () => {
    void store.runDecide(
      ($("updated-select") as unknown as HTMLSelectElement).value,
      Number(($("param-limit") as unknown as HTMLInputElement).value),
      Number(($("param-vote") as unknown as HTMLInputElement).value),
    );
  });

  // drag to rotate the 3D view
  let dragging = false;
  const scatter = $("chart-scatter");
  scatter.addEventListener("mousedown", () => (dragging = true));
  window.addEventListener("mouseup", () => (dragging = false));
  window.addEventListener("mousemove", (ev) => {
    if (!dragging || !store.state.view3d) return;
    yaw += ev.movementX * 0.01;
    pitch += ev.movementY * 0.01;
    renderScatter(store.state);
  });
}

async function pollStatus(): Promise<void> {
  try {
    const status = await api.clusterStatus();
    fitRunning = status.running;
  } catch {
    // server unreachable; the banner from the failing action suffices
  }
  render(store.state);
}

async function start(): Promise<void> {
  bind();
  store.subscribe(render);
  await store.loadCommits();
  if (store.state.selectedCommit) await renderCharts(store.state.selectedCommit);
  setInterval(() => void pollStatus(), 1500);
}

void start();
