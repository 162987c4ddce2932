import type { Bar, HeatmapCell, XY } from "./viewmodel.js";
import { labelColor } from "./viewmodel.js";

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;");

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

/** Simple vertical bar chart as an SVG string. */
export function barChart(bars: Bar[], width = 640, height = 180, color = "#4e79a7"): string {
  if (bars.length === 0) return emptySvg(width, height);
  const [, hi] = extent(bars.map((b) => b.value));
  const bw = width / bars.length;
  const rects = bars
    .map((b, i) => {
      const h = hi > 0 ? (b.value / hi) * (height - 20) : 0;
      return (
        `<rect x="${(i * bw).toFixed(1)}" y="${(height - h).toFixed(1)}" ` +
        `width="${Math.max(bw - 1, 1).toFixed(1)}" height="${h.toFixed(1)}" fill="${color}">` +
        `<title>${esc(b.name)}: ${b.value.toFixed(3)}</title></rect>`
      );
    })
    .join("");
  return `<svg viewBox="0 0 ${width} ${height}" width="100%">${rects}</svg>`;
}

/** Polyline chart (elbow curve, per-commit trend). */
export function lineChart(names: string[], values: number[], width = 640, height = 180): string {
  if (values.length === 0) return emptySvg(width, height);
  const [lo, hi] = extent(values);
  const step = values.length > 1 ? (width - 40) / (values.length - 1) : 0;
  const pts = values.map((v, i) => {
    const x = 20 + i * step;
    const y = 10 + (1 - (v - lo) / (hi - lo)) * (height - 30);
    return [x, y] as const;
  });
  const path = pts.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ");
  const dots = pts
    .map(
      ([x, y], i) =>
        `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="3" fill="#e15759">` +
        `<title>${esc(names[i])}: ${values[i].toFixed(4)}</title></circle>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${width} ${height}" width="100%">` +
    `<polyline points="${path}" fill="none" stroke="#4e79a7" stroke-width="2"/>${dots}</svg>`
  );
}

/** Cluster scatter; points colored by label, noise gray. */
export function scatterChart(points: XY[], width = 420, height = 360): string {
  if (points.length === 0) return emptySvg(width, height);
  const [xlo, xhi] = extent(points.map((p) => p.x));
  const [ylo, yhi] = extent(points.map((p) => p.y));
  const dots = points
    .map((p) => {
      const cx = 10 + ((p.x - xlo) / (xhi - xlo)) * (width - 20);
      const cy = 10 + (1 - (p.y - ylo) / (yhi - ylo)) * (height - 20);
      return (
        `<circle cx="${cx.toFixed(1)}" cy="${cy.toFixed(1)}" r="3.5" ` +
        `fill="${labelColor(p.label)}" fill-opacity="0.8">` +
        `<title>${esc(p.inputId)} (cluster ${p.label})</title></circle>`
      );
    })
    .join("");
  return `<svg viewBox="0 0 ${width} ${height}" width="100%">${dots}</svg>`;
}

function rColor(r: number | null): string {
  if (r === null) return "#e8eaed";
  // blue (-1) .. white (0) .. red (+1)
  const t = Math.max(-1, Math.min(1, r));
  const mix = (a: number, b: number) => Math.round(a + (b - a) * Math.abs(t));
  return t >= 0
    ? `rgb(${mix(255, 225)},${mix(255, 87)},${mix(255, 89)})`
    : `rgb(${mix(255, 78)},${mix(255, 121)},${mix(255, 167)})`;
}

/** Correlation heatmap; significant cells (p < alpha) get a dark border. */
export function heatmapChart(cells: HeatmapCell[], attributes: string[], size = 420): string {
  const n = attributes.length;
  if (n === 0) return emptySvg(size, size);
  const label = 110;
  const cs = (size - label) / n;
  const idx = new Map(attributes.map((a, i) => [a, i]));
  const rects = cells
    .map((c) => {
      const i = idx.get(c.row)!;
      const j = idx.get(c.col)!;
      const border = c.significant ? ' stroke="#202124" stroke-width="1.5"' : "";
      const text = c.r === null ? "n/a" : c.r.toFixed(2);
      return (
        `<rect x="${(label + j * cs).toFixed(1)}" y="${(i * cs).toFixed(1)}" ` +
        `width="${cs - 1}" height="${cs - 1}" fill="${rColor(c.r)}"${border}>` +
        `<title>r(${esc(c.row)}, ${esc(c.col)}) = ${text}, p = ${c.p.toExponential(2)}</title></rect>`
      );
    })
    .join("");
  const labels = attributes
    .map(
      (a, i) =>
        `<text x="${label - 6}" y="${(i * cs + cs / 2 + 4).toFixed(1)}" ` +
        `text-anchor="end" font-size="11">${esc(a)}</text>`,
    )
    .join("");
  const h = n * cs + 10;
  return `<svg viewBox="0 0 ${size} ${h}" width="100%">${rects}${labels}</svg>`;
}

function emptySvg(width: number, height: number): string {
  return (
    `<svg viewBox="0 0 ${width} ${height}" width="100%">` +
    `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" fill="#9aa0a6">no data</text></svg>`
  );
}
