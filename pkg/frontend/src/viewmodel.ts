import type {
  ClusterPoint,
  CommitInfo,
  CorrelationResponse,
  DecisionReport,
  ProfileRow,
} from "./types.js";

/** One cell of the decision grid; text is exactly "True", "False" or "x". */
export interface GridCell {
  column: string;
  inputId: string;
  text: "True" | "False" | "x";
  flagged: boolean;
}

export interface DecisionGrid {
  columns: string[];
  thresholdRow: GridCell[];
  gradientRow: GridCell[];
  flagged: number;
  total: number;
  verdict: "RUN" | "SKIP";
  uncertain: boolean;
}

/**
 * Lay the report out as the two-row check grid. Columns are named
 * C<cluster+1><position within cluster>, matching the CLI table; a
 * skipped gradient renders as "x".
 */
export function decisionGrid(report: DecisionReport): DecisionGrid {
  const counters = new Map<number, number>();
  const columns = report.checks.map((c) => {
    const pos = (counters.get(c.cluster) ?? 0) + 1;
    counters.set(c.cluster, pos);
    return `C${c.cluster + 1}${pos}`;
  });
  const thresholdRow = report.checks.map<GridCell>((c, i) => ({
    column: columns[i],
    inputId: c.input_id,
    text: c.threshold_check ? "True" : "False",
    flagged: c.flagged,
  }));
  const gradientRow = report.checks.map<GridCell>((c, i) => ({
    column: columns[i],
    inputId: c.input_id,
    text: c.gradient_check === "skipped" ? "x" : c.gradient_check ? "True" : "False",
    flagged: c.flagged,
  }));
  return {
    columns,
    thresholdRow,
    gradientRow,
    flagged: report.checks.filter((c) => c.flagged).length,
    total: report.checks.length,
    verdict: report.verdict,
    uncertain: report.uncertain,
  };
}

export interface HeatmapCell {
  row: string;
  col: string;
  r: number | null;
  p: number;
  significant: boolean;
}

/**
 * Flatten the correlation matrix into cells, marking p < alpha as
 * significant (presentational only; the p-values come from the API).
 */
export function heatmapCells(corr: CorrelationResponse, alpha = 0.05): HeatmapCell[] {
  const cells: HeatmapCell[] = [];
  corr.attributes.forEach((row, i) => {
    corr.attributes.forEach((col, j) => {
      const r = corr.r[i][j];
      const p = corr.p[i][j];
      cells.push({ row, col, r, p, significant: r !== null && p < alpha });
    });
  });
  return cells;
}

export interface XY {
  x: number;
  y: number;
  label: number;
  inputId: string;
}

/** 2D view: the first two standardized feature axes. */
export function project2d(points: ClusterPoint[]): XY[] {
  return points.map((p) => ({
    x: p.coords[0] ?? 0,
    y: p.coords[1] ?? 0,
    label: p.label,
    inputId: p.input_id,
  }));
}

/**
 * 3D view: orthographic projection of the three standardized feature
 * axes after yaw/pitch rotation, so dragging can spin the cloud.
 */
export function project3d(points: ClusterPoint[], yaw: number, pitch: number): XY[] {
  const cy = Math.cos(yaw);
  const sy = Math.sin(yaw);
  const cp = Math.cos(pitch);
  const sp = Math.sin(pitch);
  return points.map((p) => {
    const [x, y, z] = [p.coords[0] ?? 0, p.coords[1] ?? 0, p.coords[2] ?? 0];
    const xr = cy * x + sy * z;
    const zr = -sy * x + cy * z;
    return {
      x: xr,
      y: cp * y - sp * zr,
      label: p.label,
      inputId: p.input_id,
    };
  });
}

export interface Bar {
  name: string;
  value: number;
}

/** Per-test execution time, largest first so regressions stand out. */
export function execTimeBars(rows: ProfileRow[], limit = 40): Bar[] {
  return rows
    .map((r) => ({ name: r.input_id, value: r.exec_time_ms }))
    .sort((a, b) => b.value - a.value)
    .slice(0, limit);
}

export function memoryBars(rows: ProfileRow[], limit = 40): Bar[] {
  return rows
    .map((r) => ({ name: r.input_id, value: r.memory_kb }))
    .sort((a, b) => b.value - a.value)
    .slice(0, limit);
}

/** Total suite time per commit, in commit order as served. */
export function totalTimeSeries(commits: CommitInfo[]): Bar[] {
  return commits.map((c) => ({ name: c.commit_id, value: c.total_exec_time_ms }));
}

const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
];

export function labelColor(label: number): string {
  if (label < 0) return "#9aa0a6"; // noise
  return PALETTE[label % PALETTE.length];
}
