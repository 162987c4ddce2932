/** Response shapes of the perfgate HTTP API, mirrored field-for-field. */

export interface CommitInfo {
  commit_id: string;
  records: number;
  total_exec_time_ms: number;
}

export interface ProfileRow {
  input_id: string;
  input_size: number;
  exec_time_ms: number;
  memory_kb: number;
  iterations: number;
  statements: number;
  function_calls: number;
  conditionals: number;
  test_case?: string;
}

export interface ProfilesResponse {
  commit_id: string;
  records: ProfileRow[];
}

export interface CorrelationResponse {
  attributes: string[];
  r: (number | null)[][];
  p: number[][];
  n: number;
  constant_attributes: string[];
}

export interface ElbowResponse {
  k_values: number[];
  distortion: number[];
  knee: number;
  low_confidence: boolean;
}

export type Algorithm = "kmeans" | "gmm" | "agglomerative" | "dbscan";

export interface ClusterRequest {
  commit: string;
  algo: Algorithm;
  features?: string[];
  seed?: number;
  k?: number;
  eps?: number;
  min_pts?: number;
  linkage?: "average" | "complete" | "single";
}

export interface ClusterSummary {
  algorithm: string;
  params: Record<string, unknown>;
  features: string[];
  seed: number | null;
  clusters: { label: number; size: number }[];
  noise: number;
  medoids: Record<string, string>;
}

export interface ClusterPoint {
  input_id: string;
  coords: number[];
  label: number;
}

export interface CurrentClusters {
  algorithm: string;
  features: string[];
  commit: string;
  assignments: { input_id: string; label: number }[];
  medoids: Record<string, string>;
  points: ClusterPoint[];
}

export interface ClusterStatus {
  running: boolean;
  has_model: boolean;
  commit: string | null;
}

export interface SampleRequest {
  per_cluster?: number;
  seed?: number;
  include_noise?: boolean;
}

export interface SamplePlan {
  per_cluster: number;
  seed: number;
  include_noise: boolean;
  sampled: Record<string, string[]>;
}

export interface DecideRequest {
  baseline: string;
  updated: string;
  acceptable_limit?: number;
  vote_threshold?: number;
}

export interface CheckResult {
  input_id: string;
  cluster: number;
  case: string;
  threshold_ms: number;
  threshold_check: boolean;
  gradient_check: boolean | "skipped";
  baseline_gradient: number | null;
  updated_gradient: number | null;
  gradient_change_pct: number | null;
  flagged: boolean;
}

export interface DecisionReport {
  acceptable_limit: number;
  vote_threshold: number;
  checks: CheckResult[];
  flagged_fraction: number;
  verdict: "RUN" | "SKIP";
  uncertain: boolean;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
