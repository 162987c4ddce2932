import { ApiClient, ApiError } from "./api.js";
import type {
  Algorithm,
  ClusterRequest,
  ClusterSummary,
  CommitInfo,
  CurrentClusters,
  DecisionReport,
  SamplePlan,
} from "./types.js";

export interface ClusterParams {
  k: number;
  eps: number;
  min_pts: number;
  linkage: "average" | "complete" | "single";
  seed: number;
}

export interface ViewState {
  commits: CommitInfo[];
  selectedCommit: string | null;
  baselineCommit: string | null;
  algorithm: Algorithm;
  params: ClusterParams;
  view3d: boolean;
  summary: ClusterSummary | null;
  clusters: CurrentClusters | null;
  plan: SamplePlan | null;
  report: DecisionReport | null;
  /** Sample/report were produced by an older model fit. */
  planStale: boolean;
  reportStale: boolean;
  /** A mutating request is in flight; controls are disabled. */
  busy: boolean;
  banner: string | null;
}

export function initialState(): ViewState {
  return {
    commits: [],
    selectedCommit: null,
    baselineCommit: null,
    algorithm: "kmeans",
    params: { k: 2, eps: 0.8, min_pts: 5, linkage: "average", seed: 0 },
    view3d: false,
    summary: null,
    clusters: null,
    plan: null,
    report: null,
    planStale: false,
    reportStale: false,
    busy: false,
    banner: null,
  };
}

type Listener = (state: ViewState) => void;

/**
 * Holds all dashboard state and talks to the API. The view is a pure
 * function of this state: reloading and replaying the same responses
 * reproduces the same screen.
 *
 * At most one mutating request (cluster/sample/decide) is in flight at
 * a time; further attempts while busy are ignored locally rather than
 * racing the server's single-writer lock.
 */
export class DashboardStore {
  state: ViewState = initialState();
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  private fail(err: unknown): void {
    const msg = err instanceof ApiError ? err.message : String(err);
    this.update({ banner: msg });
  }

  clearBanner(): void {
    this.update({ banner: null });
  }

  async loadCommits(): Promise<void> {
    try {
      const commits = await this.api.commits();
      const selected =
        this.state.selectedCommit ?? commits[commits.length - 1]?.commit_id ?? null;
      const baseline = this.state.baselineCommit ?? commits[0]?.commit_id ?? null;
      this.update({ commits, selectedCommit: selected, baselineCommit: baseline });
    } catch (err) {
      this.fail(err);
    }
  }

  selectCommit(commitId: string): void {
    this.update({ selectedCommit: commitId });
  }

  selectBaseline(commitId: string): void {
    this.update({ baselineCommit: commitId });
  }

  setView3d(on: boolean): void {
    this.update({ view3d: on });
  }

  setParams(patch: Partial<ClusterParams>): void {
    this.update({ params: { ...this.state.params, ...patch } });
  }

  private clusterRequest(): ClusterRequest {
    const { algorithm, params, selectedCommit } = this.state;
    const req: ClusterRequest = {
      commit: selectedCommit ?? "",
      algo: algorithm,
      seed: params.seed,
    };
    if (algorithm === "dbscan") {
      req.eps = params.eps;
      req.min_pts = params.min_pts;
    } else {
      req.k = params.k;
      if (algorithm === "agglomerative") req.linkage = params.linkage;
    }
    return req;
  }

  /**
   * Re-fit with the current settings: exactly one POST /api/cluster,
   * then pull the assignments for the scatter. Existing sample and
   * decision results are kept on screen but marked stale.
   */
  async refit(): Promise<boolean> {
    if (this.state.busy || this.state.selectedCommit === null) return false;
    this.update({ busy: true });
    try {
      const summary = await this.api.cluster(this.clusterRequest());
      const clusters = await this.api.currentClusters();
      this.update({
        summary,
        clusters,
        planStale: this.state.plan !== null,
        reportStale: this.state.report !== null,
        banner: null,
      });
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    } finally {
      this.update({ busy: false });
    }
  }

  /** Switch algorithm and immediately re-fit (a single POST). */
  async applyAlgorithm(algo: Algorithm): Promise<boolean> {
    this.update({ algorithm: algo });
    return this.refit();
  }

  async runSample(perCluster: number, seed: number): Promise<boolean> {
    if (this.state.busy) return false;
    this.update({ busy: true });
    try {
      const plan = await this.api.sample({ per_cluster: perCluster, seed });
      this.update({ plan, planStale: false, banner: null });
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    } finally {
      this.update({ busy: false });
    }
  }

  async runDecide(updatedCommit: string, acceptableLimit: number, voteThreshold: number): Promise<boolean> {
    if (this.state.busy || this.state.baselineCommit === null) return false;
    this.update({ busy: true });
    try {
      const report = await this.api.decide({
        baseline: this.state.baselineCommit,
        updated: updatedCommit,
        acceptable_limit: acceptableLimit,
        vote_threshold: voteThreshold,
      });
      this.update({ report, reportStale: false, banner: null });
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    } finally {
      this.update({ busy: false });
    }
  }
}
