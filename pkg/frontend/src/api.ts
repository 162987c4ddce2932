import type {
  ApiErrorBody,
  ClusterRequest,
  ClusterStatus,
  ClusterSummary,
  CommitInfo,
  CorrelationResponse,
  CurrentClusters,
  DecideRequest,
  DecisionReport,
  ElbowResponse,
  ProfilesResponse,
  SamplePlan,
  SampleRequest,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(`${body.error}: ${body.detail}`);
  }
}

/**
 * Thin typed client over the perfgate endpoints. All dashboard data goes
 * through here; nothing is computed client-side.
 */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetcher: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetcher(this.baseUrl + path, init);
    if (!resp.ok) {
      let body: ApiErrorBody;
      try {
        body = (await resp.json()) as ApiErrorBody;
      } catch {
        body = { error: "HTTPError", detail: resp.statusText };
      }
      throw new ApiError(resp.status, body);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  commits(): Promise<CommitInfo[]> {
    return this.request("/api/commits");
  }

  profiles(commit: string): Promise<ProfilesResponse> {
    return this.request(`/api/profiles?commit=${encodeURIComponent(commit)}`);
  }

  correlation(commit: string): Promise<CorrelationResponse> {
    return this.request(`/api/correlation?commit=${encodeURIComponent(commit)}`);
  }

  elbow(commit: string, kmax = 8, seed = 0): Promise<ElbowResponse> {
    return this.request(
      `/api/elbow?commit=${encodeURIComponent(commit)}&kmax=${kmax}&seed=${seed}`,
    );
  }

  cluster(req: ClusterRequest): Promise<ClusterSummary> {
    return this.post("/api/cluster", req);
  }

  clusterStatus(): Promise<ClusterStatus> {
    return this.request("/api/cluster/status");
  }

  currentClusters(): Promise<CurrentClusters> {
    return this.request("/api/clusters/current");
  }

  sample(req: SampleRequest): Promise<SamplePlan> {
    return this.post("/api/sample", req);
  }

  decide(req: DecideRequest): Promise<DecisionReport> {
    return this.post("/api/decide", req);
  }

  recommendation(): Promise<DecisionReport> {
    return this.request("/api/recommendation");
  }
}
