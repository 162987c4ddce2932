"""HTTP/JSON facade over a workspace for the inspection dashboard.

Snapshots are immutable, so reads are freely concurrent. The three
mutating endpoints (cluster, sample, decide) share a single-writer lock:
a second mutation while one is in flight gets 409 rather than queueing.
Responses reuse the same dict serializers as the CLI so the two surfaces
are byte-compatible.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import clustering, decision, sampling, stats
from ..errors import PerfGateError, UnknownCommit, UnknownModel
from ..profiles import DEFAULT_FEATURES, record_to_file_dict
from ..workspace import Workspace
from .schemas import ClusterRequest, DecideRequest, SampleRequest

CURRENT_MODEL_NAME = "current"


class SessionState:
    """One inspection session: current model, plan and last report."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace
        self.model: Optional[clustering.ClusterModel] = None
        self.matrix: Optional[stats.FeatureMatrix] = None
        self.model_commit: Optional[str] = None
        self.plan: Optional[sampling.SamplePlan] = None
        self.report: Optional[decision.DecisionReport] = None
        self.write_lock = threading.Lock()
        self.fit_running = False


def _fit(state: SessionState, req: ClusterRequest) -> clustering.ClusterModel:
    snapshot = state.workspace.load_snapshot(req.commit)
    features = tuple(req.features) if req.features else DEFAULT_FEATURES
    matrix = stats.standardize(snapshot, features)
    if req.algo == "kmeans":
        if req.k is None:
            raise HTTPException(400, detail={"error": "ValidationError", "detail": "k required for kmeans"})
        model = clustering.kmeans_fit(matrix, k=req.k, seed=req.seed, max_iter=req.max_iter, tol=req.tol)
    elif req.algo == "gmm":
        if req.k is None:
            raise HTTPException(400, detail={"error": "ValidationError", "detail": "k required for gmm"})
        model = clustering.gmm_fit(matrix, k=req.k, seed=req.seed, max_iter=req.max_iter, tol=req.tol)
    elif req.algo == "agglomerative":
        if req.k is None:
            raise HTTPException(400, detail={"error": "ValidationError", "detail": "k required for agglomerative"})
        model = clustering.agglomerative_fit(matrix, k=req.k, linkage=req.linkage)
    else:
        if req.eps is None:
            raise HTTPException(400, detail={"error": "ValidationError", "detail": "eps required for dbscan"})
        model = clustering.dbscan_fit(matrix, eps=req.eps, min_pts=req.min_pts)
    state.model = model
    state.matrix = matrix
    state.model_commit = req.commit
    state.plan = None
    state.report = None
    state.workspace.save_model_dict(CURRENT_MODEL_NAME, model.to_dict())
    return model


def create_app(workspace_root: str | Path) -> FastAPI:
    workspace = Workspace(workspace_root)
    state = SessionState(workspace)
    app = FastAPI(title="perfgate", version="0.1.0")
    app.state.session = state

    @app.exception_handler(PerfGateError)
    async def domain_error_handler(request: Request, exc: PerfGateError):
        status = 404 if isinstance(exc, (UnknownCommit, UnknownModel)) else 422
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(HTTPException)
    async def http_error_handler(request: Request, exc: HTTPException):
        if isinstance(exc.detail, dict) and "error" in exc.detail:
            content = exc.detail
        else:
            content = {"error": "HTTPError", "detail": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content=content)

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "ValidationError", "detail": str(exc.errors())},
        )

    @app.get("/api/commits")
    def commits():
        out = []
        for commit_id in workspace.list_commits():
            snapshot = workspace.load_snapshot(commit_id)
            out.append(
                {
                    "commit_id": commit_id,
                    "records": len(snapshot.records),
                    "total_exec_time_ms": snapshot.total_exec_time(),
                }
            )
        return out

    @app.get("/api/profiles")
    def profiles(commit: str = Query(...)):
        snapshot = workspace.load_snapshot(commit)
        rows = []
        for r in snapshot.records:
            row = record_to_file_dict(r)
            row["exec_time_ms"] = r.exec_time
            row["memory_kb"] = r.memory
            rows.append(row)
        return {"commit_id": commit, "records": rows}

    @app.get("/api/correlation")
    def correlation(commit: str = Query(...)):
        snapshot = workspace.load_snapshot(commit)
        return stats.pearson_matrix(snapshot).to_dict()

    @app.get("/api/elbow")
    def elbow(commit: str = Query(...), kmax: int = Query(8), seed: int = Query(0)):
        snapshot = workspace.load_snapshot(commit)
        return stats.elbow_curve(snapshot, DEFAULT_FEATURES, kmax, seed).to_dict()

    @app.post("/api/cluster")
    def cluster(req: ClusterRequest):
        if not state.write_lock.acquire(blocking=False):
            raise HTTPException(409, detail={"error": "Busy", "detail": "another mutation is in flight"})
        try:
            state.fit_running = True
            model = _fit(state, req)
        finally:
            state.fit_running = False
            state.write_lock.release()
        sizes = model.cluster_sizes()
        return {
            "algorithm": model.algorithm,
            "params": model.params,
            "features": list(model.features),
            "seed": model.seed,
            "clusters": [{"label": lab, "size": sizes[lab]} for lab in sorted(sizes)],
            "noise": model.noise_count(),
            "medoids": {str(lab): mid for lab, mid in sorted(model.medoids.items())},
        }

    @app.get("/api/cluster/status")
    def cluster_status():
        return {
            "running": state.fit_running,
            "has_model": state.model is not None,
            "commit": state.model_commit,
        }

    @app.get("/api/clusters/current")
    def clusters_current():
        if state.model is None or state.matrix is None:
            raise HTTPException(404, detail={"error": "NoModel", "detail": "no cluster model fit yet"})
        model, matrix = state.model, state.matrix
        points = [
            {
                "input_id": input_id,
                "coords": [float(v) for v in row],
                "label": label,
            }
            for input_id, row, label in zip(matrix.input_ids, matrix.values, model.assignments)
        ]
        payload = model.to_dict()
        payload["commit"] = state.model_commit
        payload["points"] = points
        return payload

    @app.post("/api/sample")
    def sample(req: SampleRequest):
        if state.model is None:
            raise HTTPException(404, detail={"error": "NoModel", "detail": "fit a cluster model first"})
        if not state.write_lock.acquire(blocking=False):
            raise HTTPException(409, detail={"error": "Busy", "detail": "another mutation is in flight"})
        try:
            plan = sampling.SamplePlan(
                per_cluster=req.per_cluster, seed=req.seed, include_noise=req.include_noise
            )
            state.plan = sampling.sample_per_cluster(state.model, plan)
        finally:
            state.write_lock.release()
        return state.plan.to_dict()

    @app.post("/api/decide")
    def decide(req: DecideRequest):
        if state.model is None:
            raise HTTPException(404, detail={"error": "NoModel", "detail": "fit a cluster model first"})
        if state.plan is None:
            raise HTTPException(404, detail={"error": "NoPlan", "detail": "sample data points first"})
        if not state.write_lock.acquire(blocking=False):
            raise HTTPException(409, detail={"error": "Busy", "detail": "another mutation is in flight"})
        try:
            baseline = workspace.load_snapshot(req.baseline)
            updated = workspace.load_snapshot(req.updated)
            points = decision.updated_points_from_snapshot(updated, state.plan.all_ids())
            state.report = decision.evaluate_batch(
                state.model, baseline, points, req.acceptable_limit, req.vote_threshold
            )
        finally:
            state.write_lock.release()
        return state.report.to_dict()

    @app.get("/api/recommendation")
    def recommendation():
        if state.report is None:
            raise HTTPException(404, detail={"error": "NoReport", "detail": "no decision run yet"})
        return state.report.to_dict()

    return app
