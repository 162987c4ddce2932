"""Pydantic request models for the inspection API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class ClusterRequest(BaseModel):
    commit: str
    algo: Literal["kmeans", "gmm", "agglomerative", "dbscan"]
    features: Optional[list[str]] = None
    seed: int = 0
    k: Optional[int] = None
    eps: Optional[float] = None
    min_pts: int = 5
    linkage: Literal["average", "complete", "single"] = "average"
    max_iter: int = 300
    tol: float = 1e-6


class SampleRequest(BaseModel):
    per_cluster: int = Field(default=3, ge=1)
    seed: int = 0
    include_noise: bool = False


class DecideRequest(BaseModel):
    baseline: str
    updated: str
    acceptable_limit: float = Field(default=38.0, ge=0)
    vote_threshold: float = Field(default=0.5, gt=0, le=1)
