"""Clustering algorithms over standardized feature matrices.

All four fits are deterministic: k-means and the mixture model for a
fixed seed, DBSCAN and agglomerative for a fixed record order. Labels
are contiguous integers starting at 0; DBSCAN additionally uses the
NOISE sentinel (-1).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NoClusters, TooFewRecords
from .stats import FeatureMatrix

NOISE = -1

_UNVISITED = -2


@dataclass(frozen=True)
class ClusterModel:
    algorithm: str  # kmeans | gmm | agglomerative | dbscan
    params: dict
    features: tuple[str, ...]
    seed: Optional[int]
    input_ids: tuple[str, ...]
    assignments: tuple[int, ...]  # label per record, NOISE for dbscan outliers
    centroids: Optional[tuple[tuple[float, ...], ...]] = None
    medoids: dict = field(default_factory=dict)  # label -> input_id
    wcss: float = 0.0
    wcss_history: tuple[float, ...] = ()
    loglik_history: tuple[float, ...] = ()

    @property
    def n_clusters(self) -> int:
        labels = [a for a in self.assignments if a != NOISE]
        return len(set(labels))

    def label_of(self, input_id: str) -> int:
        try:
            idx = self.input_ids.index(input_id)
        except ValueError:
            from .errors import UnknownInput

            raise UnknownInput(input_id) from None
        return self.assignments[idx]

    def members(self, label: int) -> list[str]:
        return [i for i, a in zip(self.input_ids, self.assignments) if a == label]

    def cluster_sizes(self) -> dict[int, int]:
        sizes: dict[int, int] = {}
        for a in self.assignments:
            if a != NOISE:
                sizes[a] = sizes.get(a, 0) + 1
        return sizes

    def noise_count(self) -> int:
        return sum(1 for a in self.assignments if a == NOISE)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "params": self.params,
            "features": list(self.features),
            "seed": self.seed,
            "assignments": [
                {"input_id": i, "label": a}
                for i, a in zip(self.input_ids, self.assignments)
            ],
            "medoids": {str(k): v for k, v in sorted(self.medoids.items())},
        }

    @staticmethod
    def from_dict(d: dict) -> "ClusterModel":
        return ClusterModel(
            algorithm=d["algorithm"],
            params=d["params"],
            features=tuple(d["features"]),
            seed=d.get("seed"),
            input_ids=tuple(a["input_id"] for a in d["assignments"]),
            assignments=tuple(int(a["label"]) for a in d["assignments"]),
            medoids={int(k): v for k, v in d.get("medoids", {}).items()},
        )


# ---------------------------------------------------------------------------
# k-means


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[i] = X[idx]
        d2 = np.minimum(d2, ((X - centers[i]) ** 2).sum(axis=1))
    return centers


def _assign(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    point_d2 = d2[np.arange(X.shape[0]), labels]
    return labels, point_d2


def _repair_empty(X, centers, labels, point_d2, k):
    """Reseed each empty cluster with the point currently farthest from
    its centroid."""
    for c in range(k):
        if not np.any(labels == c):
            j = int(point_d2.argmax())
            centers[c] = X[j]
            labels[j] = c
            point_d2[j] = 0.0
    return centers, labels, point_d2


def kmeans_fit(
    matrix: FeatureMatrix,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> ClusterModel:
    """Lloyd's algorithm with k-means++ initialization."""
    X = matrix.values
    n = X.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        raise TooFewRecords(f"{n} records for k={k}")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp_init(X, k, rng)
    history: list[float] = []
    labels = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        labels, point_d2 = _assign(X, centers)
        centers, labels, point_d2 = _repair_empty(X, centers, labels, point_d2, k)
        history.append(float(point_d2.sum()))
        new_centers = np.array([X[labels == c].mean(axis=0) for c in range(k)])
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < tol:
            break
    labels, point_d2 = _assign(X, centers)
    centers, labels, point_d2 = _repair_empty(X, centers, labels, point_d2, k)
    wcss = float(point_d2.sum())
    history.append(wcss)
    model = ClusterModel(
        algorithm="kmeans",
        params={"k": k, "max_iter": max_iter, "tol": tol},
        features=matrix.features,
        seed=seed,
        input_ids=matrix.input_ids,
        assignments=tuple(int(v) for v in labels),
        centroids=tuple(tuple(float(v) for v in c) for c in centers),
        wcss=wcss,
        wcss_history=tuple(history),
    )
    return _with_medoids(model, matrix)


# ---------------------------------------------------------------------------
# DBSCAN


def dbscan_fit(matrix: FeatureMatrix, eps: float, min_pts: int) -> ClusterModel:
    """Core/border/noise labeling with Euclidean distance.

    Region queries expand in ascending record index, so the labeling is
    deterministic for a fixed record order. Neighborhoods include the
    point itself.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    X = matrix.values
    n = X.shape[0]
    eps2 = eps * eps

    def region(i: int) -> np.ndarray:
        d2 = ((X - X[i]) ** 2).sum(axis=1)
        return np.flatnonzero(d2 <= eps2)

    labels = np.full(n, _UNVISITED, dtype=int)
    cluster = 0
    for i in range(n):
        if labels[i] != _UNVISITED:
            continue
        neighbors = region(i)
        if neighbors.size < min_pts:
            labels[i] = NOISE
            continue
        labels[i] = cluster
        queue = deque(int(j) for j in neighbors if j != i)
        while queue:
            j = queue.popleft()
            if labels[j] == NOISE:
                labels[j] = cluster  # border point
            if labels[j] != _UNVISITED:
                continue
            labels[j] = cluster
            nj = region(j)
            if nj.size >= min_pts:
                queue.extend(int(m) for m in nj if labels[m] == _UNVISITED or labels[m] == NOISE)
        cluster += 1
    model = ClusterModel(
        algorithm="dbscan",
        params={"eps": eps, "min_pts": min_pts},
        features=matrix.features,
        seed=None,
        input_ids=matrix.input_ids,
        assignments=tuple(int(v) for v in labels),
    )
    if model.n_clusters > 0:
        model = _with_medoids(model, matrix)
    return model


# ---------------------------------------------------------------------------
# Gaussian mixture (EM, diagonal covariance)

_VAR_FLOOR = 1e-6


def gmm_fit(
    matrix: FeatureMatrix,
    k: int,
    seed: int = 0,
    max_iter: int = 200,
    tol: float = 1e-7,
) -> ClusterModel:
    """EM for a diagonal-covariance mixture, means seeded from k-means."""
    X = matrix.values
    n, d = X.shape
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        raise TooFewRecords(f"{n} records for k={k}")
    km = kmeans_fit(matrix, k=k, seed=seed)
    means = np.array(km.centroids)
    variances = np.empty((k, d))
    weights = np.empty(k)
    km_labels = np.array(km.assignments)
    for c in range(k):
        members = X[km_labels == c]
        weights[c] = max(len(members), 1) / n
        variances[c] = np.maximum(members.var(axis=0), _VAR_FLOOR) if len(members) else 1.0
    weights /= weights.sum()

    loglik_history: list[float] = []
    resp = np.full((n, k), 1.0 / k)
    prev_ll = -np.inf
    for _ in range(max_iter):
        # E-step
        log_prob = np.empty((n, k))
        for c in range(k):
            diff2 = (X - means[c]) ** 2 / variances[c]
            log_prob[:, c] = (
                np.log(weights[c])
                - 0.5 * np.log(2.0 * np.pi * variances[c]).sum()
                - 0.5 * diff2.sum(axis=1)
            )
        log_norm = _logsumexp(log_prob)
        ll = float(log_norm.sum())
        loglik_history.append(ll)
        resp = np.exp(log_prob - log_norm[:, None])
        if ll - prev_ll < tol and np.isfinite(prev_ll):
            break
        prev_ll = ll
        # M-step
        nk = resp.sum(axis=0)
        nk_safe = np.maximum(nk, 1e-12)
        weights = nk_safe / nk_safe.sum()
        means = resp.T @ X / nk_safe[:, None]
        for c in range(k):
            diff2 = (X - means[c]) ** 2
            variances[c] = np.maximum(
                (resp[:, c][:, None] * diff2).sum(axis=0) / nk_safe[c], _VAR_FLOOR
            )

    raw_labels = resp.argmax(axis=1)
    labels, kept = _compress_labels(raw_labels)
    centroids = tuple(tuple(float(v) for v in means[c]) for c in kept)
    model = ClusterModel(
        algorithm="gmm",
        params={"k": k, "max_iter": max_iter, "tol": tol},
        features=matrix.features,
        seed=seed,
        input_ids=matrix.input_ids,
        assignments=tuple(int(v) for v in labels),
        centroids=centroids,
        loglik_history=tuple(loglik_history),
    )
    return _with_medoids(model, matrix)


def _logsumexp(a: np.ndarray) -> np.ndarray:
    amax = a.max(axis=1)
    return amax + np.log(np.exp(a - amax[:, None]).sum(axis=1))


def _compress_labels(raw: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Relabel to contiguous 0..c-1 keeping first-seen order of the
    original labels."""
    kept: list[int] = []
    mapping: dict[int, int] = {}
    out = np.empty_like(raw)
    for i, lab in enumerate(raw):
        lab = int(lab)
        if lab not in mapping:
            mapping[lab] = len(kept)
            kept.append(lab)
        out[i] = mapping[lab]
    return out, kept


# ---------------------------------------------------------------------------
# Agglomerative


def agglomerative_fit(matrix: FeatureMatrix, k: int, linkage: str = "average") -> ClusterModel:
    """Bottom-up merging under single/complete/average linkage.

    Cluster distances are maintained with the Lance-Williams update; ties
    are broken toward the pair with the smallest minimum member indices.
    """
    if linkage not in ("average", "complete", "single"):
        raise ValueError(f"unknown linkage {linkage!r}")
    X = matrix.values
    n = X.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        raise TooFewRecords(f"{n} records for k={k}")

    dist = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    active = list(range(n))
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    min_index = {i: i for i in range(n)}

    while len(active) > k:
        best = None  # (distance, min_a, min_b, a, b)
        for ai in range(len(active)):
            a = active[ai]
            row = dist[a]
            for bi in range(ai + 1, len(active)):
                b = active[bi]
                d = row[b]
                lo, hi = sorted((min_index[a], min_index[b]))
                cand = (d, lo, hi, a, b)
                if best is None or cand < best:
                    best = cand
        _, _, _, a, b = best
        # merge b into a
        na, nb = len(members[a]), len(members[b])
        for c in active:
            if c in (a, b):
                continue
            if linkage == "single":
                d = min(dist[a, c], dist[b, c])
            elif linkage == "complete":
                d = max(dist[a, c], dist[b, c])
            else:
                d = (na * dist[a, c] + nb * dist[b, c]) / (na + nb)
            dist[a, c] = dist[c, a] = d
        members[a].extend(members[b])
        min_index[a] = min(min_index[a], min_index[b])
        active.remove(b)
        del members[b]

    # label clusters by ascending smallest member index
    ordered = sorted(active, key=lambda c: min_index[c])
    labels = np.empty(n, dtype=int)
    for lab, c in enumerate(ordered):
        for i in members[c]:
            labels[i] = lab
    model = ClusterModel(
        algorithm="agglomerative",
        params={"k": k, "linkage": linkage},
        features=matrix.features,
        seed=None,
        input_ids=matrix.input_ids,
        assignments=tuple(int(v) for v in labels),
    )
    return _with_medoids(model, matrix)


# ---------------------------------------------------------------------------
# Medoids


def medoids(model: ClusterModel, matrix: FeatureMatrix) -> dict[int, str]:
    """Per cluster, the record minimizing the summed Euclidean distance to
    all members; ties go to the lowest record index."""
    X = matrix.values
    labels = np.array(model.assignments)
    cluster_labels = sorted({int(l) for l in labels if l != NOISE})
    if not cluster_labels:
        raise NoClusters("all records are noise")
    result: dict[int, str] = {}
    for lab in cluster_labels:
        idx = np.flatnonzero(labels == lab)
        pts = X[idx]
        dsum = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)).sum(axis=1)
        best = idx[int(dsum.argmin())]  # argmin takes the first (lowest index) on ties
        result[lab] = matrix.input_ids[best]
    return result


def _with_medoids(model: ClusterModel, matrix: FeatureMatrix) -> ClusterModel:
    from dataclasses import replace

    return replace(model, medoids=medoids(model, matrix))
