"""Correlation, significance and elbow-method model selection.

Pearson r uses the product-moment formula; two-tailed p-values come from
the t statistic t = r*sqrt((n-2)/(1-r^2)) via the regularized incomplete
beta function. Elbow selection runs k-means per k and picks the k with
the largest discrete second difference of the distortion (WCSS) curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .errors import TooFewRecords
from .profiles import ATTRIBUTES, CommitSnapshot, aggregate_by_input


@dataclass(frozen=True)
class FeatureMatrix:
    """Standardized feature columns for a snapshot, row-aligned to input_ids."""

    input_ids: tuple[str, ...]
    features: tuple[str, ...]
    values: np.ndarray  # shape (n, len(features))
    constant_features: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.values.shape[0]


def standardize(snapshot: CommitSnapshot, features: Sequence[str]) -> FeatureMatrix:
    """Zero-mean, unit-sample-sd columns. Constant columns become zeros and
    are flagged in constant_features."""
    if not features:
        raise ValueError("features must be non-empty")
    for f in features:
        if f not in ATTRIBUTES:
            raise ValueError(f"unknown attribute {f!r}")
    snapshot = aggregate_by_input(snapshot)
    if len(snapshot.records) < 2:
        raise TooFewRecords("standardize needs at least 2 records")
    raw = np.array(
        [[r.attribute(f) for f in features] for r in snapshot.records], dtype=float
    )
    mean = raw.mean(axis=0)
    sd = raw.std(axis=0, ddof=1)
    constant = sd == 0.0
    sd_safe = np.where(constant, 1.0, sd)
    values = (raw - mean) / sd_safe
    values[:, constant] = 0.0
    return FeatureMatrix(
        input_ids=tuple(r.input_id for r in snapshot.records),
        features=tuple(features),
        values=values,
        constant_features=tuple(f for f, c in zip(features, constant) if c),
    )


@dataclass(frozen=True)
class CorrelationMatrix:
    attributes: tuple[str, ...]
    r: np.ndarray  # 7x7
    p: np.ndarray  # 7x7
    n: int
    undefined_pairs: tuple[tuple[str, str], ...] = ()
    constant_attributes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "attributes": list(self.attributes),
            "r": [[None if np.isnan(v) else float(v) for v in row] for row in self.r],
            "p": [[float(v) for v in row] for row in self.p],
            "n": self.n,
            "constant_attributes": list(self.constant_attributes),
        }


def t_sf_two_tailed(t: float, df: int) -> float:
    """Two-tailed tail probability of Student's t via the regularized
    incomplete beta function."""
    if not np.isfinite(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    denom = np.sqrt((xd * xd).sum() * (yd * yd).sum())
    if denom == 0.0:
        return float("nan")
    return float(np.clip((xd * yd).sum() / denom, -1.0, 1.0))


def pearson_p(r: float, n: int) -> float:
    """Two-tailed p-value for a Pearson coefficient at sample size n."""
    if np.isnan(r):
        return 1.0
    if abs(r) >= 1.0:
        return 0.0
    df = n - 2
    t = r * np.sqrt(df / (1.0 - r * r))
    return t_sf_two_tailed(t, df)


def pearson_matrix(snapshot: CommitSnapshot) -> CorrelationMatrix:
    """All-pairs Pearson r and p over the 7 profile attributes.

    Constant attributes yield NaN r (undefined) and p = 1 for their pairs;
    the diagonal is exactly r = 1, p = 0.
    """
    snapshot = aggregate_by_input(snapshot)
    n = len(snapshot.records)
    if n < 3:
        raise TooFewRecords("pearson_matrix needs at least 3 records")
    cols = {
        a: np.array([r.attribute(a) for r in snapshot.records], dtype=float)
        for a in ATTRIBUTES
    }
    k = len(ATTRIBUTES)
    r_mat = np.ones((k, k))
    p_mat = np.zeros((k, k))
    constant = [a for a in ATTRIBUTES if np.all(cols[a] == cols[a][0])]
    undefined = []
    for i in range(k):
        for j in range(i + 1, k):
            r = pearson_r(cols[ATTRIBUTES[i]], cols[ATTRIBUTES[j]])
            p = pearson_p(r, n)
            r_mat[i, j] = r_mat[j, i] = r
            p_mat[i, j] = p_mat[j, i] = p
            if np.isnan(r):
                undefined.append((ATTRIBUTES[i], ATTRIBUTES[j]))
    return CorrelationMatrix(
        attributes=ATTRIBUTES,
        r=r_mat,
        p=p_mat,
        n=n,
        undefined_pairs=tuple(undefined),
        constant_attributes=tuple(constant),
    )


@dataclass(frozen=True)
class ElbowCurve:
    k_values: tuple[int, ...]
    distortion: tuple[float, ...]
    knee: int
    low_confidence: bool = False

    def to_dict(self) -> dict:
        return {
            "k_values": list(self.k_values),
            "distortion": [float(d) for d in self.distortion],
            "knee": self.knee,
            "low_confidence": self.low_confidence,
        }


# Knee is advisory; flag it when the curve barely flattens (the residual
# distortion at the knee is still a sizeable share of the k=1 distortion).
LOW_CONFIDENCE_RATIO = 0.25


def elbow_curve(
    snapshot: CommitSnapshot,
    features: Sequence[str],
    k_max: int,
    seed: int,
) -> ElbowCurve:
    """WCSS curve over k = 1..k_max with the knee picked by the maximum
    discrete second difference. Per-k runs use seed + k."""
    from .clustering import kmeans_fit  # deferred: clustering depends on this module

    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    matrix = standardize(snapshot, features)
    if matrix.n < k_max:
        raise TooFewRecords(f"need at least {k_max} records for k_max={k_max}")
    k_values = tuple(range(1, k_max + 1))
    distortion = []
    for k in k_values:
        model = kmeans_fit(matrix, k=k, seed=seed + k)
        distortion.append(model.wcss)
    knee = _pick_knee(k_values, distortion)
    d1 = distortion[0]
    low = d1 <= 0.0 or (distortion[knee - 1] / d1) > LOW_CONFIDENCE_RATIO
    return ElbowCurve(
        k_values=k_values,
        distortion=tuple(distortion),
        knee=knee,
        low_confidence=low,
    )


def _pick_knee(k_values: Sequence[int], distortion: Sequence[float]) -> int:
    best_k = k_values[1]
    best = -np.inf
    for idx in range(1, len(k_values) - 1):
        second_diff = distortion[idx - 1] - 2.0 * distortion[idx] + distortion[idx + 1]
        if second_diff > best:
            best = second_diff
            best_k = k_values[idx]
    return best_k
