"""Minimized suites and per-cluster random sampling.

The minimized suite is just the medoid of each cluster. Sampling picks a
few members per cluster, uniformly without replacement, to re-profile
after a code update.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .clustering import NOISE, ClusterModel
from .errors import NoClusters
from .stats import FeatureMatrix


@dataclass(frozen=True)
class SamplePlan:
    per_cluster: int = 3
    seed: int = 0
    include_noise: bool = False
    sampled: dict = field(default_factory=dict)  # label -> list of input_id

    def all_ids(self) -> list[str]:
        out = []
        for label in sorted(self.sampled):
            out.extend(self.sampled[label])
        return out

    def to_dict(self) -> dict:
        return {
            "per_cluster": self.per_cluster,
            "seed": self.seed,
            "include_noise": self.include_noise,
            "sampled": {str(k): list(v) for k, v in sorted(self.sampled.items())},
        }

    @staticmethod
    def from_dict(d: dict) -> "SamplePlan":
        return SamplePlan(
            per_cluster=int(d["per_cluster"]),
            seed=int(d["seed"]),
            include_noise=bool(d.get("include_noise", False)),
            sampled={int(k): list(v) for k, v in d.get("sampled", {}).items()},
        )


def minimized_suite(model: ClusterModel, matrix: FeatureMatrix) -> list[str]:
    """One representative (the medoid) per cluster, in label order."""
    from .clustering import medoids

    meds = model.medoids or medoids(model, matrix)
    if not meds:
        raise NoClusters("model has no clusters")
    return [meds[label] for label in sorted(meds)]


def _cluster_members(model: ClusterModel, include_noise: bool) -> dict[int, list[str]]:
    groups: dict[int, list[str]] = {}
    for input_id, label in zip(model.input_ids, model.assignments):
        if label == NOISE and not include_noise:
            continue
        groups.setdefault(label, []).append(input_id)
    if not groups:
        raise NoClusters("all records are noise")
    return groups


def sample_per_cluster(model: ClusterModel, plan: SamplePlan) -> SamplePlan:
    """Fill the plan with a uniform without-replacement sample per cluster.

    Deterministic for a fixed (model, plan.seed); samples are clamped to
    the cluster size.
    """
    if plan.per_cluster < 1:
        raise ValueError("per_cluster must be >= 1")
    groups = _cluster_members(model, plan.include_noise)
    rng = np.random.default_rng(plan.seed)
    sampled: dict[int, list[str]] = {}
    for label in sorted(groups):
        ids = groups[label]
        take = min(plan.per_cluster, len(ids))
        chosen = rng.choice(len(ids), size=take, replace=False)
        sampled[label] = [ids[i] for i in sorted(int(c) for c in chosen)]
    return replace(plan, sampled=sampled)


def escalate_sample(model: ClusterModel, plan: SamplePlan, additional: int, seed: int) -> SamplePlan:
    """Grow each cluster's sample by up to `additional` fresh points.

    Previously sampled ids are kept; clusters already fully sampled are
    left alone.
    """
    if additional < 1:
        raise ValueError("additional must be >= 1")
    groups = _cluster_members(model, plan.include_noise)
    rng = np.random.default_rng(seed)
    sampled: dict[int, list[str]] = {}
    for label in sorted(groups):
        ids = groups[label]
        have = list(plan.sampled.get(label, []))
        pool = [i for i in ids if i not in have]
        take = min(additional, len(pool))
        if take > 0:
            chosen = rng.choice(len(pool), size=take, replace=False)
            have.extend(pool[i] for i in sorted(int(c) for c in chosen))
        sampled[label] = have
    return replace(plan, per_cluster=plan.per_cluster + additional, seed=seed, sampled=sampled)
