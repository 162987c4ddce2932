"""Slowdown detection: time thresholds, gradient checks and the RUN/SKIP
verdict.

For each re-profiled (updated) point, a time threshold is resolved from
its cluster's baseline members: the max baseline time at the same
statement count when one exists, the midpoint of the bracketing maxima
when the statement count falls between baseline counts, or the
nearest-extreme max time when it falls outside the cluster entirely.
A point is flagged when its time exceeds the threshold or, failing that,
when the origin-anchored gradient (time per statement) grew by more than
the acceptable limit. Flags are aggregated by majority vote.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .clustering import NOISE, ClusterModel
from .errors import (
    ClusterMismatch,
    EmptyCluster,
    NonPositiveStatements,
    UnknownInput,
)
from .profiles import CommitSnapshot, aggregate_by_input

EQUAL_MATCH = "equal_match"
BRACKET = "bracket"
OUTLIER_ABOVE = "outlier_above"
OUTLIER_BELOW = "outlier_below"

SKIPPED = "skipped"

RUN = "RUN"
SKIP = "SKIP"

_VOTE_EPS = 1e-12
_UNCERTAIN_BAND = 0.1


@dataclass(frozen=True)
class UpdatedPoint:
    """One sampled input re-profiled under the updated code."""

    input_id: str
    statements: int  # S_u
    exec_time: float  # T_u, ms
    cluster: Optional[int] = None

    def validate(self) -> None:
        if self.statements <= 0:
            raise NonPositiveStatements(f"{self.input_id}: statements must be > 0")
        if self.exec_time <= 0:
            raise ValueError(f"{self.input_id}: exec_time must be > 0")


@dataclass(frozen=True)
class ThresholdResult:
    case: str
    threshold: float  # T_h, ms
    ref_point: tuple[float, float]  # (S_ref, T_ref) for the baseline gradient
    t_above: Optional[float] = None  # bracket: max time at the count just above
    t_below: Optional[float] = None  # bracket: max time at the count just below

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "threshold_ms": self.threshold,
            "t_above": self.t_above,
            "t_below": self.t_below,
            "ref_point": {"statements": self.ref_point[0], "exec_time_ms": self.ref_point[1]},
        }


def resolve_threshold(cluster_points: Sequence[tuple[float, float]], statements: float) -> ThresholdResult:
    """Resolve the time threshold for an updated statement count against a
    cluster's baseline (statements, time) points."""
    if not cluster_points:
        raise EmptyCluster("cluster has no baseline points")
    for s, t in cluster_points:
        if s <= 0:
            raise NonPositiveStatements("baseline statement counts must be > 0")
        if t <= 0:
            raise ValueError("baseline times must be > 0")
    if statements <= 0:
        raise NonPositiveStatements("updated statement count must be > 0")

    at_same = [t for s, t in cluster_points if s == statements]
    if at_same:
        t_h = max(at_same)
        return ThresholdResult(EQUAL_MATCH, t_h, (statements, t_h))

    above = [s for s, _ in cluster_points if s > statements]
    below = [s for s, _ in cluster_points if s < statements]
    if above and below:
        s_a = min(above)
        s_b = max(below)
        t_a = max(t for s, t in cluster_points if s == s_a)
        t_b = max(t for s, t in cluster_points if s == s_b)
        t_h = (t_a + t_b) / 2.0
        return ThresholdResult(BRACKET, t_h, (statements, t_h), t_above=t_a, t_below=t_b)

    if below:  # updated point above the whole cluster
        s_m = max(below)
        case = OUTLIER_ABOVE
    else:  # below the whole cluster
        s_m = min(above)
        case = OUTLIER_BELOW
    t_m = max(t for s, t in cluster_points if s == s_m)
    return ThresholdResult(case, t_m, (s_m, t_m))


@dataclass(frozen=True)
class CheckResult:
    input_id: str
    cluster: int
    case: str
    threshold: float
    threshold_check: bool
    gradient_check: object  # True | False | "skipped"
    baseline_gradient: Optional[float]  # G = T_ref / S_ref
    updated_gradient: Optional[float]  # G1 = T_u / S_u
    gradient_change_pct: Optional[float]  # G_c
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "input_id": self.input_id,
            "cluster": self.cluster,
            "case": self.case,
            "threshold_ms": self.threshold,
            "threshold_check": self.threshold_check,
            "gradient_check": self.gradient_check,
            "baseline_gradient": self.baseline_gradient,
            "updated_gradient": self.updated_gradient,
            "gradient_change_pct": self.gradient_change_pct,
            "flagged": self.flagged,
        }


def decide_point(updated: UpdatedPoint, threshold: ThresholdResult, acceptable_limit: float) -> CheckResult:
    """Apply the threshold check, then the gradient check when the
    threshold holds. Comparisons are strict, matching the detection rule
    "time above threshold" / "gradient change above the limit"."""
    if acceptable_limit < 0:
        raise ValueError("acceptable_limit must be >= 0")
    updated.validate()
    cluster = updated.cluster if updated.cluster is not None else -1

    if updated.exec_time > threshold.threshold:
        return CheckResult(
            input_id=updated.input_id,
            cluster=cluster,
            case=threshold.case,
            threshold=threshold.threshold,
            threshold_check=True,
            gradient_check=SKIPPED,
            baseline_gradient=None,
            updated_gradient=None,
            gradient_change_pct=None,
            flagged=True,
        )

    s_ref, t_ref = threshold.ref_point
    if s_ref <= 0:
        raise NonPositiveStatements("reference statement count must be > 0")
    g = t_ref / s_ref
    g1 = updated.exec_time / updated.statements
    g_c = 100.0 * (g1 - g) / g
    gradient_hit = g_c > acceptable_limit
    return CheckResult(
        input_id=updated.input_id,
        cluster=cluster,
        case=threshold.case,
        threshold=threshold.threshold,
        threshold_check=False,
        gradient_check=gradient_hit,
        baseline_gradient=g,
        updated_gradient=g1,
        gradient_change_pct=g_c,
        flagged=gradient_hit,
    )


@dataclass(frozen=True)
class DecisionReport:
    acceptable_limit: float
    vote_threshold: float
    checks: tuple[CheckResult, ...]
    flagged_fraction: float
    verdict: str  # RUN | SKIP
    uncertain: bool

    def to_dict(self) -> dict:
        return {
            "acceptable_limit": self.acceptable_limit,
            "vote_threshold": self.vote_threshold,
            "checks": [c.to_dict() for c in self.checks],
            "flagged_fraction": self.flagged_fraction,
            "verdict": self.verdict,
            "uncertain": self.uncertain,
        }


def evaluate_batch(
    model: ClusterModel,
    baseline: CommitSnapshot,
    updated: Sequence[UpdatedPoint],
    acceptable_limit: float,
    vote_threshold: float = 0.5,
) -> DecisionReport:
    """Evaluate every updated point against its own cluster's baseline and
    aggregate the flags into a RUN/SKIP verdict."""
    if not 0 < vote_threshold <= 1:
        raise ValueError("vote_threshold must be in (0, 1]")
    if not updated:
        raise ValueError("no updated points to evaluate")
    baseline = aggregate_by_input(baseline)

    cluster_points: dict[int, list[tuple[float, float]]] = {}
    for r in baseline.records:
        try:
            label = model.label_of(r.input_id)
        except UnknownInput:
            continue
        if label == NOISE:
            continue
        cluster_points.setdefault(label, []).append((float(r.statements), r.exec_time))

    checks: list[CheckResult] = []
    for point in updated:
        label = model.label_of(point.input_id)
        if point.cluster is not None and point.cluster != label:
            raise ClusterMismatch(
                f"{point.input_id}: declared cluster {point.cluster}, model says {label}"
            )
        if label == NOISE or label not in cluster_points:
            raise EmptyCluster(f"{point.input_id} has no cluster baseline")
        threshold = resolve_threshold(cluster_points[label], float(point.statements))
        point = UpdatedPoint(point.input_id, point.statements, point.exec_time, label)
        checks.append(decide_point(point, threshold, acceptable_limit))

    flagged = sum(1 for c in checks if c.flagged)
    fraction = flagged / len(checks)
    verdict = RUN if fraction >= vote_threshold - _VOTE_EPS else SKIP
    uncertain = abs(fraction - vote_threshold) <= _UNCERTAIN_BAND
    return DecisionReport(
        acceptable_limit=acceptable_limit,
        vote_threshold=vote_threshold,
        checks=tuple(checks),
        flagged_fraction=fraction,
        verdict=verdict,
        uncertain=uncertain,
    )


def updated_points_from_snapshot(
    snapshot: CommitSnapshot, sampled_ids: Sequence[str]
) -> list[UpdatedPoint]:
    """Project an updated-commit snapshot onto the sampled ids, in the
    given sample order."""
    snapshot = aggregate_by_input(snapshot)
    by_id = {r.input_id: r for r in snapshot.records}
    points = []
    for input_id in sampled_ids:
        if input_id not in by_id:
            raise UnknownInput(input_id)
        r = by_id[input_id]
        points.append(UpdatedPoint(input_id=input_id, statements=r.statements, exec_time=r.exec_time))
    return points


def column_names(checks: Sequence[CheckResult]) -> list[str]:
    """Table-style column labels: C<cluster+1><position within cluster>."""
    counters: dict[int, int] = {}
    names = []
    for c in checks:
        counters[c.cluster] = counters.get(c.cluster, 0) + 1
        names.append(f"C{c.cluster + 1}{counters[c.cluster]}")
    return names


def render_table(report: DecisionReport) -> str:
    """Text table in the two-row checks layout: TimeThreshold / Gradient."""
    names = column_names(report.checks)
    thr_cells = ["True" if c.threshold_check else "False" for c in report.checks]
    grad_cells = [
        "x" if c.gradient_check == SKIPPED else ("True" if c.gradient_check else "False")
        for c in report.checks
    ]
    header = ["Checks"] + names
    rows = [
        ["TimeThreshold"] + thr_cells,
        ["Gradient"] + grad_cells,
    ]
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]
    lines = []
    for row in [header] + rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    lines.append("")
    lines.append(
        f"flagged: {sum(1 for c in report.checks if c.flagged)}/{len(report.checks)}"
        f"  verdict: {report.verdict}"
        + ("  (uncertain)" if report.uncertain else "")
    )
    return "\n".join(lines)
