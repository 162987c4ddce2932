"""Command-line interface.

Pipeline order mirrors the gating workflow: ingest/synth profiles,
inspect statistics, cluster, minimize/sample, then decide on an updated
commit. Reports go to stdout; diagnostics to stderr.

Exit codes: 0 success (or SKIP verdict), 10 RUN recommended, 2 usage
error, 3 data error.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import clustering, decision, sampling, stats
from .errors import PerfGateError
from .profiles import (
    DEFAULT_FEATURES,
    SyntheticSpec,
    generate_synthetic,
    ingest as ingest_file,
)
from .workspace import Workspace

EXIT_RUN = 10
EXIT_DATA_ERROR = 3

DEFAULT_ACCEPTABLE_LIMIT = 38.0
DEFAULT_VOTE_THRESHOLD = 0.5
DEFAULT_PER_CLUSTER = 3


@dataclass
class CliConfig:
    workspace: Workspace
    seed: int
    features: tuple[str, ...]
    fmt: str


def emit(cfg: CliConfig, payload: dict, table: str | None = None) -> None:
    if cfg.fmt == "table" and table is not None:
        click.echo(table)
    else:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))


def data_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PerfGateError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_DATA_ERROR)

    return wrapper


def _parse_features(value: str) -> tuple[str, ...]:
    return tuple(f.strip() for f in value.split(",") if f.strip())


@click.group()
@click.option("--workspace", default=".", show_default=True, help="Workspace directory.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option(
    "--features",
    default=",".join(DEFAULT_FEATURES),
    show_default=True,
    help="Comma-separated attribute subset for clustering.",
)
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json", show_default=True)
@click.pass_context
def main(ctx, workspace, seed, features, fmt):
    """Cluster test-input profiles and decide when to run performance tests."""
    ctx.obj = CliConfig(
        workspace=Workspace(workspace),
        seed=seed,
        features=_parse_features(features),
        fmt=fmt,
    )


@main.command("ingest")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--input-format", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--commit", required=True, help="Commit id to store the snapshot under.")
@click.pass_obj
@data_errors
def ingest_cmd(cfg: CliConfig, path, input_format, commit):
    """Ingest a profile file into the workspace."""
    snapshot = ingest_file(path, input_format, commit)
    out = cfg.workspace.save_snapshot(snapshot)
    emit(
        cfg,
        {"commit_id": commit, "records": len(snapshot.records), "path": str(out)},
        table=f"{commit}: {len(snapshot.records)} records -> {out}",
    )


@main.command("synth")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--commit", required=True)
@click.pass_obj
@data_errors
def synth_cmd(cfg: CliConfig, spec_path, commit):
    """Generate a seeded synthetic snapshot from a blob spec file."""
    spec = SyntheticSpec.from_dict(json.loads(Path(spec_path).read_text()))
    snapshot = generate_synthetic(spec, cfg.seed, commit_id=commit)
    out = cfg.workspace.save_snapshot(snapshot)
    emit(
        cfg,
        {"commit_id": commit, "records": len(snapshot.records), "seed": cfg.seed, "path": str(out)},
        table=f"{commit}: {len(snapshot.records)} synthetic records -> {out}",
    )


@main.group("stats")
def stats_group():
    """Correlation and significance over snapshot attributes."""


def _corr_payload(cfg: CliConfig, commit: str) -> dict:
    snapshot = cfg.workspace.load_snapshot(commit)
    return stats.pearson_matrix(snapshot).to_dict()


@stats_group.command("corr")
@click.option("--commit", required=True)
@click.pass_obj
@data_errors
def stats_corr(cfg: CliConfig, commit):
    """Pearson correlation matrix for a commit's snapshot."""
    payload = _corr_payload(cfg, commit)
    cfg.workspace.save_report(f"corr_{commit}", payload)
    emit(cfg, payload, table=_matrix_table(payload["attributes"], payload["r"]))


@stats_group.command("pvalues")
@click.option("--commit", required=True)
@click.pass_obj
@data_errors
def stats_pvalues(cfg: CliConfig, commit):
    """Two-tailed p-values for the correlation matrix."""
    payload = _corr_payload(cfg, commit)
    cfg.workspace.save_report(f"pvalues_{commit}", payload)
    emit(cfg, payload, table=_matrix_table(payload["attributes"], payload["p"]))


def _matrix_table(attributes, matrix) -> str:
    width = max(len(a) for a in attributes) + 2
    lines = [" " * width + "".join(a.rjust(width) for a in attributes)]
    for name, row in zip(attributes, matrix):
        cells = "".join(
            ("nan" if v is None else f"{v:.3f}").rjust(width) for v in row
        )
        lines.append(name.rjust(width) + cells)
    return "\n".join(lines)


@main.command("elbow")
@click.option("--commit", required=True)
@click.option("--k-max", default=8, show_default=True, type=int)
@click.pass_obj
@data_errors
def elbow_cmd(cfg: CliConfig, commit, k_max):
    """Distortion curve over k with an advisory knee."""
    snapshot = cfg.workspace.load_snapshot(commit)
    curve = stats.elbow_curve(snapshot, cfg.features, k_max, cfg.seed)
    payload = curve.to_dict()
    cfg.workspace.save_report(f"elbow_{commit}", payload)
    table = "\n".join(
        f"k={k}: {d:.4f}" for k, d in zip(curve.k_values, curve.distortion)
    ) + f"\nknee: {curve.knee}" + ("  (low confidence)" if curve.low_confidence else "")
    emit(cfg, payload, table=table)


@main.command("cluster")
@click.option("--commit", required=True)
@click.option("--algo", type=click.Choice(["kmeans", "gmm", "agglomerative", "dbscan"]), required=True)
@click.option("--name", default=None, help="Model name (default: the algorithm name).")
@click.option("--k", type=int, default=None, help="Cluster count (kmeans/gmm/agglomerative).")
@click.option("--eps", type=float, default=None, help="DBSCAN neighborhood radius.")
@click.option("--min-pts", type=int, default=5, show_default=True)
@click.option("--linkage", type=click.Choice(["average", "complete", "single"]), default="average", show_default=True)
@click.option("--max-iter", type=int, default=300, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--kdist", type=int, default=None,
              help="DBSCAN helper: print the sorted k-distance curve instead of fitting.")
@click.pass_obj
@data_errors
def cluster_cmd(cfg: CliConfig, commit, algo, name, k, eps, min_pts, linkage, max_iter, tol, kdist):
    """Fit a cluster model on a commit's standardized features."""
    snapshot = cfg.workspace.load_snapshot(commit)
    matrix = stats.standardize(snapshot, cfg.features)

    if algo == "dbscan" and kdist is not None:
        import numpy as np

        X = matrix.values
        d = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2))
        d.sort(axis=1)
        curve = np.sort(d[:, min(kdist, X.shape[0] - 1)])[::-1]
        payload = {"k": kdist, "distances": [float(v) for v in curve]}
        emit(cfg, payload, table="\n".join(f"{v:.4f}" for v in curve))
        return

    if algo == "kmeans":
        if k is None:
            raise click.UsageError("--k is required for kmeans")
        model = clustering.kmeans_fit(matrix, k=k, seed=cfg.seed, max_iter=max_iter, tol=tol)
    elif algo == "gmm":
        if k is None:
            raise click.UsageError("--k is required for gmm")
        model = clustering.gmm_fit(matrix, k=k, seed=cfg.seed, max_iter=max_iter, tol=tol)
    elif algo == "agglomerative":
        if k is None:
            raise click.UsageError("--k is required for agglomerative")
        model = clustering.agglomerative_fit(matrix, k=k, linkage=linkage)
    else:
        if eps is None:
            raise click.UsageError("--eps is required for dbscan (see --kdist for a helper)")
        model = clustering.dbscan_fit(matrix, eps=eps, min_pts=min_pts)

    name = name or algo
    cfg.workspace.save_model_dict(name, model.to_dict())
    sizes = model.cluster_sizes()
    payload = {
        "name": name,
        "algorithm": model.algorithm,
        "clusters": {str(lab): sizes[lab] for lab in sorted(sizes)},
        "noise": model.noise_count(),
        "medoids": {str(lab): mid for lab, mid in sorted(model.medoids.items())},
    }
    table = "\n".join(
        [f"model {name} ({model.algorithm}): {len(sizes)} clusters, {model.noise_count()} noise"]
        + [f"  cluster {lab}: {sizes[lab]} members, medoid {model.medoids[lab]}" for lab in sorted(sizes)]
    )
    emit(cfg, payload, table=table)


def _load_model(cfg: CliConfig, name: str) -> clustering.ClusterModel:
    return clustering.ClusterModel.from_dict(cfg.workspace.load_model_dict(name))


@main.command("minimize")
@click.option("--commit", required=True)
@click.option("--model", "model_name", required=True)
@click.pass_obj
@data_errors
def minimize_cmd(cfg: CliConfig, commit, model_name):
    """Print the minimized suite: one medoid input per cluster."""
    model = _load_model(cfg, model_name)
    snapshot = cfg.workspace.load_snapshot(commit)
    matrix = stats.standardize(snapshot, model.features)
    suite = sampling.minimized_suite(model, matrix)
    emit(cfg, {"model": model_name, "suite": suite}, table="\n".join(suite))


@main.command("sample")
@click.option("--model", "model_name", required=True)
@click.option("--per-cluster", default=DEFAULT_PER_CLUSTER, show_default=True, type=int)
@click.option("--include-noise", is_flag=True, default=False)
@click.option("--name", default="plan", show_default=True, help="Plan name within the workspace.")
@click.option("--escalate", type=int, default=None,
              help="Grow the named existing plan by this many points per cluster.")
@click.pass_obj
@data_errors
def sample_cmd(cfg: CliConfig, model_name, per_cluster, include_noise, name, escalate):
    """Draw (or escalate) a per-cluster random sample for re-profiling."""
    model = _load_model(cfg, model_name)
    plan_path = cfg.workspace.reports_dir / f"plan_{name}.json"
    if escalate is not None:
        if not plan_path.is_file():
            raise click.UsageError(f"no existing plan {name!r} to escalate")
        plan = sampling.SamplePlan.from_dict(json.loads(plan_path.read_text()))
        plan = sampling.escalate_sample(model, plan, escalate, cfg.seed)
    else:
        plan = sampling.SamplePlan(per_cluster=per_cluster, seed=cfg.seed, include_noise=include_noise)
        plan = sampling.sample_per_cluster(model, plan)
    cfg.workspace.save_report(f"plan_{name}", plan.to_dict())
    emit(cfg, plan.to_dict(), table="\n".join(plan.all_ids()))


def _decide(cfg: CliConfig, model_name, baseline, updated_commit, plan, acceptable_limit, vote_threshold):
    model = _load_model(cfg, model_name)
    base = cfg.workspace.load_snapshot(baseline)
    upd = cfg.workspace.load_snapshot(updated_commit)
    points = decision.updated_points_from_snapshot(upd, plan.all_ids())
    return decision.evaluate_batch(model, base, points, acceptable_limit, vote_threshold)


@main.command("decide")
@click.option("--model", "model_name", required=True)
@click.option("--baseline", required=True, help="Baseline commit id.")
@click.option("--updated-commit", required=True, help="Commit id of the re-profiled sample.")
@click.option("--plan", "plan_name", default="plan", show_default=True)
@click.option("--acceptable-limit", default=DEFAULT_ACCEPTABLE_LIMIT, show_default=True, type=float)
@click.option("--vote-threshold", default=DEFAULT_VOTE_THRESHOLD, show_default=True, type=float)
@click.pass_obj
@data_errors
def decide_cmd(cfg: CliConfig, model_name, baseline, updated_commit, plan_name, acceptable_limit, vote_threshold):
    """Run the slowdown checks for an updated commit against a baseline."""
    plan_path = cfg.workspace.reports_dir / f"plan_{plan_name}.json"
    if not plan_path.is_file():
        raise click.UsageError(f"no sample plan {plan_name!r}; run `sample` first")
    plan = sampling.SamplePlan.from_dict(json.loads(plan_path.read_text()))
    report = _decide(cfg, model_name, baseline, updated_commit, plan, acceptable_limit, vote_threshold)
    cfg.workspace.save_report(f"decision_{baseline}_{updated_commit}", report.to_dict())
    emit(cfg, report.to_dict(), table=decision.render_table(report))
    if report.verdict == decision.RUN:
        sys.exit(EXIT_RUN)


@main.command("recommend")
@click.option("--model", "model_name", required=True)
@click.option("--baseline", required=True)
@click.option("--updated-commit", required=True)
@click.option("--per-cluster", default=DEFAULT_PER_CLUSTER, show_default=True, type=int)
@click.option("--acceptable-limit", default=DEFAULT_ACCEPTABLE_LIMIT, show_default=True, type=float)
@click.option("--vote-threshold", default=DEFAULT_VOTE_THRESHOLD, show_default=True, type=float)
@click.pass_obj
@data_errors
def recommend_cmd(cfg: CliConfig, model_name, baseline, updated_commit, per_cluster, acceptable_limit, vote_threshold):
    """Sample, decide and aggregate in one step; exits 10 on RUN."""
    model = _load_model(cfg, model_name)
    plan = sampling.sample_per_cluster(
        model, sampling.SamplePlan(per_cluster=per_cluster, seed=cfg.seed)
    )
    cfg.workspace.save_report("plan_recommend", plan.to_dict())
    report = _decide(cfg, model_name, baseline, updated_commit, plan, acceptable_limit, vote_threshold)
    cfg.workspace.save_report(f"decision_{baseline}_{updated_commit}", report.to_dict())
    emit(cfg, report.to_dict(), table=decision.render_table(report))
    if report.verdict == decision.RUN:
        sys.exit(EXIT_RUN)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.pass_obj
def serve_cmd(cfg: CliConfig, host, port):
    """Start the HTTP API for the inspection dashboard."""
    import uvicorn

    from .server.app import create_app

    app = create_app(cfg.workspace.root)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
