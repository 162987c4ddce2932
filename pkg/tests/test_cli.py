import json

import pytest
from click.testing import CliRunner

from conftest import two_blob_spec
from perfgate.cli import EXIT_DATA_ERROR, EXIT_RUN, main
from perfgate.profiles import generate_synthetic, save_snapshot_csv
from perfgate.workspace import Workspace
from scenarios import build_headroom_workspace, build_regression_workspace

runner = CliRunner()


def invoke(*args, **kwargs):
    return runner.invoke(main, [str(a) for a in args], **kwargs)


SPEC_DICT = {
    "blobs": [
        {
            "count": 20,
            "input_size": {"mean": 1000, "spread": 30},
            "statements": {"mean": 5000, "spread": 60},
        },
        {
            "count": 20,
            "input_size": {"mean": 8000, "spread": 120},
            "statements": {"mean": 20000, "spread": 150},
        },
    ],
    "time_model": {"coef": 0.01, "noise": 0.3},
}


@pytest.fixture
def base_ws(tmp_path):
    ws = Workspace(tmp_path)
    ws.save_snapshot(generate_synthetic(two_blob_spec(count=30), seed=5, commit_id="base"))
    return tmp_path


class TestIngestSynth:
    def test_synth_writes_snapshot(self, tmp_path):
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(json.dumps(SPEC_DICT))
        res = invoke("--workspace", tmp_path, "--seed", 3, "synth",
                     "--spec", spec_file, "--commit", "base")
        assert res.exit_code == 0, res.output
        payload = json.loads(res.stdout)
        assert payload["records"] == 40
        assert (tmp_path / "snapshots" / "base.json").is_file()

    def test_synth_deterministic_for_seed(self, tmp_path):
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(json.dumps(SPEC_DICT))
        out = tmp_path / "snapshots" / "base.json"
        invoke("--workspace", tmp_path, "--seed", 3, "synth",
               "--spec", spec_file, "--commit", "base")
        first = out.read_bytes()
        invoke("--workspace", tmp_path, "--seed", 3, "synth",
               "--spec", spec_file, "--commit", "base")
        assert out.read_bytes() == first

    def test_ingest_csv(self, tmp_path):
        snap = generate_synthetic(two_blob_spec(count=10), seed=1, commit_id="c1")
        csv_path = tmp_path / "profile.csv"
        save_snapshot_csv(snap, csv_path)
        res = invoke("--workspace", tmp_path, "ingest", csv_path, "--commit", "c1")
        assert res.exit_code == 0, res.output
        assert json.loads(res.stdout)["records"] == 20
        assert Workspace(tmp_path).has_snapshot("c1")

    def test_ingest_malformed_exits_3(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "input_id,input_size,exec_time_ms,memory_kb,iterations,"
            "statements,function_calls,conditionals\n"
            "a,10,0,5,1,100,1,1\n"
        )
        res = invoke("--workspace", tmp_path, "ingest", bad, "--commit", "c1")
        assert res.exit_code == EXIT_DATA_ERROR
        assert "MalformedRow" in res.stderr

    def test_unknown_command_exits_2(self):
        assert invoke("bogus").exit_code == 2


class TestStats:
    def test_corr_json_and_report(self, base_ws):
        res = invoke("--workspace", base_ws, "stats", "corr", "--commit", "base")
        assert res.exit_code == 0, res.output
        payload = json.loads(res.stdout)
        assert len(payload["attributes"]) == 7
        assert payload["r"][0][0] == pytest.approx(1.0)
        assert (base_ws / "reports" / "corr_base.json").is_file()

    def test_corr_byte_stable(self, base_ws):
        a = invoke("--workspace", base_ws, "stats", "corr", "--commit", "base")
        b = invoke("--workspace", base_ws, "stats", "corr", "--commit", "base")
        assert a.stdout == b.stdout

    def test_pvalues_in_range(self, base_ws):
        res = invoke("--workspace", base_ws, "stats", "pvalues", "--commit", "base")
        payload = json.loads(res.stdout)
        for row in payload["p"]:
            assert all(0.0 <= v <= 1.0 for v in row)

    def test_table_format(self, base_ws):
        res = invoke("--workspace", base_ws, "--format", "table",
                     "stats", "corr", "--commit", "base")
        assert res.exit_code == 0
        assert "statements" in res.stdout
        assert "{" not in res.stdout

    def test_unknown_commit_exits_3(self, base_ws):
        res = invoke("--workspace", base_ws, "stats", "corr", "--commit", "nope")
        assert res.exit_code == EXIT_DATA_ERROR
        assert "UnknownCommit" in res.stderr

    def test_elbow(self, base_ws):
        res = invoke("--workspace", base_ws, "elbow", "--commit", "base", "--k-max", 6)
        assert res.exit_code == 0, res.output
        payload = json.loads(res.stdout)
        assert payload["knee"] in payload["k_values"]
        assert payload["knee"] == 2
        assert (base_ws / "reports" / "elbow_base.json").is_file()


class TestCluster:
    def test_kmeans_writes_model(self, base_ws):
        res = invoke("--workspace", base_ws, "cluster", "--commit", "base",
                     "--algo", "kmeans", "--k", 2)
        assert res.exit_code == 0, res.output
        payload = json.loads(res.stdout)
        assert sum(payload["clusters"].values()) == 60
        assert sorted(payload["clusters"]) == ["0", "1"]
        assert (base_ws / "models" / "kmeans.json").is_file()

    def test_kmeans_without_k_exits_2(self, base_ws):
        res = invoke("--workspace", base_ws, "cluster", "--commit", "base", "--algo", "kmeans")
        assert res.exit_code == 2

    def test_dbscan_without_eps_exits_2(self, base_ws):
        res = invoke("--workspace", base_ws, "cluster", "--commit", "base", "--algo", "dbscan")
        assert res.exit_code == 2

    def test_dbscan_kdist_helper(self, base_ws):
        res = invoke("--workspace", base_ws, "cluster", "--commit", "base",
                     "--algo", "dbscan", "--kdist", 4)
        assert res.exit_code == 0, res.output
        payload = json.loads(res.stdout)
        assert len(payload["distances"]) == 60
        # sorted descending
        assert payload["distances"] == sorted(payload["distances"], reverse=True)

    def test_minimize(self, base_ws):
        invoke("--workspace", base_ws, "cluster", "--commit", "base", "--algo", "kmeans", "--k", 2)
        res = invoke("--workspace", base_ws, "minimize", "--commit", "base", "--model", "kmeans")
        assert res.exit_code == 0, res.output
        assert len(json.loads(res.stdout)["suite"]) == 2


class TestSampleDecide:
    def test_sample_and_escalate(self, base_ws):
        invoke("--workspace", base_ws, "cluster", "--commit", "base", "--algo", "kmeans", "--k", 2)
        res = invoke("--workspace", base_ws, "--seed", 1, "sample",
                     "--model", "kmeans", "--per-cluster", 2)
        assert res.exit_code == 0, res.output
        before = json.loads(res.stdout)["sampled"]
        assert all(len(v) == 2 for v in before.values())
        res = invoke("--workspace", base_ws, "--seed", 2, "sample",
                     "--model", "kmeans", "--escalate", 1)
        after = json.loads(res.stdout)["sampled"]
        for label, ids in after.items():
            assert len(ids) == 3
            assert set(before[label]) <= set(ids)

    def test_escalate_without_plan_exits_2(self, base_ws):
        invoke("--workspace", base_ws, "cluster", "--commit", "base", "--algo", "kmeans", "--k", 2)
        res = invoke("--workspace", base_ws, "sample", "--model", "kmeans", "--escalate", 1)
        assert res.exit_code == 2

    def test_decide_regression_exits_10(self, tmp_path):
        build_regression_workspace(tmp_path)
        res = invoke("--workspace", tmp_path, "decide", "--model", "kmeans",
                     "--baseline", "base", "--updated-commit", "update1")
        assert res.exit_code == EXIT_RUN
        payload = json.loads(res.stdout)
        assert payload["verdict"] == "RUN"
        assert payload["flagged_fraction"] == pytest.approx(5 / 6)
        assert (tmp_path / "reports" / "decision_base_update1.json").is_file()

    def test_decide_byte_stable(self, tmp_path):
        build_regression_workspace(tmp_path)
        args = ("--workspace", tmp_path, "decide", "--model", "kmeans",
                "--baseline", "base", "--updated-commit", "update1")
        assert invoke(*args).stdout == invoke(*args).stdout

    def test_recommend_matches_decide(self, tmp_path):
        ws, plan = build_regression_workspace(tmp_path, seed=2026)
        res = invoke("--workspace", tmp_path, "--seed", 2026, "recommend",
                     "--model", "kmeans", "--baseline", "base", "--updated-commit", "update1")
        assert res.exit_code == EXIT_RUN
        saved = json.loads((tmp_path / "reports" / "plan_recommend.json").read_text())
        assert saved["sampled"] == plan.to_dict()["sampled"]
        dec = invoke("--workspace", tmp_path, "decide", "--model", "kmeans",
                     "--baseline", "base", "--updated-commit", "update1")
        assert res.stdout == dec.stdout

    def test_decide_headroom_exits_0(self, tmp_path):
        ws, sample_seed = build_headroom_workspace(tmp_path)
        res = invoke("--workspace", tmp_path, "--seed", sample_seed, "sample",
                     "--model", "kmeans", "--per-cluster", 3)
        assert res.exit_code == 0, res.output
        res = invoke("--workspace", tmp_path, "decide", "--model", "kmeans",
                     "--baseline", "base", "--updated-commit", "update1")
        assert res.exit_code == 0, res.output
        payload = json.loads(res.stdout)
        assert payload["verdict"] == "SKIP"
        assert payload["flagged_fraction"] == 0.0

    def test_decide_without_plan_exits_2(self, tmp_path):
        build_regression_workspace(tmp_path)
        res = invoke("--workspace", tmp_path, "decide", "--model", "kmeans",
                     "--baseline", "base", "--updated-commit", "update1",
                     "--plan", "missing")
        assert res.exit_code == 2

    def test_decide_unknown_baseline_exits_3(self, tmp_path):
        build_regression_workspace(tmp_path)
        res = invoke("--workspace", tmp_path, "decide", "--model", "kmeans",
                     "--baseline", "nope", "--updated-commit", "update1")
        assert res.exit_code == EXIT_DATA_ERROR
        assert "UnknownCommit" in res.stderr

    def test_decide_table_format(self, tmp_path):
        build_regression_workspace(tmp_path)
        res = invoke("--workspace", tmp_path, "--format", "table", "decide",
                     "--model", "kmeans", "--baseline", "base", "--updated-commit", "update1")
        assert res.exit_code == EXIT_RUN
        assert res.stdout.splitlines()[0].startswith("Checks")
        assert "verdict: RUN" in res.stdout
