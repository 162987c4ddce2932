import json

import numpy as np
import pytest

from conftest import two_blob_spec
from oracles import spreadsheet_pearson
from perfgate.errors import (
    DuplicateInput,
    EmptyDataset,
    InvalidSpec,
    MalformedRow,
    UnknownInput,
)
from perfgate.profiles import (
    BlobSpec,
    CommitSnapshot,
    ProfileRecord,
    SyntheticSpec,
    aggregate_by_input,
    apply_slowdown,
    generate_synthetic,
    ingest,
    save_snapshot_csv,
    save_snapshot_json,
)

HEADER = "input_id,input_size,exec_time_ms,memory_kb,iterations,statements,function_calls,conditionals"


def write_csv(tmp_path, rows, header=HEADER):
    path = tmp_path / "profile.csv"
    path.write_text("\n".join([header] + rows) + "\n")
    return path


def test_ingest_csv_three_rows(tmp_path):
    path = write_csv(tmp_path, [
        "A,100,10.5,512,20,1000,50,25",
        "B,200,21.0,600,40,2000,100,50",
        "C,300,30.0,700,60,3000,150,75",
    ])
    snap = ingest(path, "csv", "c1")
    assert len(snap.records) == 3
    assert snap.records[0] == ProfileRecord("A", 100, 10.5, 512.0, 20, 1000, 50, 25)


def test_ingest_rejects_zero_exec_time(tmp_path):
    path = write_csv(tmp_path, ["A,100,0,512,20,1000,50,25"])
    with pytest.raises(MalformedRow) as exc:
        ingest(path, "csv", "c1")
    assert exc.value.line == 2


def test_ingest_rejects_duplicate_input(tmp_path):
    path = write_csv(tmp_path, [
        "A,100,10.5,512,20,1000,50,25",
        "A,200,21.0,600,40,2000,100,50",
    ])
    with pytest.raises(DuplicateInput) as exc:
        ingest(path, "csv", "c1")
    assert exc.value.input_id == "A"


def test_ingest_allows_same_input_across_test_cases(tmp_path):
    path = write_csv(
        tmp_path,
        ["A,100,10.5,512,20,1000,50,25,t1", "A,100,5.0,400,10,500,25,12,t2"],
        header=HEADER + ",test_case",
    )
    snap = ingest(path, "csv", "c1")
    assert len(snap.records) == 2
    assert {r.test_case for r in snap.records} == {"t1", "t2"}


def test_ingest_empty_raises(tmp_path):
    path = write_csv(tmp_path, [])
    with pytest.raises(EmptyDataset):
        ingest(path, "csv", "c1")


def test_ingest_json(tmp_path):
    path = tmp_path / "profile.json"
    path.write_text(json.dumps([
        {"input_id": "A", "input_size": 100, "exec_time_ms": 10.5, "memory_kb": 512,
         "iterations": 20, "statements": 1000, "function_calls": 50, "conditionals": 25},
    ]))
    snap = ingest(path, "json", "c1")
    assert snap.records[0].exec_time == 10.5


def test_ingest_json_malformed_row(tmp_path):
    path = tmp_path / "profile.json"
    path.write_text(json.dumps([{"input_id": "A"}]))
    with pytest.raises(MalformedRow):
        ingest(path, "json", "c1")


def test_json_round_trip(tmp_path, two_blob_snapshot):
    path = tmp_path / "snap.json"
    save_snapshot_json(two_blob_snapshot, path)
    again = ingest(path, "json", two_blob_snapshot.commit_id)
    assert again.records == two_blob_snapshot.records
    # saving the reloaded snapshot is byte-identical
    path2 = tmp_path / "snap2.json"
    save_snapshot_json(again, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_csv_round_trip(tmp_path, two_blob_snapshot):
    path = tmp_path / "snap.csv"
    save_snapshot_csv(two_blob_snapshot, path)
    again = ingest(path, "csv", two_blob_snapshot.commit_id)
    assert again.records == two_blob_snapshot.records


def test_synthetic_deterministic():
    spec = SyntheticSpec(blobs=(BlobSpec(count=50), BlobSpec(count=50)))
    a = generate_synthetic(spec, seed=7)
    b = generate_synthetic(spec, seed=7)
    assert len(a.records) == 100
    assert a.records == b.records
    c = generate_synthetic(spec, seed=8)
    assert a.records != c.records


def test_synthetic_invalid_specs():
    with pytest.raises(InvalidSpec):
        generate_synthetic(SyntheticSpec(blobs=()), seed=1)
    with pytest.raises(InvalidSpec):
        generate_synthetic(SyntheticSpec(blobs=(BlobSpec(count=0),)), seed=1)
    with pytest.raises(InvalidSpec):
        generate_synthetic(
            SyntheticSpec(blobs=(BlobSpec(count=5, statements=(100.0, -1.0)),)), seed=1
        )


def test_synthetic_invariants():
    snap = generate_synthetic(two_blob_spec(), seed=3)
    for r in snap.records:
        assert r.exec_time > 0
        assert r.memory >= 0
        for f in ("input_size", "iterations", "statements", "function_calls", "conditionals"):
            assert getattr(r, f) >= 0


def test_synthetic_time_tracks_statements():
    # tight noise: r(time, statements) must be ~1
    spec = SyntheticSpec(
        blobs=(BlobSpec(count=200, statements=(5000.0, 500.0)),),
        time_coef=0.1,
        time_noise=0.01,
    )
    snap = generate_synthetic(spec, seed=11)
    stmts = [r.statements for r in snap.records]
    times = [r.exec_time for r in snap.records]
    from perfgate.stats import pearson_r

    r = pearson_r(np.array(stmts, float), np.array(times))
    assert r >= 0.99
    # spreadsheet-style cross-check on the first 10 points
    manual = spreadsheet_pearson(stmts[:10], times[:10])
    lib = pearson_r(np.array(stmts[:10], float), np.array(times[:10]))
    assert abs(manual - lib) < 1e-9


def test_apply_slowdown_identity():
    snap = generate_synthetic(two_blob_spec(count=10), seed=1)
    same = apply_slowdown(snap, {snap.records[0].input_id}, 0.0)
    assert same.records == snap.records


def test_apply_slowdown_arithmetic():
    rec = ProfileRecord("A", 100, 100.0, 512.0, 20, 1000, 50, 25)
    snap = CommitSnapshot("c1", (rec,))
    out = apply_slowdown(snap, {"A"}, 0.38)
    assert out.records[0].exec_time == pytest.approx(138.0)


def test_apply_slowdown_locality():
    snap = generate_synthetic(two_blob_spec(count=10), seed=1)
    target = snap.records[3].input_id
    out = apply_slowdown(snap, {target}, 0.99)
    for before, after in zip(snap.records, out.records):
        if before.input_id == target:
            assert after.exec_time == pytest.approx(before.exec_time * 1.99, rel=1e-5)
            assert after.statements == before.statements
        else:
            assert after == before


def test_apply_slowdown_unknown_input():
    snap = generate_synthetic(two_blob_spec(count=5), seed=1)
    with pytest.raises(UnknownInput):
        apply_slowdown(snap, {"nope"}, 0.5)


def test_aggregate_by_input():
    rows = (
        ProfileRecord("A", 100, 10.0, 500.0, 5, 100, 10, 4, test_case="t1"),
        ProfileRecord("A", 100, 4.0, 700.0, 3, 50, 5, 2, test_case="t2"),
        ProfileRecord("B", 200, 8.0, 300.0, 2, 80, 8, 3, test_case="t1"),
    )
    agg = aggregate_by_input(CommitSnapshot("c1", rows))
    assert len(agg.records) == 2
    a = agg.find("A")
    assert a.exec_time == pytest.approx(14.0)
    assert a.memory == pytest.approx(700.0)
    assert a.statements == 150
    assert a.test_case is None
