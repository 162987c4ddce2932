"""Workspace: a directory holding snapshots, cluster models and reports.

Layout:
    <root>/snapshots/<commit_id>.json   profile rows (ingest format)
    <root>/models/<name>.json           serialized ClusterModel
    <root>/reports/<name>.json          correlation / elbow / decision reports
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import UnknownCommit, UnknownModel
from .profiles import CommitSnapshot, ingest, save_snapshot_json


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    def init_dirs(self) -> None:
        for sub in ("snapshots", "models", "reports"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    @property
    def snapshots_dir(self) -> Path:
        return self.root / "snapshots"

    @property
    def models_dir(self) -> Path:
        return self.root / "models"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    def snapshot_path(self, commit_id: str) -> Path:
        return self.snapshots_dir / f"{commit_id}.json"

    def list_commits(self) -> list[str]:
        if not self.snapshots_dir.is_dir():
            return []
        return sorted(p.stem for p in self.snapshots_dir.glob("*.json"))

    def has_snapshot(self, commit_id: str) -> bool:
        return self.snapshot_path(commit_id).is_file()

    def save_snapshot(self, snapshot: CommitSnapshot) -> Path:
        self.init_dirs()
        path = self.snapshot_path(snapshot.commit_id)
        save_snapshot_json(snapshot, path)
        return path

    def load_snapshot(self, commit_id: str) -> CommitSnapshot:
        path = self.snapshot_path(commit_id)
        if not path.is_file():
            raise UnknownCommit(commit_id)
        return ingest(path, "json", commit_id)

    def model_path(self, name: str) -> Path:
        return self.models_dir / f"{name}.json"

    def list_models(self) -> list[str]:
        if not self.models_dir.is_dir():
            return []
        return sorted(p.stem for p in self.models_dir.glob("*.json"))

    def save_model_dict(self, name: str, payload: dict) -> Path:
        self.init_dirs()
        path = self.model_path(name)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    def load_model_dict(self, name: str) -> dict:
        path = self.model_path(name)
        if not path.is_file():
            raise UnknownModel(name)
        return json.loads(path.read_text(encoding="utf-8"))

    def save_report(self, name: str, payload: dict) -> Path:
        self.init_dirs()
        path = self.reports_dir / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path
