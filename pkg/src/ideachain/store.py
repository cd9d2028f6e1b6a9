"""Durable run artifacts.

One directory per run under the store root, holding the manifest and the
chain/idea/plan documents it references. All writes are atomic
(temp-then-rename) and every document carries kind and schema_version so a
reader fails loudly on drift instead of silently migrating.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from pathlib import Path

from .errors import ArtifactNotFoundError, SchemaVersionError, StorageError, ValidationError

SCHEMA_VERSIONS = {
    "chain": 1,
    "idea": 1,
    "plan": 1,
    "manifest": 1,
    "baseline": 1,
}

MANIFEST_SCHEMA_VERSION = SCHEMA_VERSIONS["manifest"]


def _atomic_write(path: Path, payload: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


class RunStore:
    """Artifact storage rooted at one directory."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def create_run(self, run_id: str) -> Path:
        if not run_id or "/" in run_id:
            raise ValidationError(f"bad run id {run_id!r}")
        run_dir = self.root / run_id
        if run_dir.exists():
            raise StorageError(f"run id {run_id!r} already exists")
        run_dir.mkdir(parents=True)
        return run_dir

    def persist(self, document: dict, kind: str, run_id: str, name: str) -> str:
        """Write one artifact document; returns a store-relative reference."""
        if kind not in SCHEMA_VERSIONS:
            raise ValidationError(f"unknown artifact kind {kind!r}")
        if document.get("kind") != kind:
            raise ValidationError(
                f"document kind {document.get('kind')!r} does not match {kind!r}"
            )
        if document.get("schema_version") != SCHEMA_VERSIONS[kind]:
            raise ValidationError(
                f"document schema_version {document.get('schema_version')!r} does not "
                f"match current {SCHEMA_VERSIONS[kind]} for kind {kind!r}"
            )
        reference = f"{run_id}/{name}.json"
        path = self.root / reference
        if path.exists():
            raise StorageError(f"artifact {reference!r} already exists")
        _atomic_write(path, json.dumps(document, ensure_ascii=False, indent=2))
        return reference

    def load(self, reference: str) -> dict:
        """Exact round-trip of a persisted document."""
        path = self.root / reference
        if not path.exists():
            raise ArtifactNotFoundError(f"no artifact at {reference!r}")
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise StorageError(f"artifact {reference!r} is not valid JSON: {exc}") from exc
        kind = document.get("kind")
        if kind not in SCHEMA_VERSIONS:
            raise StorageError(f"artifact {reference!r} has unknown kind {kind!r}")
        found = document.get("schema_version")
        if found != SCHEMA_VERSIONS[kind]:
            raise SchemaVersionError(kind, found, SCHEMA_VERSIONS[kind])
        return document

    def write_manifest(self, run_id: str, manifest: dict) -> str:
        manifest = dict(manifest)
        manifest.setdefault("schema_version", MANIFEST_SCHEMA_VERSION)
        manifest.setdefault("kind", "manifest")
        for reference in manifest.get("artifacts", {}).values():
            if not (self.root / reference).exists():
                raise StorageError(f"manifest references missing artifact {reference!r}")
        return self.persist(manifest, "manifest", run_id, "manifest")


def build_manifest(
    run_id: str,
    topic: str,
    config_snapshot: dict,
    artifacts: dict[str, str],
    cost_summary: dict,
    *,
    seed: int = 0,
    pipeline_version: str = "0.1.0",
    created_at: float | None = None,
) -> dict:
    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "kind": "manifest",
        "run_id": run_id,
        "topic": topic,
        "config": config_snapshot,
        "seed": seed,
        "artifacts": dict(artifacts),
        "cost": cost_summary,
        "pipeline_version": pipeline_version,
        "created_at": time.time() if created_at is None else created_at,
    }
