"""Content-addressed response cache: one immutable JSON document per entry,
keyed by (endpoint, canonicalized params). Writes go through a temp file and
an atomic rename so readers never observe a torn entry."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any


def cache_key(endpoint: str, params: dict[str, Any]) -> str:
    canonical = json.dumps(
        {"endpoint": endpoint, "params": params}, sort_keys=True, ensure_ascii=False
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ResponseCache:
    def __init__(self, directory: str | Path | None) -> None:
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    @property
    def enabled(self) -> bool:
        return self.directory is not None

    def get(self, endpoint: str, params: dict[str, Any]) -> Any | None:
        if self.directory is None:
            return None
        path = self.directory / f"{cache_key(endpoint, params)}.json"
        if not path.exists():
            self.misses += 1
            return None
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            self.misses += 1
            return None
        self.hits += 1
        return payload["response"]

    def put(self, endpoint: str, params: dict[str, Any], response: Any) -> None:
        if self.directory is None:
            return
        path = self.directory / f"{cache_key(endpoint, params)}.json"
        if path.exists():  # entries are immutable
            return
        payload = json.dumps(
            {"endpoint": endpoint, "params": params, "response": response},
            ensure_ascii=False,
        )
        fd, tmp_name = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
