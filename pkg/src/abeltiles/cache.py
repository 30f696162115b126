"""Append-only JSON-lines result cache so long sweeps resume instead of recompute.

Records are keyed by a content hash of (command, canonical parameters, tool
version); a version bump therefore misses.  Corrupt lines are skipped with a
warning, never trusted.
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from dataclasses import dataclass

from . import __version__

ENV_CACHE_DIR = "ABELTILES_CACHE_DIR"


def default_cache_dir() -> str:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "abeltiles")


def content_hash(command: str, params: dict, version: str | None = None) -> str:
    if version is None:
        version = __version__
    blob = json.dumps(
        {"command": command, "params": params, "version": version},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class RunRecord:
    command: str
    group: str | None
    params: dict
    result: dict
    budget: dict | None
    version: str
    hash: str

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "group": self.group,
            "params": self.params,
            "result": self.result,
            "budget": self.budget,
            "version": self.version,
            "hash": self.hash,
        }


class ResultCache:
    """One JSON-lines file of RunRecords, hash-addressed."""

    def __init__(self, directory: str | None = None):
        self.directory = directory or default_cache_dir()
        self.path = os.path.join(self.directory, "results.jsonl")

    def lookup(self, key: str) -> dict | None:
        if not os.path.exists(self.path):
            return None
        hit = None
        with open(self.path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    warnings.warn(f"skipping corrupt cache line {lineno} in {self.path}")
                    continue
                if isinstance(rec, dict) and rec.get("hash") == key:
                    hit = rec  # keep scanning: append-only, last write wins
        return hit

    def store(self, record: RunRecord) -> None:
        self.store_dict(record.to_dict())

    def store_dict(self, record: dict) -> None:
        os.makedirs(self.directory, exist_ok=True)
        line = json.dumps(record, sort_keys=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            try:
                import fcntl

                fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
            except ImportError:
                pass
            fh.write(line + "\n")
            fh.flush()
