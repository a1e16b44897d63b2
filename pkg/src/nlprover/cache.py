"""Persistent on-disk cache for provider responses.

Keys are sha256 over (provider kind, canonical request bytes), so
semantically equal requests hit regardless of field order; values are the
raw response bytes, substituting a live call bit-exactly. Writes are
atomic via rename; last writer wins, which is safe because values are
deterministic functions of keys within a provider session.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import CacheIOError


def canonical_request_bytes(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )


def cache_key(kind: str, request_bytes: bytes) -> str:
    digest = hashlib.sha256()
    digest.update(kind.encode("utf-8"))
    digest.update(b"\n")
    digest.update(request_bytes)
    return digest.hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    key: str
    value: bytes
    created_at: float


class ProviderCache:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CacheIOError(str(exc), path=str(self.directory)) from exc

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.bin"

    def get(self, kind: str, request_bytes: bytes) -> bytes | None:
        return self.get_by_key(cache_key(kind, request_bytes))

    def get_by_key(self, key: str) -> bytes | None:
        path = self._path(key)
        try:
            return path.read_bytes()
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise CacheIOError(str(exc), path=str(path)) from exc

    def put(self, kind: str, request_bytes: bytes, value: bytes) -> str:
        key = cache_key(kind, request_bytes)
        self.put_by_key(key, value)
        return key

    def put_by_key(self, key: str, value: bytes) -> None:
        path = self._path(key)
        tmp = path.with_suffix(f".tmp.{os.getpid()}")
        try:
            tmp.write_bytes(value)
            os.replace(tmp, path)
        except OSError as exc:
            raise CacheIOError(str(exc), path=str(path)) from exc

    def entry(self, key: str) -> CacheEntry | None:
        path = self._path(key)
        value = self.get_by_key(key)
        if value is None:
            return None
        try:
            created = path.stat().st_mtime
        except OSError:
            created = time.time()
        return CacheEntry(key=key, value=value, created_at=created)
