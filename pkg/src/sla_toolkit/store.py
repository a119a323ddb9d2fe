"""File-backed document collection for generated SLAs.

Layout under a store root:

- ``slas/<id>.json`` — canonical document bytes, named by their SHA-256;
- ``index.json`` — array of summaries (``id``, ``application_type``,
  ``created_at``, ``size_bytes``) sorted by (created_at, id);
- ``.lock`` — exclusive writer lock holding the writer pid and an
  ISO-8601 acquisition time.

The index is a cache: it is exactly reconstructible from ``slas/`` (see
:meth:`DocumentStore.rebuild_index`). ``created_at`` is the stored file's
mtime, so a rebuild reproduces the index bit-for-bit. Reads are lock-free
against the immutable content-addressed files; mutations serialize through
the lock, making the store safe for concurrent processes.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .composer import SlaDocument, parse, serialize_canonical
from .errors import CorruptDocument, DocumentNotFound, StoreIoError, StoreLocked

logger = logging.getLogger(__name__)

LOCK_TIMEOUT_SECONDS = 5.0
LOCK_STALE_SECONDS = 60.0
_LOCK_POLL_SECONDS = 0.02

_HEX_ID_LEN = 64


@dataclass(frozen=True, slots=True)
class StoredSlaSummary:
    """Index entry for one stored document."""

    id: str
    application_type: str
    created_at: str
    size_bytes: int

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "application_type": self.application_type,
            "created_at": self.created_at,
            "size_bytes": self.size_bytes,
        }


def _mtime_iso(path: Path) -> str:
    ts = datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc)
    return ts.strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class _StoreLock:
    """Exclusive lock file; stale locks are broken with a warning."""

    def __init__(self, path: Path, timeout: float, stale_after: float):
        self.path = path
        self.timeout = timeout
        self.stale_after = stale_after

    def __enter__(self) -> "_StoreLock":
        deadline = time.monotonic() + self.timeout
        while True:
            try:
                fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                self._break_if_stale()
                if time.monotonic() >= deadline:
                    raise StoreLocked(
                        f"could not acquire {self.path} within {self.timeout}s"
                    ) from None
                time.sleep(_LOCK_POLL_SECONDS)
                continue
            payload = {
                "pid": os.getpid(),
                "acquired_at": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ"),
            }
            os.write(fd, json.dumps(payload).encode("utf-8"))
            os.close(fd)
            return self

    def __exit__(self, *exc_info) -> None:
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass

    def _break_if_stale(self) -> None:
        try:
            age = time.time() - self.path.stat().st_mtime
        except FileNotFoundError:
            return
        if age > self.stale_after:
            logger.warning("breaking stale store lock %s (age %.0fs)", self.path, age)
            try:
                self.path.unlink()
            except FileNotFoundError:
                pass


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class DocumentStore:
    """Content-addressed SLA document collection rooted at a directory."""

    def __init__(
        self,
        root: str | Path,
        *,
        lock_timeout: float = LOCK_TIMEOUT_SECONDS,
        lock_stale_after: float = LOCK_STALE_SECONDS,
    ):
        self.root = Path(root)
        self.slas_dir = self.root / "slas"
        self.index_path = self.root / "index.json"
        self.lock_path = self.root / ".lock"
        self._lock_timeout = lock_timeout
        self._lock_stale_after = lock_stale_after

    def _lock(self) -> _StoreLock:
        return _StoreLock(self.lock_path, self._lock_timeout, self._lock_stale_after)

    def _doc_path(self, doc_id: str) -> Path:
        return self.slas_dir / f"{doc_id}.json"

    def put(self, doc: SlaDocument) -> str:
        """Persist the canonical bytes and update the index; returns the id.

        Idempotent: re-putting an identical document returns the same id
        and leaves a single copy.
        """
        data = serialize_canonical(doc)
        doc_id = hashlib.sha256(data).hexdigest()
        try:
            self.slas_dir.mkdir(parents=True, exist_ok=True)
            with self._lock():
                path = self._doc_path(doc_id)
                if not path.exists():
                    _atomic_write(path, data)
                summary = StoredSlaSummary(
                    id=doc_id,
                    application_type=doc.header.application_type,
                    created_at=_mtime_iso(path),
                    size_bytes=len(data),
                )
                entries = {s.id: s for s in self._read_index()}
                entries[doc_id] = summary
                self._write_index(list(entries.values()))
        except OSError as exc:
            raise StoreIoError(f"put failed: {exc}") from exc
        return doc_id

    def get_bytes(self, doc_id: str) -> bytes:
        """Stored canonical bytes, verified against the filename id."""
        path = self._doc_path(doc_id)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise DocumentNotFound(f"no stored document with id {doc_id!r}") from None
        except OSError as exc:
            raise StoreIoError(f"get failed: {exc}") from exc
        if hashlib.sha256(data).hexdigest() != doc_id:
            raise CorruptDocument(f"stored bytes for {doc_id} fail the hash check")
        return data

    def get(self, doc_id: str) -> SlaDocument:
        return parse(self.get_bytes(doc_id))

    def list(self) -> list[StoredSlaSummary]:
        """Summaries sorted by (created_at, id), exactly as indexed."""
        try:
            return sorted(self._read_index(), key=lambda s: (s.created_at, s.id))
        except OSError as exc:
            raise StoreIoError(f"list failed: {exc}") from exc

    def delete(self, doc_id: str) -> None:
        """Remove a document and its index entry."""
        try:
            with self._lock():
                path = self._doc_path(doc_id)
                if not path.exists():
                    raise DocumentNotFound(f"no stored document with id {doc_id!r}")
                path.unlink()
                self._write_index([s for s in self._read_index() if s.id != doc_id])
        except OSError as exc:
            raise StoreIoError(f"delete failed: {exc}") from exc

    def rebuild_index(self) -> list[StoredSlaSummary]:
        """Recompute summaries by rescanning ``slas/`` (does not write).

        A healthy store satisfies ``rebuild_index() == list()``.
        """
        summaries = []
        if self.slas_dir.is_dir():
            for path in sorted(self.slas_dir.glob("*.json")):
                doc_id = path.stem
                if len(doc_id) != _HEX_ID_LEN:
                    continue
                doc = parse(path.read_bytes())
                summaries.append(
                    StoredSlaSummary(
                        id=doc_id,
                        application_type=doc.header.application_type,
                        created_at=_mtime_iso(path),
                        size_bytes=path.stat().st_size,
                    )
                )
        return sorted(summaries, key=lambda s: (s.created_at, s.id))

    def _read_index(self) -> list[StoredSlaSummary]:
        try:
            raw = json.loads(self.index_path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return []
        try:
            return [
                StoredSlaSummary(
                    id=entry["id"],
                    application_type=entry["application_type"],
                    created_at=entry["created_at"],
                    size_bytes=entry["size_bytes"],
                )
                for entry in raw
            ]
        except (KeyError, TypeError) as exc:
            raise StoreIoError(f"index is corrupted: {exc}") from exc

    def _write_index(self, summaries: list[StoredSlaSummary]) -> None:
        ordered = sorted(summaries, key=lambda s: (s.created_at, s.id))
        data = json.dumps([s.to_json_dict() for s in ordered], ensure_ascii=False).encode("utf-8")
        _atomic_write(self.index_path, data)
