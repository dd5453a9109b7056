"""The file field: a flat, deduplicated list of stored files.

Every distinct content gets one :class:`FileEntry` with a numeric id that is
never reused. Content lives in a blob tree under the catalog root::

    blobs/<first two hex chars>/<sha256 hex digest>

The field never stores content inline and never stores the same digest twice.
"""

from __future__ import annotations

import hashlib
import os
import stat
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorruptionError, NotFoundError
from .names import check_ingest_name

FileId = int

BLOB_DIR = "blobs"


def digest_bytes(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def blob_ref_for(digest: str) -> str:
    return f"{BLOB_DIR}/{digest[:2]}/{digest}"


@dataclass(frozen=True)
class FileEntry:
    id: FileId
    digest: str
    size: int
    ingest_name: str
    blob_ref: str


@dataclass(frozen=True)
class FieldProblem:
    """One row of a :meth:`FileField.verify` report."""

    id: FileId
    kind: str  # "missing" or "mismatch"
    expected: str
    actual: str | None = None


@dataclass
class FileField:
    root: Path
    next_id: FileId = 1
    entries: dict[FileId, FileEntry] = field(default_factory=dict)
    digest_index: dict[str, FileId] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.root = Path(self.root)

    def blob_path(self, entry: FileEntry) -> Path:
        return self.root / entry.blob_ref

    def add_file(self, content: bytes, ingest_name: str) -> tuple[FileId, bool]:
        """Store *content* unless an identical digest is already present.

        Returns ``(id, was_duplicate)``. A duplicate keeps the original
        ingest name and writes nothing.
        """
        check_ingest_name(ingest_name)
        content = bytes(content)
        digest = digest_bytes(content)
        existing = self.digest_index.get(digest)
        if existing is not None:
            return existing, True

        ref = blob_ref_for(digest)
        self._write_blob(self.root / ref, content)
        entry = FileEntry(
            id=self.next_id,
            digest=digest,
            size=len(content),
            ingest_name=ingest_name,
            blob_ref=ref,
        )
        self.entries[entry.id] = entry
        self.digest_index[digest] = entry.id
        self.next_id += 1
        return entry.id, False

    @staticmethod
    def _write_blob(path: Path, content: bytes) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(content)
                fh.flush()
                os.fsync(fh.fileno())
            # Blobs may be hard-linked out on export; keep them read-only.
            os.chmod(tmp, stat.S_IRUSR | stat.S_IRGRP | stat.S_IROTH)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise

    def get_file(self, file_id: FileId) -> FileEntry:
        try:
            return self.entries[file_id]
        except KeyError:
            raise NotFoundError(f"no file with id {file_id}") from None

    def __contains__(self, file_id: object) -> bool:
        return file_id in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def read_content(self, file_id: FileId) -> bytes:
        entry = self.get_file(file_id)
        try:
            return self.blob_path(entry).read_bytes()
        except FileNotFoundError:
            raise CorruptionError(
                f"blob for file {file_id} is missing: {entry.blob_ref}"
            ) from None

    def remove_file(self, file_id: FileId) -> None:
        """Drop the entry and its blob. Section checks are the caller's job."""
        entry = self.get_file(file_id)
        try:
            self.blob_path(entry).unlink()
        except FileNotFoundError:
            pass
        del self.entries[file_id]
        del self.digest_index[entry.digest]

    def list_files(self) -> list[FileEntry]:
        return [self.entries[i] for i in sorted(self.entries)]

    def verify(self) -> list[FieldProblem]:
        problems = []
        for entry in self.list_files():
            path = self.blob_path(entry)
            try:
                actual = hashlib.sha256(path.read_bytes()).hexdigest()
            except FileNotFoundError:
                problems.append(FieldProblem(entry.id, "missing", entry.digest))
                continue
            if actual != entry.digest:
                problems.append(FieldProblem(entry.id, "mismatch", entry.digest, actual))
        return problems
