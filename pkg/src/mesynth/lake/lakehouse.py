"""File-backed, snapshot-versioned lakehouse.

Layout::

    <root>/<table>/data-<snapshot>.rows          immutable data files
    <root>/<table>/snapshots/<snapshot>.manifest  one manifest per snapshot

A data file is line-delimited JSON whose first line is a schema header. A
manifest is cumulative: it lists every data file visible in that snapshot, so
reading a snapshot never needs its parents. A snapshot becomes visible only
when its manifest is renamed into place, which makes the commit atomic.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

FORMAT_VERSION = 1
DEFAULT_RETAIN = 10
SEQ_FIELD = "_seq"  # changelog sequence carried on mutable-table images
DELETED_FIELD = "_deleted"
META_FIELDS = (SEQ_FIELD, DELETED_FIELD)


class LakeError(Exception):
    pass


class LakeWriteFailure(LakeError):
    pass


class LakeLocked(LakeError):
    pass


@dataclass(frozen=True)
class DataFile:
    name: str
    rows: int
    max_created_on: Optional[str]
    max_seq: Optional[int] = None


@dataclass(frozen=True)
class Manifest:
    table: str
    snapshot_id: int
    parent_id: Optional[int]
    files: tuple[DataFile, ...]
    max_created_on: Optional[str]
    max_seq: Optional[int]
    sync_cycle: Optional[int] = None

    @property
    def row_count(self) -> int:
        return sum(f.rows for f in self.files)

    def to_json(self) -> str:
        doc = {
            "format_version": FORMAT_VERSION,
            "table": self.table,
            "snapshot_id": self.snapshot_id,
            "parent_id": self.parent_id,
            "row_count": self.row_count,
            "max_created_on": self.max_created_on,
            "max_seq": self.max_seq,
            "sync_cycle": self.sync_cycle,
            "files": [{"name": f.name, "rows": f.rows, "max_created_on": f.max_created_on, "max_seq": f.max_seq}
                      for f in self.files],
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        d = json.loads(text)
        files = tuple(DataFile(f["name"], f["rows"], f["max_created_on"], f.get("max_seq")) for f in d["files"])
        return cls(d["table"], d["snapshot_id"], d["parent_id"], files, d["max_created_on"], d["max_seq"],
                   d.get("sync_cycle"))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


@dataclass
class Lakehouse:
    root: Path
    retain: int = DEFAULT_RETAIN
    _manifest_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        self.root.mkdir(parents=True, exist_ok=True)

    # ---- layout -------------------------------------------------------------------------------
    def table_dir(self, table: str) -> Path:
        return self.root / table

    def _snap_dir(self, table: str) -> Path:
        return self.table_dir(table) / "snapshots"

    def tables(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if p.is_dir() and (p / "snapshots").is_dir())

    def snapshot_ids(self, table: str) -> list[int]:
        d = self._snap_dir(table)
        if not d.is_dir():
            return []
        return sorted(int(p.stem) for p in d.glob("*.manifest"))

    def manifest(self, table: str, snapshot_id: int) -> Manifest:
        key = (table, snapshot_id)
        m = self._manifest_cache.get(key)
        if m is None:
            path = self._snap_dir(table) / f"{snapshot_id:08d}.manifest"
            if not path.exists():
                raise LakeError(f"{table}: snapshot {snapshot_id} does not exist or has expired")
            m = self._manifest_cache[key] = Manifest.from_json(path.read_text(encoding="utf-8"))
        return m

    def latest(self, table: str) -> Optional[Manifest]:
        ids = self.snapshot_ids(table)
        return self.manifest(table, ids[-1]) if ids else None

    # ---- writes -------------------------------------------------------------------------------
    def write_data_file(self, table: str, snapshot_id: int, rows: list[dict], columns: Iterable[str]) -> DataFile:
        """Stage a data file. It is invisible until a manifest referencing it commits."""
        d = self.table_dir(table)
        self._snap_dir(table).mkdir(parents=True, exist_ok=True)
        name = f"data-{snapshot_id:08d}.rows"
        header = {"format_version": FORMAT_VERSION, "table": table, "columns": list(columns), "rows": len(rows)}
        lines = [json.dumps(header, separators=(",", ":"))]
        lines += [json.dumps(r, separators=(",", ":"), ensure_ascii=False) for r in rows]
        _atomic_write(d / name, "\n".join(lines) + "\n")
        created = [r["created_on"] for r in rows if r.get("created_on")]
        seqs = [r[SEQ_FIELD] for r in rows if SEQ_FIELD in r]
        return DataFile(name, len(rows), max(created) if created else None, max(seqs) if seqs else None)

    def commit_snapshot(self, table: str, new_file: DataFile, sync_cycle: int | None = None) -> Manifest:
        parent = self.latest(table)
        files = (parent.files if parent else ()) + (new_file,)
        created = [f.max_created_on for f in files if f.max_created_on]
        seqs = [f.max_seq for f in files if f.max_seq is not None]
        m = Manifest(table, self.next_snapshot_id(table), parent.snapshot_id if parent else None, files,
                     max(created) if created else None, max(seqs) if seqs else None, sync_cycle)
        _atomic_write(self._snap_dir(table) / f"{m.snapshot_id:08d}.manifest", m.to_json())
        self._manifest_cache[(table, m.snapshot_id)] = m
        return m

    def next_snapshot_id(self, table: str) -> int:
        ids = self.snapshot_ids(table)
        return ids[-1] + 1 if ids else 1

    def expire_snapshots(self, table: str, retain: int | None = None) -> int:
        """Drop the oldest manifests beyond ``retain``; delete data files no retained manifest references."""
        keep = self.retain if retain is None else retain
        ids = self.snapshot_ids(table)
        doomed = ids[:-keep] if keep > 0 else ids
        if not doomed:
            return 0
        live = {f.name for sid in ids[len(doomed):] for f in self.manifest(table, sid).files}
        for sid in doomed:
            (self._snap_dir(table) / f"{sid:08d}.manifest").unlink()
            self._manifest_cache.pop((table, sid), None)
        for p in self.table_dir(table).glob("data-*.rows"):
            if p.name not in live:
                p.unlink()
        return len(doomed)

    # ---- reads --------------------------------------------------------------------------------
    def _read_file(self, table: str, name: str) -> list[dict]:
        with open(self.table_dir(table) / name, encoding="utf-8") as fh:
            next(fh)  # schema header
            return [json.loads(line) for line in fh if line.strip()]

    def read_snapshot(self, table: str, snapshot_id: int | None = None) -> list[dict]:
        """Every appended record visible in a snapshot (latest by default), in append order."""
        m = self.latest(table) if snapshot_id is None else self.manifest(table, snapshot_id)
        if m is None:
            return []
        out: list[dict] = []
        for f in m.files:
            out.extend(self._read_file(table, f.name))
        return out

    def current_view(self, table: str, key: str = "nid", snapshot_id: int | None = None) -> dict[str, dict]:
        """Latest image per primary key, metadata stripped; tombstoned keys are absent."""
        view: dict[str, dict] = {}
        for rec in self.read_snapshot(table, snapshot_id):
            k = rec[key]
            if rec.get(DELETED_FIELD):
                view.pop(k, None)
                continue
            view[k] = {c: v for c, v in rec.items() if c not in META_FIELDS}
        return view


class SyncLock:
    """Exclusive lock file; one sync process per lake."""

    NAME = ".sync.lock"

    def __init__(self, lake: Lakehouse):
        self.path = lake.root / self.NAME
        self._fd: int | None = None

    def __enter__(self) -> "SyncLock":
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise LakeLocked(f"another sync holds {self.path}") from None
        os.write(self._fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
            try:
                self.path.unlink()
            except FileNotFoundError:
                pass
