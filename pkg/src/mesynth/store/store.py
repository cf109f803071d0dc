"""Embedded operational store.

In-memory tables keyed by primary key, with batch-atomic commits, foreign-key
and required-field enforcement, CreatedOn/ModifiedOn stamping, a
trigger-style changelog for the mutable CDC tables, and a journal of every
write that doubles as the canonical event stream.
"""

from __future__ import annotations

import bisect
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .catalog import TableCatalog, TableClass, define_schema


class StoreError(Exception):
    pass


class ForeignKeyViolation(StoreError):
    pass


class DuplicateKey(StoreError):
    pass


class NotFound(StoreError):
    pass


class ImmutableTable(StoreError):
    pass


class RequiredFieldMissing(StoreError):
    pass


class UnknownColumn(StoreError):
    pass


@dataclass(frozen=True)
class ChangeRecord:
    seq: int
    table: str
    op: str  # INSERT | UPDATE | DELETE
    old_row: Optional[dict]
    new_row: Optional[dict]
    committed_at: str

    def to_dict(self) -> dict:
        return {"seq": self.seq, "table": self.table, "op": self.op, "old_row": self.old_row,
                "new_row": self.new_row, "committed_at": self.committed_at}


@dataclass(frozen=True)
class CommitReceipt:
    commit_id: int
    committed_at: str
    inserted: int
    updated: int
    deleted: int
    change_records: int


@dataclass
class Batch:
    """Writes accumulated for one commit, applied in order."""

    ops: list[tuple] = field(default_factory=list)

    def insert(self, table: str, values: dict) -> None:
        self.ops.append(("INSERT", table, values))

    def update(self, table: str, key: str, values: dict) -> None:
        self.ops.append(("UPDATE", table, key, values))

    def delete(self, table: str, key: str) -> None:
        self.ops.append(("DELETE", table, key))

    def __len__(self) -> int:
        return len(self.ops)

    def __bool__(self) -> bool:
        return bool(self.ops)


class Store:
    def __init__(self, catalog: TableCatalog | None = None, *, keep_journal: bool = True):
        self.catalog = catalog or define_schema()
        self._tables: dict[str, dict[str, dict]] = {name: {} for name in self.catalog}
        # append-only tables: parallel insertion-ordered key / created_on lists for watermark scans
        self._order: dict[str, tuple[list[str], list[str]]] = {
            name: ([], []) for name in self.catalog.by_class(TableClass.APPEND_ONLY)}
        self._changelog: list[ChangeRecord] = []
        self._journal: list[str] | None = [] if keep_journal else None
        self._commit_id = 0
        self._lock = threading.RLock()
        self._mutable = frozenset(self.catalog.by_class(TableClass.MUTABLE))

    # ---- writes -------------------------------------------------------------------------------
    def commit(self, batch: Batch | Iterable[tuple], at: str) -> CommitReceipt:
        ops = batch.ops if isinstance(batch, Batch) else list(batch)
        with self._lock:
            undo: list[tuple] = []
            pending_changes: list[tuple] = []
            pending_journal: list[tuple] = []
            counts = {"INSERT": 0, "UPDATE": 0, "DELETE": 0}
            try:
                for op in ops:
                    kind = op[0]
                    if kind == "INSERT":
                        self._apply_insert(op[1], op[2], at, undo, pending_changes, pending_journal)
                    elif kind == "UPDATE":
                        self._apply_update(op[1], op[2], op[3], at, undo, pending_changes, pending_journal)
                    elif kind == "DELETE":
                        self._apply_delete(op[1], op[2], undo, pending_changes, pending_journal)
                    else:
                        raise StoreError(f"unknown batch op {kind!r}")
                    counts[kind] += 1
            except Exception:
                self._rollback(undo)
                raise
            seq = len(self._changelog)
            for table, kind, old, new in pending_changes:
                seq += 1
                self._changelog.append(ChangeRecord(seq, table, kind, old, new, at))
            if self._journal is not None:
                for table, kind, key, row in pending_journal:
                    self._journal.append(json.dumps(
                        {"n": len(self._journal) + 1, "at": at, "op": kind, "table": table, "key": key, "row": row},
                        separators=(",", ":"), ensure_ascii=False))
            self._commit_id += 1
            return CommitReceipt(self._commit_id, at, counts["INSERT"], counts["UPDATE"], counts["DELETE"],
                                 len(pending_changes))

    def insert_batch(self, rows: Iterable[tuple[str, dict]], at: str) -> CommitReceipt:
        return self.commit([("INSERT", table, values) for table, values in rows], at)

    def update_row(self, table: str, key: str, new_values: dict, at: str) -> ChangeRecord:
        self.commit([("UPDATE", table, key, new_values)], at)
        return self._changelog[-1]

    def delete_row(self, table: str, key: str, at: str) -> ChangeRecord:
        self.commit([("DELETE", table, key)], at)
        return self._changelog[-1]

    def _apply_insert(self, table, values, at, undo, changes, journal) -> None:
        tdef = self._tdef(table)
        cols = tdef.column_names
        unknown = set(values) - set(cols)
        if unknown:
            raise UnknownColumn(f"{table}: unknown columns {sorted(unknown)}")
        for name in tdef.required:
            if values.get(name) is None:
                raise RequiredFieldMissing(f"{table}: required field {name!r} is null")
        rows = self._tables[table]
        key = values[tdef.primary_key]
        if key in rows:
            raise DuplicateKey(f"{table}: duplicate key {key!r}")
        for col, ref in tdef.foreign_keys.items():
            v = values.get(col)
            if v is not None and v not in self._tables[ref]:
                raise ForeignKeyViolation(f"{table}.{col}={v!r} does not resolve in {ref}")
        row = {c: values.get(c) for c in cols}
        row["created_on"] = at
        row["modified_on"] = at
        rows[key] = row
        undo.append(("INSERT", table, key))
        order = self._order.get(table)
        if order is not None:
            order[0].append(key)
            order[1].append(at)
        if table in self._mutable:
            changes.append((table, "INSERT", None, dict(row)))
        journal.append((table, "INSERT", key, dict(row)))

    def _apply_update(self, table, key, values, at, undo, changes, journal) -> None:
        tdef = self._tdef(table)
        if table not in self._mutable:
            raise ImmutableTable(f"{table} is {tdef.cls.value}; updates are not allowed")
        rows = self._tables[table]
        old = rows.get(key)
        if old is None:
            raise NotFound(f"{table}: no row with key {key!r}")
        bad = set(values) - set(tdef.column_names)
        if bad or tdef.primary_key in values or "created_on" in values:
            raise UnknownColumn(f"{table}: cannot set {sorted(bad | ({tdef.primary_key, 'created_on'} & set(values)))}")
        for name in tdef.required:
            if name in values and values[name] is None:
                raise RequiredFieldMissing(f"{table}: required field {name!r} is null")
        for col, ref in tdef.foreign_keys.items():
            v = values.get(col)
            if v is not None and v not in self._tables[ref]:
                raise ForeignKeyViolation(f"{table}.{col}={v!r} does not resolve in {ref}")
        new = dict(old)
        new.update(values)
        new["modified_on"] = at
        rows[key] = new
        undo.append(("UPDATE", table, key, old))
        changes.append((table, "UPDATE", dict(old), dict(new)))
        journal.append((table, "UPDATE", key, dict(new)))

    def _apply_delete(self, table, key, undo, changes, journal) -> None:
        tdef = self._tdef(table)
        if table not in self._mutable:
            raise ImmutableTable(f"{table} is {tdef.cls.value}; deletes are not allowed")
        rows = self._tables[table]
        old = rows.get(key)
        if old is None:
            raise NotFound(f"{table}: no row with key {key!r}")
        del rows[key]
        undo.append(("DELETE", table, key, old))
        changes.append((table, "DELETE", dict(old), None))
        journal.append((table, "DELETE", key, None))

    def _rollback(self, undo: list[tuple]) -> None:
        for entry in reversed(undo):
            kind, table, key = entry[0], entry[1], entry[2]
            rows = self._tables[table]
            if kind == "INSERT":
                del rows[key]
                order = self._order.get(table)
                if order is not None:
                    order[0].pop()
                    order[1].pop()
            else:  # UPDATE / DELETE: restore the previous image
                rows[key] = entry[3]

    def _tdef(self, table: str):
        try:
            return self.catalog[table]
        except KeyError:
            raise StoreError(f"unknown table {table!r}") from None

    # ---- reads --------------------------------------------------------------------------------
    def get(self, table: str, key: str) -> dict | None:
        with self._lock:
            row = self._tables[table].get(key)
            return dict(row) if row is not None else None

    def rows(self, table: str) -> list[dict]:
        with self._lock:
            return [dict(r) for r in self._tables[table].values()]

    def iter_rows(self, table: str) -> Iterator[dict]:
        """Iterate live row objects without copying (single-threaded readers only)."""
        return iter(self._tables[table].values())

    def keys(self, table: str) -> list[str]:
        with self._lock:
            return list(self._tables[table])

    def count(self, table: str) -> int:
        return len(self._tables[table])

    def counts(self) -> dict[str, int]:
        with self._lock:
            return {name: len(rows) for name, rows in self._tables.items()}

    def total_rows(self) -> int:
        return sum(self.counts().values())

    @property
    def last_change_seq(self) -> int:
        return len(self._changelog)

    @property
    def snapshot_id(self) -> str:
        """Identifies the committed state: commit count plus changelog position."""
        with self._lock:
            return f"commit-{self._commit_id}/seq-{len(self._changelog)}"

    def changelog(self) -> list[ChangeRecord]:
        with self._lock:
            return list(self._changelog)

    def changes_since(self, seq: int, limit: int | None = None) -> list[ChangeRecord]:
        """Change records with sequence number greater than ``seq``."""
        with self._lock:
            out = self._changelog[seq:]
            return out[:limit] if limit is not None else list(out)

    def rows_created_since(self, table: str, high_water: str | None) -> list[dict]:
        """Append-only rows with ``created_on >= high_water`` (all rows when ``high_water`` is None)."""
        with self._lock:
            keys, created = self._order[table]
            start = 0 if high_water is None else bisect.bisect_left(created, high_water)
            rows = self._tables[table]
            return [dict(rows[k]) for k in keys[start:]]

    def journal_lines(self) -> list[str]:
        if self._journal is None:
            raise StoreError("journal disabled for this store")
        with self._lock:
            return list(self._journal)

    # ---- snapshot export / import -------------------------------------------------------------
    def export_snapshot(self, directory: Path | str) -> dict[str, int]:
        """Write one line-delimited snake_case document per table plus the changelog."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        counts = {}
        with self._lock:
            for name, rows in self._tables.items():
                with open(d / f"{name}.jsonl", "w", encoding="utf-8") as fh:
                    for row in rows.values():
                        fh.write(json.dumps(row, separators=(",", ":"), ensure_ascii=False) + "\n")
                counts[name] = len(rows)
            with open(d / "_changelog.jsonl", "w", encoding="utf-8") as fh:
                for rec in self._changelog:
                    fh.write(json.dumps(rec.to_dict(), separators=(",", ":"), ensure_ascii=False) + "\n")
        return counts

    @classmethod
    def import_snapshot(cls, directory: Path | str, catalog: TableCatalog | None = None) -> "Store":
        d = Path(directory)
        store = cls(catalog, keep_journal=False)
        for name in store.catalog:
            path = d / f"{name}.jsonl"
            if not path.exists():
                continue
            rows = store._tables[name]
            order = store._order.get(name)
            pk = store.catalog[name].primary_key
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    row = json.loads(line)
                    rows[row[pk]] = row
                    if order is not None:
                        order[0].append(row[pk])
                        order[1].append(row["created_on"])
        log = d / "_changelog.jsonl"
        if log.exists():
            with open(log, encoding="utf-8") as fh:
                for line in fh:
                    r = json.loads(line)
                    store._changelog.append(ChangeRecord(r["seq"], r["table"], r["op"], r["old_row"], r["new_row"],
                                                         r["committed_at"]))
        return store


def replay_changelog(records: Iterable[ChangeRecord]) -> dict[str, dict[str, dict]]:
    """Rebuild mutable-table state from change records alone."""
    state: dict[str, dict[str, dict]] = {}
    for rec in records:
        table = state.setdefault(rec.table, {})
        if rec.op == "DELETE":
            table.pop(rec.old_row["nid"], None)
        else:
            table[rec.new_row["nid"]] = dict(rec.new_row)
    return state
