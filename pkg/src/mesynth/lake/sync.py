"""Store → lake synchronisation.

Mutable tables are drained from the store changelog; each change becomes an
appended row image tagged with its sequence number. Append-only tables are
polled with an inclusive ``created_on >= high_water`` scan, and rows whose
primary key was already committed at the boundary timestamp are dropped, so a
row sharing its timestamp with the previous cycle's last row is neither lost
nor duplicated.

Watermarks live only in memory. After a restart, :func:`recover` rebuilds
them from the newest manifest of each lake table.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..store.catalog import APPEND_ONLY_TABLES, MUTABLE_TABLES
from ..store.store import Store
from .lakehouse import DELETED_FIELD, SEQ_FIELD, Lakehouse, LakeWriteFailure, SyncLock

logger = logging.getLogger(__name__)

DEFAULT_INTERVAL_S = 30.0
CRASH_POINTS = ("before_data", "before_manifest", "after_manifest")

# A crash hook is called at each point as hook(point, table); raising aborts the cycle.
CrashHook = Callable[[str, str], None]


class SimulatedCrash(Exception):
    """Raised by test crash hooks to emulate the sync process dying."""


@dataclass
class SyncState:
    watermarks: dict[str, Optional[str]] = field(default_factory=lambda: {t: None for t in APPEND_ONLY_TABLES})
    # keys already in the lake whose created_on equals the watermark
    boundary_keys: dict[str, set] = field(default_factory=lambda: {t: set() for t in APPEND_ONLY_TABLES})
    cursors: dict[str, int] = field(default_factory=lambda: {t: 0 for t in MUTABLE_TABLES})
    cycles: int = 0
    needs_recovery: bool = False
    recovered_from_empty: bool = False


@dataclass
class SyncReport:
    cycle_id: int
    rows: dict[str, int]
    dedup_drops: int
    snapshots_written: int
    latency_ms: float
    expired: int = 0
    recovered: bool = False

    @property
    def total_rows(self) -> int:
        return sum(self.rows.values())


def recover(lake: Lakehouse) -> SyncState:
    """Reconstruct watermarks, boundary keys and changelog cursors from committed snapshots."""
    state = SyncState()
    empty = True
    for table in APPEND_ONLY_TABLES:
        m = lake.latest(table)
        if m is None or m.max_created_on is None:
            continue
        empty = False
        hw = m.max_created_on
        state.watermarks[table] = hw
        keys = set()
        for f in m.files:
            if f.max_created_on == hw:
                keys.update(r["nid"] for r in lake._read_file(table, f.name) if r.get("created_on") == hw)
        state.boundary_keys[table] = keys
    for table in MUTABLE_TABLES:
        m = lake.latest(table)
        if m is not None and m.max_seq is not None:
            empty = False
            state.cursors[table] = m.max_seq
    state.recovered_from_empty = empty
    return state


def _mutable_batches(store: Store, state: SyncState) -> dict[str, list[dict]]:
    start = min(state.cursors.values())
    out: dict[str, list[dict]] = {t: [] for t in MUTABLE_TABLES}
    for rec in store.changes_since(start):
        if rec.table not in out or rec.seq <= state.cursors[rec.table]:
            continue
        if rec.op == "DELETE":
            pk = store.catalog[rec.table].primary_key
            image = {pk: rec.old_row[pk], DELETED_FIELD: True}
        else:
            image = dict(rec.new_row)
        image[SEQ_FIELD] = rec.seq
        out[rec.table].append(image)
    return out


def sync_cycle(store: Store, lake: Lakehouse, state: SyncState, crash: CrashHook | None = None) -> SyncReport:
    """Run one cycle. ``state`` is updated in place only when every table commits."""
    started = time.perf_counter()
    with SyncLock(lake):
        recovered = False
        if state.needs_recovery:
            fresh = recover(lake)
            fresh.cycles = state.cycles
            state.__dict__.update(fresh.__dict__)
            recovered = True
        cycle_id = state.cycles + 1
        pending: dict[str, list[dict]] = {}
        drops = 0
        for table, images in _mutable_batches(store, state).items():
            if images:
                pending[table] = images
        for table in APPEND_ONLY_TABLES:
            seen = state.boundary_keys[table]
            fresh_rows = []
            for row in store.rows_created_since(table, state.watermarks[table]):
                if row["nid"] in seen:
                    drops += 1
                else:
                    fresh_rows.append(row)
            if fresh_rows:
                pending[table] = fresh_rows

        updates: list[Callable[[], None]] = []
        counts: dict[str, int] = {}
        expired = 0
        try:
            for table, rows in pending.items():
                _hook(crash, "before_data", table)
                columns = store.catalog[table].column_names
                sid = lake.next_snapshot_id(table)
                data = lake.write_data_file(table, sid, rows, columns)
                _hook(crash, "before_manifest", table)
                lake.commit_snapshot(table, data, sync_cycle=cycle_id)
                counts[table] = len(rows)
                expired += lake.expire_snapshots(table)
                _hook(crash, "after_manifest", table)
                updates.append(_advance(state, table, rows))
        except Exception as exc:
            state.needs_recovery = True
            if isinstance(exc, LakeWriteFailure):
                raise
            raise LakeWriteFailure(f"sync cycle {cycle_id} aborted: {exc}") from exc
        for apply in updates:
            apply()
        state.cycles = cycle_id
    latency = (time.perf_counter() - started) * 1000.0
    return SyncReport(cycle_id, counts, drops, len(counts), latency, expired, recovered)


def _hook(crash: CrashHook | None, point: str, table: str) -> None:
    if crash is not None:
        crash(point, table)


def _advance(state: SyncState, table: str, rows: list[dict]) -> Callable[[], None]:
    if table in state.cursors:
        top = max(r[SEQ_FIELD] for r in rows)

        def apply() -> None:
            state.cursors[table] = max(state.cursors[table], top)
        return apply

    hw = max(r["created_on"] for r in rows)

    def apply() -> None:
        old = state.watermarks[table]
        at_hw = {r["nid"] for r in rows if r["created_on"] == hw}
        if old == hw:
            state.boundary_keys[table] |= at_hw
        elif old is None or hw > old:
            state.watermarks[table] = hw
            state.boundary_keys[table] = at_hw
    return apply


def lake_matches_store(store: Store, lake: Lakehouse) -> dict[str, tuple[int, int]]:
    """Tables whose lake view differs from the store, mapped to (store rows, lake rows)."""
    bad = {}
    for table in MUTABLE_TABLES + APPEND_ONLY_TABLES:
        want = {r["nid"]: r for r in store.iter_rows(table)}
        records = lake.read_snapshot(table)
        have = lake.current_view(table)
        dupes = table in APPEND_ONLY_TABLES and len(records) != len(have)
        if dupes or want != have:
            bad[table] = (len(want), len(records))
    return bad


class SyncLoop:
    """Background sync at a fixed interval; used by streaming runs."""

    def __init__(self, store: Store, lake: Lakehouse, interval_s: float = DEFAULT_INTERVAL_S,
                 state: SyncState | None = None):
        self.store = store
        self.lake = lake
        self.interval_s = interval_s
        self.state = state or recover(lake)
        self.reports: list[SyncReport] = []
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._loop, name="cdc-sync", daemon=True)
        self._thread.start()

    def _loop(self) -> None:
        while not self._stop.wait(self.interval_s):
            self._once()

    def _once(self) -> None:
        try:
            self.reports.append(sync_cycle(self.store, self.lake, self.state))
        except LakeWriteFailure:
            logger.exception("sync cycle failed; will recover on next cycle")

    def stop(self) -> list[SyncReport]:
        """Stop the loop and run one final cycle so the lake catches up."""
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
        self._once()
        return self.reports


class LakeView:
    """Source view reading CDC tables from lake snapshots and reference tables from the store.

    ``snapshots`` pins tables to specific snapshot ids for time-travel reads.
    """

    def __init__(self, lake: Lakehouse, store: Store, snapshots: dict[str, int] | None = None):
        self.lake = lake
        self.store = store
        self.snapshots = dict(snapshots or {})

    @property
    def snapshot_id(self) -> str:
        parts = []
        for table in MUTABLE_TABLES + APPEND_ONLY_TABLES:
            sid = self.snapshots.get(table)
            if sid is None:
                m = self.lake.latest(table)
                sid = m.snapshot_id if m else 0
            parts.append(f"{table}@{sid}")
        return "lake:" + ",".join(parts)

    def rows(self, table: str) -> list[dict]:
        if table in MUTABLE_TABLES or table in APPEND_ONLY_TABLES:
            return list(self.lake.current_view(table, snapshot_id=self.snapshots.get(table)).values())
        return self.store.rows(table)
