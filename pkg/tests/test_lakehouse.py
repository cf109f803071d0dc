import statistics
import time

import pytest

from mesynth.domain.registry import TemplateRegistry
from mesynth.lake.lakehouse import LakeLocked, LakeWriteFailure, Lakehouse, SyncLock
from mesynth.lake.sync import (CRASH_POINTS, LakeView, SimulatedCrash, SyncLoop, lake_matches_store, recover,
                               sync_cycle)
from mesynth.sim.engine import RunConfig, run
from mesynth.star.builder import rebuild_from_registry
from mesynth.store.catalog import APPEND_ONLY_TABLES, MUTABLE_TABLES
from mesynth.store.store import Store


def row_sets(store, lake):
    """Independent comparison: every CDC table's live key set and row images."""
    for t in MUTABLE_TABLES + APPEND_ONLY_TABLES:
        want = {r["nid"]: r for r in store.iter_rows(t)}
        have = {}
        for rec in lake.read_snapshot(t):
            if rec.get("_deleted"):
                have.pop(rec["nid"], None)
            else:
                have[rec["nid"]] = {k: v for k, v in rec.items() if not k.startswith("_")}
        if want != have:
            return t
    return None


@pytest.fixture()
def day_run():
    registry, store = TemplateRegistry(), Store()
    run(RunConfig("aerospace", duration_days=2), registry, store)
    return registry, store


def test_fresh_lake_full_sync(tmp_path, day_run):
    _, store = day_run
    lake = Lakehouse(tmp_path)
    state = recover(lake)
    assert state.recovered_from_empty
    report = sync_cycle(store, lake, state)
    assert report.total_rows > 0 and report.cycle_id == 1
    assert row_sets(store, lake) is None
    assert lake_matches_store(store, lake) == {}


def test_idle_cycle_writes_nothing(tmp_path, day_run):
    _, store = day_run
    lake = Lakehouse(tmp_path)
    state = recover(lake)
    sync_cycle(store, lake, state)
    ids = {t: lake.snapshot_ids(t) for t in lake.tables()}
    report = sync_cycle(store, lake, state)
    assert report.snapshots_written == 0 and report.total_rows == 0
    assert {t: lake.snapshot_ids(t) for t in lake.tables()} == ids


def test_crash_after_commit_is_idempotent(tmp_path, day_run):
    _, store = day_run
    lake = Lakehouse(tmp_path)

    def crash(point, table):
        if point == "after_manifest" and table == "EquipmentEvent":
            raise SimulatedCrash(table)

    with pytest.raises(LakeWriteFailure):
        sync_cycle(store, lake, recover(lake), crash)
    events = len(lake.read_snapshot("EquipmentEvent"))
    assert events == store.count("EquipmentEvent")
    state = recover(lake)
    report = sync_cycle(store, lake, state)
    assert report.dedup_drops > 0
    assert "EquipmentEvent" not in report.rows
    assert len(lake.read_snapshot("EquipmentEvent")) == events
    for t in APPEND_ONLY_TABLES:
        assert len(lake.read_snapshot(t)) == store.count(t)
    assert row_sets(store, lake) is None


@pytest.mark.parametrize("point", CRASH_POINTS)
def test_every_crash_point_recovers(tmp_path, day_run, point):
    _, store = day_run
    lake = Lakehouse(tmp_path)

    def crash(p, table):
        if p == point and table == "WorkOrderOperation":
            raise SimulatedCrash(p)

    state = recover(lake)
    with pytest.raises(LakeWriteFailure):
        sync_cycle(store, lake, state, crash)
    assert state.needs_recovery
    report = sync_cycle(store, lake, state)
    assert report.recovered
    assert row_sets(store, lake) is None


def test_incremental_sync_across_run(tmp_path):
    store = Store()
    lake = Lakehouse(tmp_path)
    state = recover(lake)
    reports = []

    def hook(t):
        if t % 240 == 0:
            reports.append(sync_cycle(store, lake, state))

    run(RunConfig("pharma", duration_days=3), TemplateRegistry(), store, hook)
    reports.append(sync_cycle(store, lake, state))
    assert len(reports) > 5
    assert row_sets(store, lake) is None


def test_expiry_keeps_recent_snapshots_readable(tmp_path):
    lake = Lakehouse(tmp_path, retain=100)
    state = recover(lake)
    marks = []

    def hook(t):
        if t % 60 == 0:
            sync_cycle(store, lake, state)

    store = Store()
    run(RunConfig("aerospace", duration_days=2), TemplateRegistry(), store, hook)
    table = "WorkOrderOperation"
    ids = lake.snapshot_ids(table)
    assert len(ids) >= 12
    ids = ids[-12:]
    for k in ids:
        marks.append((k, lake.current_view(table, snapshot_id=k)))
    dropped = lake.expire_snapshots(table, retain=2)
    assert lake.snapshot_ids(table) == ids[-2:]
    assert dropped >= 10
    for k, view in marks[-2:]:
        assert lake.current_view(table, snapshot_id=k) == view
    with pytest.raises(Exception):
        lake.read_snapshot(table, ids[0])


def test_time_travel_replays_snapshot(tmp_path):
    store = Store()
    lake = Lakehouse(tmp_path)
    state = recover(lake)
    history = []

    def hook(t):
        if t % 180 == 0:
            sync_cycle(store, lake, state)
            history.append(({r["nid"]: dict(r) for r in store.iter_rows("WorkOrder")},
                            lake.latest("WorkOrder").snapshot_id if lake.latest("WorkOrder") else None))

    run(RunConfig("aerospace", duration_days=2), TemplateRegistry(), store, hook)
    checked = 0
    for rows, sid in history:
        if sid is not None and sid in lake.snapshot_ids("WorkOrder"):
            assert lake.current_view("WorkOrder", snapshot_id=sid) == rows
            checked += 1
    assert checked >= 2


def test_lake_view_rebuild_equals_store_rebuild(tmp_path, day_run):
    registry, store = day_run
    lake = Lakehouse(tmp_path)
    sync_cycle(store, lake, recover(lake))
    view = LakeView(lake, store)
    assert view.snapshot_id.startswith("lake:")
    a = rebuild_from_registry(store, registry)
    b = rebuild_from_registry(view, registry)
    assert a.counts() == b.counts()
    for name in a.tables:
        key = lambda r: repr(sorted(r.items()))
        assert sorted(a[name], key=key) == sorted(b[name], key=key), name


def test_lock_excludes_second_writer(tmp_path, day_run):
    _, store = day_run
    lake = Lakehouse(tmp_path)
    with SyncLock(lake):
        with pytest.raises(LakeLocked):
            sync_cycle(store, lake, recover(lake))


def test_streaming_sync_loop_latency(tmp_path):
    store = Store()
    lake = Lakehouse(tmp_path)
    loop = SyncLoop(store, lake, interval_s=0.05)
    loop.start()
    try:
        run(RunConfig("aerospace", duration_days=2), TemplateRegistry(), store)
        time.sleep(0.2)
    finally:
        reports = loop.stop()
    assert reports
    assert statistics.median(r.latency_ms for r in reports) < 1000
    assert row_sets(store, lake) is None
