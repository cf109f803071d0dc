from datetime import datetime

import pytest
from hypothesis import given, strategies as st

from mesynth.domain.registry import TemplateRegistry, load_template
from mesynth.sim.seeds import generate_seeds
from mesynth.store.casing import serialize_row, to_pascal, to_snake
from mesynth.store.catalog import APPEND_ONLY_TABLES, MUTABLE_TABLES, TableClass, define_schema
from mesynth.store.store import (Batch, DuplicateKey, ForeignKeyViolation, ImmutableTable, NotFound,
                                 RequiredFieldMissing, Store, UnknownColumn)

T0 = "2026-01-05T00:00:00"


def strip(row):
    return {k: v for k, v in row.items() if k not in ("created_on", "modified_on")}


@pytest.fixture()
def seeded(aero):
    registry = TemplateRegistry()
    load_template(registry, "aerospace")
    store = Store()
    store.insert_batch(generate_seeds(registry.active, datetime(2026, 1, 5), 42).rows, at=T0)
    order = strip(aero.store.rows("WorkOrder")[0])
    order["state"] = "New"
    store.insert_batch([("WorkOrder", order)], at="2026-01-05T06:00:00")
    return store, order, aero


def test_catalog_is_template_independent():
    aero, pharma = TemplateRegistry(), TemplateRegistry()
    load_template(aero, "aerospace")
    load_template(pharma, "pharma")
    a, p = define_schema(aero.active), define_schema(pharma.active)
    assert a.structure() == p.structure() == define_schema().structure()
    assert len(a) >= 40


def test_mutability_classes():
    c = define_schema()
    assert len(MUTABLE_TABLES) == 6 and len(APPEND_ONLY_TABLES) == 5
    assert set(c.by_class(TableClass.MUTABLE)) == set(MUTABLE_TABLES)
    assert set(c.by_class(TableClass.APPEND_ONLY)) == set(APPEND_ONLY_TABLES)


def test_total_rows_thirty_day_aerospace(aero):
    assert 15_000 <= aero.store.total_rows() <= 18_000


def test_dangling_reference_rejects_whole_batch(seeded, aero):
    store, order, _ = seeded
    before = store.counts()
    log = store.last_change_seq
    op = strip(aero.store.rows("WorkOrderOperation")[0])
    op["work_order_nid"] = "WO-MISSING"
    good = dict(order, nid="WO-NEW-1")
    with pytest.raises(ForeignKeyViolation):
        store.insert_batch([("WorkOrder", good), ("WorkOrderOperation", op)], at="2026-01-05T07:00:00")
    assert store.counts() == before and store.last_change_seq == log
    assert store.get("WorkOrder", "WO-NEW-1") is None


def test_reference_to_earlier_row_in_same_batch(seeded, aero):
    store, order, _ = seeded
    op = strip(aero.store.rows("WorkOrderOperation")[0])
    new_order = dict(order, nid="WO-NEW-2")
    op.update(nid="OP-NEW-2", work_order_nid="WO-NEW-2")
    store.insert_batch([("WorkOrder", new_order), ("WorkOrderOperation", op)], at="2026-01-05T07:00:00")
    assert store.get("WorkOrderOperation", "OP-NEW-2")["work_order_nid"] == "WO-NEW-2"


def test_insert_emits_one_change_record(seeded):
    store, order, _ = seeded
    rec = store.changelog()[-1]
    assert (rec.op, rec.table, rec.old_row) == ("INSERT", "WorkOrder", None)
    assert rec.new_row["nid"] == order["nid"]
    assert rec.new_row["created_on"] == rec.new_row["modified_on"] == "2026-01-05T06:00:00"


def test_seed_tables_have_no_changelog(seeded):
    store, _, _ = seeded
    assert {r.table for r in store.changelog()} <= set(MUTABLE_TABLES) | set(APPEND_ONLY_TABLES)


def test_update_carries_full_images(seeded):
    store, order, _ = seeded
    rec = store.update_row("WorkOrder", order["nid"], {"state": "Active"}, at="2026-01-05T08:00:00")
    assert rec.op == "UPDATE"
    assert rec.old_row["state"] == "New" and rec.new_row["state"] == "Active"
    assert set(rec.old_row) == set(rec.new_row)
    row = store.get("WorkOrder", order["nid"])
    assert row["modified_on"] == "2026-01-05T08:00:00" and row["created_on"] == "2026-01-05T06:00:00"


def test_noop_update_still_recorded(seeded):
    store, order, _ = seeded
    n = store.last_change_seq
    rec = store.update_row("WorkOrder", order["nid"], {"state": "New"}, at="2026-01-05T09:00:00")
    assert store.last_change_seq == n + 1
    assert rec.old_row["state"] == rec.new_row["state"]
    assert rec.new_row["modified_on"] == "2026-01-05T09:00:00"


def test_class_enforcement(seeded, aero):
    store, order, _ = seeded
    value = aero.store.rows("InspectionValue")[0]
    with pytest.raises(ImmutableTable):
        store.update_row("InspectionValue", value["nid"], {"value": 1.0}, at="2026-01-05T09:00:00")
    with pytest.raises(ImmutableTable):
        store.update_row("Plant", store.keys("Plant")[0], {"name": "x"}, at="2026-01-05T09:00:00")
    with pytest.raises(NotFound):
        store.update_row("WorkOrder", "WO-NOPE", {"state": "Active"}, at="2026-01-05T09:00:00")


def test_insert_errors(seeded):
    store, order, _ = seeded
    with pytest.raises(DuplicateKey):
        store.insert_batch([("WorkOrder", order)], at="2026-01-05T09:00:00")
    with pytest.raises(RequiredFieldMissing):
        store.insert_batch([("WorkOrder", dict(order, nid="WO-X", part_number=None))], at="2026-01-05T09:00:00")
    with pytest.raises(UnknownColumn):
        store.insert_batch([("WorkOrder", dict(order, nid="WO-Y", colour="red"))], at="2026-01-05T09:00:00")


def test_delete_records_old_image(seeded):
    store, order, _ = seeded
    rec = store.delete_row("WorkOrder", order["nid"], at="2026-01-05T10:00:00")
    assert rec.op == "DELETE" and rec.new_row is None and rec.old_row["nid"] == order["nid"]
    assert store.get("WorkOrder", order["nid"]) is None


def test_batch_object(seeded):
    store, order, _ = seeded
    b = Batch()
    assert not b
    b.update("WorkOrder", order["nid"], {"state": "Active"})
    assert len(b) == 1
    store.commit(b, at="2026-01-05T11:00:00")
    assert store.get("WorkOrder", order["nid"])["state"] == "Active"


def test_changelog_replay_reproduces_mutable_tables(aero):
    state = {t: {} for t in MUTABLE_TABLES}
    for rec in aero.store.changelog():
        if rec.table not in state:
            continue
        if rec.op == "DELETE":
            del state[rec.table][rec.old_row["nid"]]
        else:
            state[rec.table][rec.new_row["nid"]] = rec.new_row
    for t in MUTABLE_TABLES:
        assert state[t] == {r["nid"]: r for r in aero.store.iter_rows(t)}


def test_seq_strictly_increasing(aero):
    seqs = [r.seq for r in aero.store.changelog()]
    assert seqs == list(range(1, len(seqs) + 1))


def test_stamps_ordered(aero):
    for t in MUTABLE_TABLES + APPEND_ONLY_TABLES:
        for r in aero.store.iter_rows(t):
            assert r["created_on"] <= r["modified_on"]


def test_snapshot_round_trip(tmp_path, aero):
    aero.store.export_snapshot(tmp_path)
    copy = Store.import_snapshot(tmp_path)
    assert copy.counts() == aero.store.counts()
    assert copy.changelog() == aero.store.changelog()
    assert copy.rows("WorkOrder") == aero.store.rows("WorkOrder")


def test_casing_examples():
    assert to_pascal("created_on") == "CreatedOn"
    assert to_pascal("station_nid") == "StationNid"
    assert to_snake("StationNid") == "station_nid"
    row = {"station_nid": "S1", "created_on": "x"}
    assert serialize_row(serialize_row(row, "PascalCase"), "snake_case") == row


@given(st.lists(st.from_regex(r"[a-z][a-z0-9]{0,5}", fullmatch=True), min_size=1, max_size=4))
def test_casing_bijective(parts):
    name = "_".join(parts)
    assert to_snake(to_pascal(name)) == name
