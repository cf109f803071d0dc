import json

import pytest

from mesynth.domain.registry import TemplateRegistry, load_template
from mesynth.sim.engine import RunConfig, run
from mesynth.star.builder import BRIDGES, DIMENSIONS, FACTS, STAR_TABLES, export_star, rebuild, \
    rebuild_from_registry
from mesynth.star.mappings import StationRow, derive_mappings
from mesynth.store.store import Store
from support import simulate


def mappings(tid):
    registry = TemplateRegistry()
    load_template(registry, tid)
    return derive_mappings(registry.active)


def test_twenty_three_tables():
    assert len(STAR_TABLES) == 23 == len(set(STAR_TABLES))
    assert len(BRIDGES) == 1 and len(DIMENSIONS) + len(FACTS) == 22


def test_station_rows_from_template():
    assert mappings("aerospace").station_rows[0] == StationRow("S1", "CNC Machining", "WC-CNC", 1, 0.95, 300, True)
    row = mappings("pharma").station_rows[0]
    assert (row.station_id, row.name, row.work_center, row.sequence, row.first_pass_yield, row.mean_cycle_time) == \
        ("S1", "Dispensing", "WC-DISPENSE", 1, 0.99, 32)


def test_inverse_maps_are_consistent():
    m = mappings("aerospace")
    for row in m.station_rows:
        assert m.wc_to_station[row.work_center] == row.station_id
    assert set(m.defect_to_station.values()) <= {r.station_id for r in m.station_rows}
    assert all(s in m.wc_to_station.values() for s in m.unit_to_station.values())


def test_star_dim_station_matches_mapping(aero):
    dim = aero.star["DimStation"]
    assert [r["station_id"] for r in dim] == [f"S{i}" for i in range(1, 7)]
    assert dim[0]["name"] == "CNC Machining" and dim[0]["mean_cycle_time"] == 300


def test_fact_counts_match_store(aero):
    star, store = aero.star, aero.store
    assert len(star["FctQuality"]) == store.count("NonConformance")
    completed = [o for o in store.iter_rows("WorkOrderOperation") if o["state"] == "Complete"]
    assert len(star["FctProduction"]) == len(completed)
    assert len(star["FctInspection"]) == store.count("InspectionValue")


def test_foreign_keys_resolve_inside_star(aero):
    star = aero.star
    stations = {r["station_key"] for r in star["DimStation"]}
    dates = {r["date_key"] for r in star["DimDate"]}
    products = {r["product_key"] for r in star["DimProduct"]}
    defects = {r["defect_type_key"] for r in star["DimDefectType"]}
    for r in star["FctQuality"]:
        assert r["station_key"] in stations and r["date_key"] in dates
        assert r["product_key"] in products and r["defect_type_key"] in defects


def test_rebuild_is_deterministic(tmp_path, aero):
    a = export_star(rebuild_from_registry(aero.store, aero.registry), tmp_path / "a")
    b = export_star(rebuild_from_registry(aero.store, aero.registry), tmp_path / "b")
    assert a == b
    for name in STAR_TABLES:
        assert (tmp_path / "a" / f"{name}.jsonl").read_bytes() == (tmp_path / "b" / f"{name}.jsonl").read_bytes()
    manifest = json.loads((tmp_path / "a" / "_manifest.json").read_text())
    assert manifest["tables"] == list(STAR_TABLES)
    assert manifest["built_from"]["template_id"] == "aerospace"


def test_swap_changes_dimension_names_without_code_change():
    registry = TemplateRegistry()
    store = Store()
    run(RunConfig("aerospace", duration_days=2), registry, store)
    before = [r["name"] for r in rebuild_from_registry(store, registry)["DimStation"]]
    store = Store()
    run(RunConfig("pharma", duration_days=2), registry, store)
    after = [r["name"] for r in rebuild_from_registry(store, registry)["DimStation"]]
    assert before[0] == "CNC Machining"
    assert after[0] == "Dispensing" and "Granulation" in " ".join(after)


def test_mismatched_mappings_refuse_to_build(aero):
    with pytest.raises(Exception) as exc:
        rebuild(aero.store, mappings("pharma"), aero.registry)
    assert type(exc.value).__name__ in ("MappingMismatch", "SourceInconsistent")


@pytest.mark.parametrize("tid", ["pharma", "warehousing"])
def test_every_template_builds(tid):
    r = simulate(tid)
    counts = r.star.counts()
    assert set(counts) == set(STAR_TABLES)
    assert counts["DimStation"] == len(r.registry.active.stations)
