import json

import pytest

from mesynth.domain.parser import MissingExports, ParseError, parse_template, serialize_template
from mesynth.domain.registry import (RelationalViolations, TemplateRegistry, UnknownTemplate, available_templates,
                                     load_template, read_template_document)
from mesynth.domain.relations import validate_relations
from mesynth.domain.vocabulary import vocabulary_projection

ALL = available_templates()


def doc(tid):
    return json.loads(read_template_document(tid))


def test_six_templates_ship():
    assert ALL == sorted(["aerospace", "pharma", "automotive", "electronics", "beverages", "warehousing"])


def test_aerospace_station_one():
    t = parse_template(read_template_document("aerospace"), "aerospace")
    s1 = t.stations["S1"]
    assert (s1.name, s1.work_center) == ("CNC Machining", "WC-CNC")
    assert s1.cycle_time_range_min == (120, 480)
    assert s1.setup_time_min == (30, 60)
    assert s1.first_pass_yield == 0.95 and s1.is_quality_gate


def test_pharma_station_one():
    s1 = parse_template(read_template_document("pharma"), "pharma").stations["S1"]
    assert (s1.name, s1.work_center, s1.cycle_time_range_min, s1.setup_time_min, s1.first_pass_yield) == \
        ("Dispensing", "WC-DISPENSE", (20, 45), (15, 30), 0.99)


@pytest.mark.parametrize("tid", ALL)
def test_every_template_is_relationally_valid(tid):
    report = validate_relations(parse_template(read_template_document(tid), tid))
    assert report.ok, report.to_dict()


@pytest.mark.parametrize("tid", ALL)
def test_serialization_round_trip(tid):
    t = parse_template(read_template_document(tid), tid)
    again = parse_template(serialize_template(t), tid)
    assert serialize_template(again) == serialize_template(t)
    assert again.typed == t.typed


def test_missing_export_named():
    d = doc("aerospace")
    del d["STATIONS"]
    with pytest.raises(MissingExports) as exc:
        parse_template(json.dumps(d), "broken")
    assert exc.value.missing == ["STATIONS"]


def test_bad_fpy_rejected():
    d = doc("aerospace")
    d["STATIONS"]["S1"]["first_pass_yield"] = 1.5
    with pytest.raises(ParseError):
        parse_template(json.dumps(d), "broken")


def test_unknown_export_rejected():
    d = doc("aerospace")
    d["SURPLUS_EXPORT"] = 1
    with pytest.raises(ParseError):
        parse_template(json.dumps(d), "broken")


def test_not_json():
    with pytest.raises(ParseError):
        parse_template(b"{not json", "broken")


def test_shared_work_center_violates_injectivity():
    d = doc("aerospace")
    d["STATIONS"]["S2"]["work_center"] = d["STATIONS"]["S1"]["work_center"]
    d["STATION_TO_WC"]["S2"] = d["STATIONS"]["S1"]["work_center"]
    report = validate_relations(parse_template(json.dumps(d), "broken"))
    assert "sigma_injective" in report.rules()


def test_failed_load_keeps_previous_template(tmp_path):
    for tid in ("aerospace",):
        (tmp_path / f"{tid}.json").write_bytes(read_template_document(tid))
    d = doc("aerospace")
    d["STATIONS"]["S2"]["work_center"] = d["STATIONS"]["S1"]["work_center"]
    d["STATION_TO_WC"]["S2"] = d["STATIONS"]["S1"]["work_center"]
    (tmp_path / "bad.json").write_text(json.dumps(d))
    registry = TemplateRegistry(tmp_path)
    load_template(registry, "aerospace")
    with pytest.raises(RelationalViolations):
        load_template(registry, "bad")
    assert registry.template_id == "aerospace" and registry.version == 1
    with pytest.raises(UnknownTemplate):
        load_template(registry, "nope")
    assert registry.template_id == "aerospace"


def test_swap_bumps_version_and_notifies():
    registry = TemplateRegistry()
    seen = []
    registry.subscribe(lambda cur: seen.append((cur.template_id, cur.version)))
    load_template(registry, "aerospace")
    v = registry.version
    assert len(vocabulary_projection(registry).failure_codes) == 24
    load_template(registry, "pharma")
    load_template(registry, "aerospace")
    load_template(registry, "pharma")
    assert registry.version == v + 3
    assert seen[-1] == ("pharma", v + 3)
    assert len(vocabulary_projection(registry).failure_codes) == 27


def test_automotive_shape():
    registry = TemplateRegistry()
    load_template(registry, "automotive")
    t = registry.active
    assert len(t.stations) == 6
    assert len(t.typed.SHIFTS) == 3
    assert len(t.failure_codes) == 28


def test_aerospace_station_projection():
    registry = TemplateRegistry()
    load_template(registry, "aerospace")
    proj = vocabulary_projection(registry)
    assert set(proj.stations) == {f"S{i}" for i in range(1, 7)}
    assert "BND-VOID-001" in proj.failure_codes
    assert proj.names["S1"] == "CNC Machining"
