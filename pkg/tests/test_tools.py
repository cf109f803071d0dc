import pytest

from mesynth.domain.registry import TemplateRegistry, load_template
from mesynth.domain.vocabulary import vocabulary_projection
from mesynth.sim.engine import RunConfig, run
from mesynth.star.builder import rebuild_from_registry
from mesynth.store.store import Store
from mesynth.tools.execute import TOOLS, NotFound, StaleSchema, execute_tool
from mesynth.tools.schemas import TOOL_NAMES, SchemaService, export_function_schemas
from mesynth.tools.validation import (ConstraintError, MissingParameter, ToolCall, UnknownParameter, UnknownTool,
                                      admit_unchecked, validate_call)

STATIONS = tuple(f"S{i}" for i in range(1, 7))


@pytest.fixture(scope="module")
def service(aero):
    return SchemaService(aero.registry)


def call(aero, service, tool, **args):
    return execute_tool(validate_call(ToolCall(tool, args), service), aero.star, aero.registry)


def test_twelve_tools():
    assert len(TOOL_NAMES) == 12 and set(TOOLS) == set(TOOL_NAMES)


def test_station_enum_is_projected(service):
    assert service.get("cycle_time_analysis").param("station_nid").enum == STATIONS
    assert len(service.get("ncr_root_cause_pareto").param("failure_code_nid").enum) == 24


def test_pharma_cardinalities_after_swap():
    registry = TemplateRegistry()
    load_template(registry, "aerospace")
    svc = SchemaService(registry)
    aero_chars = (svc.get("spc_violation_detection").param("characteristic_nid").enum)
    load_template(registry, "pharma")
    assert len(svc.get("ncr_root_cause_pareto").param("failure_code_nid").enum) == 27
    chars = svc.get("spc_violation_detection").param("characteristic_nid").enum
    assert chars == vocabulary_projection(registry).characteristics
    assert not set(chars) & set(aero_chars)


def test_out_of_vocabulary_station_rejected(service):
    with pytest.raises(ConstraintError) as exc:
        validate_call(ToolCall("cycle_time_analysis", {"station_nid": "BOND-1"}), service)
    assert exc.value.valid_set == STATIONS
    assert validate_call(ToolCall("first_pass_yield", {"station_nid": "S4"}), service).arguments["station_nid"] == "S4"


def test_near_miss_failure_code_rejected(service):
    enum = service.get("ncr_root_cause_pareto").param("failure_code_nid").enum
    assert "BND-VOID-001" in enum
    with pytest.raises(ConstraintError):
        validate_call(ToolCall("ncr_root_cause_pareto", {"failure_code_nid": "BOND-VOID-002"}), service)


def test_shape_errors(service):
    with pytest.raises(UnknownTool):
        validate_call(ToolCall("nope", {}), service)
    with pytest.raises(UnknownParameter):
        validate_call(ToolCall("cycle_time_analysis", {"station": "S1"}), service)
    with pytest.raises(MissingParameter):
        validate_call(ToolCall("material_genealogy", {}), service)
    with pytest.raises(ConstraintError):
        validate_call(ToolCall("material_genealogy", {"order_nid": "ORDER-7"}), service)
    with pytest.raises(ConstraintError):
        validate_call(ToolCall("ncr_root_cause_pareto", {"top_n": 0}), service)


def test_case_sensitive_membership(service):
    with pytest.raises(ConstraintError):
        validate_call(ToolCall("cycle_time_analysis", {"station_nid": "s1"}), service)


def test_unconstrained_admits_anything_shaped(service):
    vc = admit_unchecked(ToolCall("cycle_time_analysis", {"station_nid": "Line-1"}), service)
    assert not vc.enforced and vc.arguments["station_nid"] == "Line-1"


def test_pareto_counts_equal_store(aero, service):
    result = call(aero, service, "ncr_root_cause_pareto", station_nid="S1", time_range_days=30, top_n=100)
    want = sum(1 for n in aero.store.iter_rows("NonConformance") if n["station_nid"] == "S1")
    assert want > 0
    assert sum(r["count"] for r in result.records()) == want
    assert result.records()[-1]["cumulative_pct"] == pytest.approx(100.0)
    counts = [r["count"] for r in result.records()]
    assert counts == sorted(counts, reverse=True)


def test_fpy_weighted_identity(aero, service):
    result = call(aero, service, "first_pass_yield", group_by="day")
    passed = sum(r["passed"] for r in result.records())
    produced = sum(r["produced"] for r in result.records())
    weighted = sum(r["fpy"] * r["produced"] for r in result.records()) / produced
    assert weighted == pytest.approx(passed / produced, abs=1e-5)
    assert passed / produced == pytest.approx(aero.summary.kpis["fpy"], abs=1e-9)


def test_fpy_groupings_agree(aero, service):
    totals = set()
    for g in ("day", "week", "month"):
        rs = call(aero, service, "first_pass_yield", group_by=g).records()
        totals.add((sum(r["produced"] for r in rs), sum(r["passed"] for r in rs)))
    assert len(totals) == 1


def test_throughput_eight_per_day(aero, service):
    rows = call(aero, service, "production_status_summary").records()
    total = rows[-1]
    assert total["station_id"] == "(all)"
    assert total["throughput_per_day"] == pytest.approx(8.0, abs=0.5)


def test_oee_factors_bounded(aero, service):
    for r in call(aero, service, "oee_decomposition").records():
        for k in ("availability", "performance", "quality", "oee"):
            assert r[k] is None or 0.0 <= r[k] <= 1.0
        assert r["oee"] == pytest.approx(r["availability"] * r["performance"] * r["quality"], abs=1e-3)


def test_unknown_order_is_not_found(aero, service):
    with pytest.raises(NotFound):
        call(aero, service, "material_genealogy", order_nid="WO-999999")


def test_genealogy_for_real_order(aero, service):
    nid = next(o["nid"] for o in aero.store.iter_rows("WorkOrder") if o["state"] == "Complete")
    rows = call(aero, service, "material_genealogy", order_nid=nid).records()
    assert rows and all(r["work_order_nid"] == nid for r in rows)
    ops = {o["nid"] for o in aero.store.iter_rows("WorkOrderOperation") if o["work_order_nid"] == nid}
    consumed = [c for c in aero.store.iter_rows("ActualConsumedMaterial") if c["operation_nid"] in ops]
    assert len(rows) == len(consumed)


@pytest.mark.parametrize("tool", TOOL_NAMES)
def test_every_tool_runs_with_defaults(aero, service, tool):
    args = {}
    if tool == "material_genealogy":
        args = {"order_nid": aero.store.keys("WorkOrder")[0]}
    result = call(aero, service, tool, **args)
    assert result.tool == tool
    assert all(set(r) == set(result.columns) for r in result.records())


def test_stale_schema_after_swap():
    registry = TemplateRegistry()
    store = Store()
    run(RunConfig("aerospace", duration_days=2), registry, store)
    star = rebuild_from_registry(store, registry)
    svc = SchemaService(registry)
    vc = validate_call(ToolCall("cycle_time_analysis", {"station_nid": "S1"}), svc)
    load_template(registry, "pharma")
    with pytest.raises(StaleSchema):
        execute_tool(vc, star, registry)
    fresh = validate_call(ToolCall("cycle_time_analysis", {"station_nid": "S1"}), svc)
    with pytest.raises(StaleSchema):
        execute_tool(fresh, star, registry)


def test_constrained_render_lists_enum(service):
    doc = export_function_schemas(service.schemas(), constrained=True)
    cta = next(d for d in doc if d["function"]["name"] == "cycle_time_analysis")
    assert cta["function"]["parameters"]["properties"]["station_nid"]["enum"] == list(STATIONS)


def test_unconstrained_render_drops_enum(service):
    con = export_function_schemas(service.schemas(), constrained=True)
    unc = export_function_schemas(service.schemas(), constrained=False)
    for a, b in zip(con, unc):
        pa, pb = a["function"]["parameters"]["properties"], b["function"]["parameters"]["properties"]
        assert set(pa) == set(pb)
        for name, spec in pb.items():
            assert "enum" not in spec and "pattern" not in spec
            assert spec["type"] == pa[name]["type"]
    station = unc[0]["function"]["parameters"]["properties"]["station_nid"]
    assert station["type"] == "string"
