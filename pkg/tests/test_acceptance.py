"""Acceptance criteria 1-10. The terminal summary prints one PASS/FAIL line per criterion."""

from __future__ import annotations

import filecmp
import math
import random
import statistics
import time
from fractions import Fraction

import pytest

from mesynth.domain.registry import TemplateRegistry, available_templates, load_template
from mesynth.domain.vocabulary import vocabulary_projection
from mesynth.experiments.calibration import run_calibration
from mesynth.experiments.classify import (
    FABRICATED_CODE, GENERIC_IDENTIFIER, PLAUSIBLE_SYNONYM, TOOL_PARAM_FABRICATION,
    classify_outcome)
from mesynth.experiments.clients import FuzzClient
from mesynth.experiments.hallucination import Environment, aggregate, load_corpus, replay_client, run_fuzz, \
    run_hallucination
from mesynth.experiments.stats import cohens_h, fishers_exact, wilson_ci
from mesynth.lake.lakehouse import SEQ_FIELD, Lakehouse
from mesynth.lake.sync import CRASH_POINTS, SimulatedCrash, recover, sync_cycle
from mesynth.sim.accumulator import FractionalAccumulator, next_daily_quantity
from mesynth.sim.engine import RunConfig, run
from mesynth.star.builder import export_star, rebuild_from_registry
from mesynth.store.catalog import APPEND_ONLY_TABLES, MUTABLE_TABLES
from mesynth.store.store import Store
from mesynth.tools.execute import execute_tool
from mesynth.tools.schemas import SchemaService
from mesynth.tools.validation import ToolCall, validate_call
from oracles import (bresenham_totals, cohens_h_mp, discrete_uniform_ks, fisher_bruteforce, referential_audit,
                     wilson_mp)
from support import simulate

ALL = available_templates()


def fresh_run(tid: str, days: int = 30, seed: int = 42, profile: str = "stable"):
    registry, store = TemplateRegistry(), Store()
    summary = run(RunConfig(tid, duration_days=days, seed=seed, profile=profile), registry, store)
    return registry, store, summary


# ---- 1. determinism --------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_identical_event_streams_and_star_exports(tmp_path):
    outputs = []
    for i in range(2):
        started = time.perf_counter()
        registry, store, _ = fresh_run("aerospace")
        elapsed = time.perf_counter() - started
        assert elapsed <= 60.0
        d = tmp_path / f"run{i}"
        export_star(rebuild_from_registry(store, registry), d / "star")
        store.export_snapshot(d / "store")
        outputs.append((store.journal_lines(), d))
    (events_a, dir_a), (events_b, dir_b) = outputs
    assert events_a and events_a == events_b
    for sub in ("star", "store"):
        names = sorted(p.name for p in (dir_a / sub).iterdir())
        assert names == sorted(p.name for p in (dir_b / sub).iterdir())
        match, mismatch, errors = filecmp.cmpfiles(dir_a / sub, dir_b / sub, names, shallow=False)
        assert not mismatch and not errors and len(match) == len(names)


# ---- 2. calibration --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def calibration():
    return run_calibration(ALL, seeds=range(42, 52), days=30, profile="stable")


@pytest.mark.criterion(2)
@pytest.mark.slow
@pytest.mark.parametrize("tid", ["aerospace", "pharma"])
def test_calibration_primary_templates(calibration, tid):
    for kpi in ("fpy", "throughput", "ncr_rate"):
        cell = calibration.cell(tid, kpi)
        assert cell.ci.n == 10
        assert cell.ci.t_crit == pytest.approx(2.262, abs=5e-4)
        assert cell.strictly_within, (tid, kpi, cell.target, cell.ci)


@pytest.mark.criterion(2)
@pytest.mark.slow
def test_calibration_all_eighteen_cells(calibration):
    assert not calibration.failures
    bad = [(c.template_id, c.kpi) for c in calibration.cells if not c.strictly_within]
    assert len(calibration.cells) == 18 and not bad


@pytest.mark.criterion(2)
@pytest.mark.slow
def test_calibration_aerospace_levels(calibration):
    fpy = calibration.cell("aerospace", "fpy").ci
    assert abs(fpy.mean - 0.949) <= 0.008
    assert calibration.cell("aerospace", "throughput").ci.mean == pytest.approx(8.0, abs=0.3)
    assert calibration.cell("aerospace", "ncr_rate").ci.mean == pytest.approx(0.051, abs=0.007)


# ---- 3. volume envelope ----------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_aerospace_volume_envelope(aero):
    s = aero.store
    assert 216 <= s.count("WorkOrder") <= 264
    assert 1296 <= s.count("WorkOrderOperation") <= 1584
    assert 70 <= s.count("NonConformance") <= 85
    assert 400 <= aero.summary.seed_rows <= 600


# ---- 4. fractional accumulation --------------------------------------------------------------

def _emit(volume: int, days: int, window: int) -> list[int]:
    acc = FractionalAccumulator.for_volume(volume, days)
    out = []
    for _ in range(window):
        n, acc = next_daily_quantity(acc)
        out.append(n)
    return out


@pytest.mark.criterion(4)
def test_rate_three_point_four():
    counts = _emit(850, 250, 250)
    assert sum(counts) == 850
    assert set(counts) == {3, 4}
    assert counts[:5] == [3, 3, 4, 3, 4]


@pytest.mark.criterion(4)
def test_thousand_random_pairs_match_rational_oracle():
    rng = random.Random(20240601)
    for _ in range(1000):
        volume = rng.randint(0, 50_000)
        days = rng.randint(1, 366)
        got = _emit(volume, days, days)
        assert got == bresenham_totals(volume, days, days)
        assert sum(got) == volume
        rate = Fraction(volume, days)
        assert set(got) <= {math.floor(rate), math.ceil(rate)}


# ---- 5. statistics ---------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_fisher_matches_bruteforce_oracle():
    oracle = float(fisher_bruteforce(0, 72, 31, 41))
    assert fishers_exact(0, 72, 31, 41) == pytest.approx(oracle, rel=1e-9)


@pytest.mark.criterion(5)
def test_fisher_published_value():
    assert fishers_exact(0, 72, 31, 41) == pytest.approx(1.07e-12, rel=0.10)


@pytest.mark.criterion(5)
def test_wilson_intervals():
    lo, hi = wilson_ci(0, 72)
    assert lo == pytest.approx(0.0, abs=1e-3) and hi == pytest.approx(0.0507, abs=1e-3)
    lo, hi = wilson_ci(31, 72)
    assert lo == pytest.approx(0.323, abs=1e-3) and hi == pytest.approx(0.546, abs=1e-3)
    for k, n in ((0, 72), (31, 72)):
        assert wilson_ci(k, n) == pytest.approx(wilson_mp(k, n), abs=1e-12)


@pytest.mark.criterion(5)
def test_cohens_h_formula():
    h = cohens_h(31 / 72, 0.0)
    assert h == pytest.approx(cohens_h_mp(Fraction(31, 72), 0), abs=1e-6)
    assert h == pytest.approx(1.431, abs=5e-4)


# ---- 6. architectural guarantee --------------------------------------------------------------

@pytest.fixture(scope="module")
def environments():
    corpus = load_corpus()
    return {tid: Environment.build(tid, corpus.seed, corpus.days, corpus.profile) for tid in corpus.template_ids}


@pytest.mark.criterion(6)
def test_fuzz_calls_all_rejected_before_execution(environments):
    report = run_fuzz(environments["aerospace"], FuzzClient(seed=7), n=10_000)
    assert report.calls == 10_000
    assert report.rejected == 10_000
    assert report.executed == 0 and report.executed_fabrications == 0


@pytest.mark.criterion(6)
def test_replay_reproduces_published_outcomes(environments):
    corpus = load_corpus()
    client = replay_client(corpus)
    unc = aggregate(run_hallucination(corpus, client, "unconstrained", environments=environments))
    con = aggregate(run_hallucination(corpus, client, "constrained", environments=environments))
    assert (unc.queries, unc.fabrications, unc.empty, unc.correct) == (72, 31, 27, 14)
    assert (con.queries, con.fabrications) == (72, 0)


@pytest.mark.criterion(6)
def test_exemplar_categories(environments):
    projection = environments["aerospace"].projection
    cases = [
        ("cycle_time_analysis", {"station_nid": "CNC-Machining"}, PLAUSIBLE_SYNONYM),
        ("cycle_time_analysis", {"station_nid": "Line-1"}, GENERIC_IDENTIFIER),
        ("ncr_root_cause_pareto", {"failure_code_nid": "BOND-VOID-002"}, FABRICATED_CODE),
    ]
    for tool, args, category in cases:
        cls = classify_outcome(tool, args, projection, row_count=0)
        assert cls.outcome == TOOL_PARAM_FABRICATION
        assert cls.category == category, (args, cls.category)


# ---- 7. CDC exactly-once ---------------------------------------------------------------------

def lake_equals_store(store: Store, lake: Lakehouse) -> bool:
    for table in MUTABLE_TABLES + APPEND_ONLY_TABLES:
        records = lake.read_snapshot(table)
        latest: dict[str, dict] = {}
        for r in sorted(records, key=lambda r: r.get(SEQ_FIELD) or 0):
            latest[r["nid"]] = r
        want = {r["nid"] for r in store.iter_rows(table)}
        if table in APPEND_ONLY_TABLES:
            keys = [r["nid"] for r in records]
            if len(keys) != len(set(keys)) or set(keys) != want:
                return False
        else:
            live = {k for k, r in latest.items() if not r.get("_deleted")}
            if live != want:
                return False
            for k in want:
                row = {c: v for c, v in latest[k].items() if not c.startswith("_")}
                if row != store.get(table, k):
                    return False
    return True


@pytest.mark.criterion(7)
def test_shared_created_on_across_sync_boundary(tmp_path):
    store = Store()
    run(RunConfig("aerospace", duration_days=1, seed=42), TemplateRegistry(), store)
    lake = Lakehouse(tmp_path / "lake")
    state = recover(lake)
    sync_cycle(store, lake, state)
    boundary = max(r["created_on"] for r in store.iter_rows("EquipmentEvent"))
    template = next(r for r in store.iter_rows("EquipmentEvent") if r["created_on"] == boundary)
    late = {k: v for k, v in template.items() if k not in ("created_on", "modified_on")}
    late["nid"] = "EE-LATE-1"
    store.insert_batch([("EquipmentEvent", late)], at=boundary)
    report = sync_cycle(store, lake, state)
    assert report.dedup_drops >= 1
    assert report.rows.get("EquipmentEvent") == 1
    synced = [r["nid"] for r in lake.read_snapshot("EquipmentEvent")]
    assert "EE-LATE-1" in synced and len(synced) == len(set(synced))
    assert lake_equals_store(store, lake)


@pytest.mark.criterion(7)
@pytest.mark.slow
def test_hundred_random_crash_schedules(tmp_path):
    crashes = 0
    for schedule in range(100):
        rng = random.Random(schedule)
        lake = Lakehouse(tmp_path / f"lake{schedule}")
        store = Store()
        box = {"state": recover(lake)}
        interval = rng.choice([60, 180, 480])
        crash_prob = rng.uniform(0.2, 0.6)

        def hook(t: int) -> None:
            if t == 0 or t % interval:
                return
            crash = None
            if rng.random() < crash_prob:
                point = rng.choice(CRASH_POINTS)
                victims = rng.sample(list(MUTABLE_TABLES + APPEND_ONLY_TABLES), rng.randint(1, 4))

                def crash(p: str, table: str) -> None:
                    if p == point and table in victims:
                        raise SimulatedCrash(f"{p}:{table}")
            try:
                sync_cycle(store, lake, box["state"], crash)
            except Exception:
                box["crashed"] = box.get("crashed", 0) + 1
                box["state"] = recover(lake)  # process restart: in-memory state is lost

        run(RunConfig("aerospace", duration_days=rng.choice([1, 2]), seed=schedule), TemplateRegistry(), store, hook)
        sync_cycle(store, lake, box["state"])
        assert lake_equals_store(store, lake), f"schedule {schedule}"
        crashes += box.get("crashed", 0)
    assert crashes >= 100


# ---- 8. template swap ------------------------------------------------------------------------

@pytest.mark.criterion(8)
def test_swap_exposes_new_vocabulary_without_stale_values():
    registry = TemplateRegistry()
    load_template(registry, "aerospace")
    service = SchemaService(registry)
    aero_codes = set(vocabulary_projection(registry).failure_codes)
    assert len(service.get("ncr_root_cause_pareto").param("failure_code_nid").enum) == 24
    load_template(registry, "pharma")
    projection = vocabulary_projection(registry)
    members = projection.members()
    codes = service.get("ncr_root_cause_pareto").param("failure_code_nid").enum
    assert len(codes) == 27 and set(codes) == set(projection.failure_codes)
    stale = [v for s in service.schemas() for p in s.parameters if p.enum for v in p.enum if v not in members]
    assert stale == []
    assert not (set(codes) & aero_codes)
    assert all(s.template_id == "pharma" and s.template_version == registry.version for s in service.schemas())


@pytest.mark.criterion(8)
def test_fct_quality_station_counts_after_swap():
    registry = TemplateRegistry()
    load_template(registry, "aerospace")
    store = Store()
    run(RunConfig("pharma", duration_days=30, seed=42), registry, store)
    assert registry.template_id == "pharma"
    star = rebuild_from_registry(store, registry)
    want: dict[str, int] = {}
    for ncr in store.iter_rows("NonConformance"):
        op = store.get("WorkOrderOperation", ncr["operation_nid"])
        want[op["station_nid"]] = want.get(op["station_nid"], 0) + 1
    got: dict[str, int] = {}
    for row in star["FctQuality"]:
        got[row["station_id"]] = got.get(row["station_id"], 0) + 1
    assert got == want and sum(want.values()) == store.count("NonConformance") > 0


# ---- 9. data quality -------------------------------------------------------------------------

@pytest.mark.criterion(9)
@pytest.mark.parametrize("tid", ALL)
def test_referential_integrity_and_required_fields(tid):
    dangling, nulls = referential_audit(simulate(tid).store)
    assert dangling == [] and nulls == []


@pytest.mark.criterion(9)
@pytest.mark.parametrize("tid", ALL)
def test_cycle_times_uniform_per_station(tid):
    r = simulate(tid)
    samples: dict[str, list[int]] = {}
    for op in r.store.iter_rows("WorkOrderOperation"):
        if op["cycle_time"] is not None:
            samples.setdefault(op["station_nid"], []).append(op["cycle_time"])
    rejected = {}
    for sid, xs in sorted(samples.items()):
        lo, hi = r.registry.active.stations[sid].cycle_time_range_min
        assert all(lo <= x <= hi for x in xs)
        _, p = discrete_uniform_ks(xs, lo, hi)
        if p < 0.05:
            rejected[sid] = round(p, 4)
    assert rejected == {}, f"KS rejects uniform at alpha=0.05 for {rejected}"


# ---- 10. performance -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def ninety_day():
    return simulate("aerospace", days=90)


@pytest.mark.criterion(10)
@pytest.mark.slow
def test_rebuild_ninety_days_under_two_seconds(ninety_day):
    assert 45_000 <= ninety_day.store.total_rows() <= 54_000
    timings = []
    for _ in range(3):
        started = time.perf_counter()
        star = rebuild_from_registry(ninety_day.store, ninety_day.registry)
        timings.append(time.perf_counter() - started)
    assert len(star.tables) == 23
    assert min(timings) <= 2.0


TOOL_CALLS = [
    ("cycle_time_analysis", {"station_nid": "S1"}),
    ("first_pass_yield", {"station_nid": "S4", "group_by": "week"}),
    ("oee_decomposition", {"station_nid": "S2"}),
    ("ncr_root_cause_pareto", {"station_nid": "S1", "time_range_days": 30}),
    ("spc_violation_detection", {"station_nid": "S1"}),
    ("quality_action_status", {"status_filter": "Open"}),
    ("material_genealogy", {"order_nid": "WO-001"}),
    ("supplier_performance", {"supplier_code": "SUP-AL-ALCOA-01"}),
    ("change_impact_analysis", {"time_range_days": 90}),
    ("engineering_change_velocity", {"time_range_days": 90}),
    ("equipment_downtime_analysis", {"station_nid": "S5"}),
    ("production_status_summary", {"program_code": "787"}),
]


@pytest.mark.criterion(10)
@pytest.mark.slow
def test_tool_median_latency(ninety_day):
    star, registry = ninety_day.star, ninety_day.registry
    service = SchemaService(registry)
    latencies = []
    for tool, args in TOOL_CALLS:
        vc = validate_call(ToolCall(tool, args), service)
        for _ in range(5):
            started = time.perf_counter()
            execute_tool(vc, star, registry)
            latencies.append(time.perf_counter() - started)
    assert statistics.median(latencies) <= 0.050
