import itertools
import json
import math
import random
import statistics

import httpx
import pytest

from mesynth.domain.registry import TemplateRegistry, load_template
from mesynth.domain.vocabulary import vocabulary_projection
from mesynth.experiments.calibration import run_calibration, target_ranges
from mesynth.experiments.classify import (CORRECT, EMPTY_VALID, FABRICATED_CODE, GENERIC_IDENTIFIER,
                                          PLAUSIBLE_SYNONYM, REJECTED, TOOL_PARAM_FABRICATION, classify_outcome,
                                          fabrication_category, looks_like_identifier)
from mesynth.experiments.clients import ClientReply, ClientRequest, FuzzClient, HttpClient, TransportError
from mesynth.experiments.hallucination import (DOMAIN_ORDER, Environment, aggregate, breakdown, compare,
                                               load_corpus, render_summary, replay_client, run_hallucination)
from mesynth.experiments.kpis import KpiSet, extract_kpis
from mesynth.experiments.stats import cohens_h, fishers_exact, t_confidence_interval, wilson_ci
from mesynth.tools.schemas import export_function_schemas
from mesynth.tools.validation import ToolCall
from oracles import cohens_h_mp, fisher_bruteforce, wilson_mp
from support import simulate

T_975_9 = 2.2621571627982  # two-sided 95% Student t quantile, 9 degrees of freedom


@pytest.fixture(scope="module")
def projection():
    registry = TemplateRegistry()
    load_template(registry, "aerospace")
    return vocabulary_projection(registry)


@pytest.fixture(scope="module")
def corpus():
    return load_corpus()


@pytest.fixture(scope="module")
def envs(corpus):
    return {tid: Environment.build(tid, corpus.seed, corpus.days, corpus.profile) for tid in corpus.template_ids}


# ---- statistics ------------------------------------------------------------------------------

def test_fisher_exhaustive_small_tables():
    for n in range(1, 21):
        for a, b, c in itertools.product(range(n + 1), repeat=3):
            d = n - a - b - c
            if d < 0:
                continue
            assert fishers_exact(a, b, c, d) == pytest.approx(float(fisher_bruteforce(a, b, c, d)), abs=1e-12)


def test_fisher_random_larger_tables():
    rng = random.Random(5)
    for _ in range(200):
        a, b, c, d = (rng.randint(0, 60) for _ in range(4))
        want = float(fisher_bruteforce(a, b, c, d))
        assert fishers_exact(a, b, c, d) == pytest.approx(want, rel=1e-9, abs=1e-300)


def test_fisher_rejects_negative():
    with pytest.raises(ValueError):
        fishers_exact(-1, 2, 3, 4)


def test_wilson_matches_high_precision():
    for k, n in [(0, 1), (1, 1), (3, 10), (31, 72), (72, 72), (500, 1000)]:
        assert wilson_ci(k, n) == pytest.approx(wilson_mp(k, n), abs=1e-12)
    with pytest.raises(ValueError):
        wilson_ci(5, 4)
    with pytest.raises(ValueError):
        wilson_ci(0, 0)


def test_cohens_h_properties():
    assert cohens_h(0.5, 0.5) == 0.0
    assert cohens_h(1.0, 0.0) == pytest.approx(math.pi)
    assert cohens_h(0.2, 0.6) == pytest.approx(-cohens_h(0.6, 0.2))
    assert cohens_h(0.37, 0.12) == pytest.approx(cohens_h_mp(0.37, 0.12), abs=1e-12)
    with pytest.raises(ValueError):
        cohens_h(1.2, 0.0)


def test_t_interval_against_table_quantile():
    xs = [0.951, 0.947, 0.944, 0.955, 0.949, 0.946, 0.952, 0.950, 0.943, 0.953]
    ci = t_confidence_interval(xs)
    assert ci.t_crit == pytest.approx(T_975_9, abs=1e-9)
    half = T_975_9 * statistics.stdev(xs) / math.sqrt(10)
    assert (ci.lo, ci.hi) == pytest.approx((statistics.fmean(xs) - half, statistics.fmean(xs) + half), abs=1e-12)


def test_t_interval_small_n():
    one = t_confidence_interval([0.9])
    assert one.insufficient_n and one.lo is None and one.mean == 0.9
    assert t_confidence_interval([]).mean is None


# ---- classification --------------------------------------------------------------------------

@pytest.mark.parametrize("value, category", [
    ("CNC-Machining", PLAUSIBLE_SYNONYM),
    ("Line-1", GENERIC_IDENTIFIER),
    ("Station-A", GENERIC_IDENTIFIER),
    ("Cell-3", GENERIC_IDENTIFIER),
    ("BOND-1", FABRICATED_CODE),
])
def test_station_categories(projection, value, category):
    cls = classify_outcome("cycle_time_analysis", {"station_nid": value}, projection, row_count=0)
    assert cls.outcome == TOOL_PARAM_FABRICATION and cls.category == category


def test_supplier_near_miss_is_fabricated_code(projection):
    assert "SUP-CF-TORAY-01" in projection.suppliers
    cls = classify_outcome("supplier_performance", {"supplier_code": "SUP-TORAY-02"}, projection, row_count=0)
    assert cls.category == FABRICATED_CODE and cls.schema_mismatch


def test_valid_calls_classified_by_rows(projection):
    assert classify_outcome("cycle_time_analysis", {"station_nid": "S1"}, projection, 5).outcome == CORRECT
    assert classify_outcome("cycle_time_analysis", {"station_nid": "S1"}, projection, 0).outcome == EMPTY_VALID
    assert classify_outcome("cycle_time_analysis", {"station_nid": "S1"}, projection, None).outcome == REJECTED


def test_missing_run_identifier_is_fabrication(projection):
    cls = classify_outcome("material_genealogy", {"order_nid": "WO-999"}, projection, 0,
                           missing=frozenset({"order_nid"}))
    assert cls.outcome == TOOL_PARAM_FABRICATION


def test_state_spelling_is_synonym():
    assert fabrication_category("in_progress", ("InProgress", "Closed"), {}) == PLAUSIBLE_SYNONYM
    assert looks_like_identifier("SUP-X-01") and not looks_like_identifier("hello world")


# ---- replay experiment -----------------------------------------------------------------------

def test_corpus_shape(corpus):
    assert len(corpus.queries) == 72 and len(corpus.template_ids) == 6
    assert all(len(corpus.for_template(t)) == 12 for t in corpus.template_ids)
    assert len({q.id for q in corpus.queries}) == 72


def test_replay_breakdowns(corpus, envs):
    records = run_hallucination(corpus, replay_client(corpus), "unconstrained", environments=envs)
    agg = aggregate(records)
    assert sum(agg.categories.values()) == agg.fabrications == 31
    assert set(agg.categories) <= {PLAUSIBLE_SYNONYM, GENERIC_IDENTIFIER, FABRICATED_CODE}
    by_template = breakdown(records, "template_id")
    assert sum(r.fabricated for r in by_template) == 31 and all(r.queries == 12 for r in by_template)
    by_domain = breakdown(records, "domain")
    assert [r.label for r in by_domain] == list(DOMAIN_ORDER)
    assert sum(r.queries for r in by_domain) == 72
    text = render_summary([agg], records)
    assert "unconstrained" in text and "31 (43%)" in text


def test_constrained_replay_all_valid(corpus, envs):
    records = run_hallucination(corpus, replay_client(corpus), "constrained", environments=envs)
    agg = aggregate(records)
    assert agg.fabrications == 0 and agg.rejected == 0
    assert agg.empty + agg.correct == 72


def test_comparison_stats(corpus, envs):
    client = replay_client(corpus)
    con = aggregate(run_hallucination(corpus, client, "constrained", environments=envs))
    unc = aggregate(run_hallucination(corpus, client, "unconstrained", environments=envs))
    stats = compare(con, unc)
    assert stats.table == (0, 72, 31, 41)
    assert stats.cohens_h == pytest.approx(1.431, abs=5e-4)
    assert stats.wilson_constrained[1] == pytest.approx(0.0507, abs=1e-3)


class _Silent:
    name = "silent"

    def complete(self, request):
        return ClientReply(None, "I cannot answer that.")


class _Broken:
    name = "broken"

    def complete(self, request):
        raise TransportError("connection reset")


class _Bogus:
    name = "bogus"

    def complete(self, request):
        return ClientReply(ToolCall("cycle_time_analysis", {"station_nid": "Line-1"}, request.condition))


def test_no_call_and_transport_errors(corpus, envs):
    silent = aggregate(run_hallucination(corpus, _Silent(), "unconstrained", ["aerospace"], envs))
    assert silent.no_call == 12 and silent.queries == 12 and silent.fabrications == 0
    broken = aggregate(run_hallucination(corpus, _Broken(), "unconstrained", ["aerospace"], envs))
    assert broken.transport_errors == 12 and broken.queries == 0


def test_constrained_fabrication_never_executes(corpus, envs):
    records = run_hallucination(corpus, _Bogus(), "constrained", ["aerospace"], envs)
    assert all(r.outcome == REJECTED and r.row_count is None for r in records)
    records = run_hallucination(corpus, _Bogus(), "unconstrained", ["aerospace"], envs)
    assert all(r.outcome == TOOL_PARAM_FABRICATION and r.row_count is not None for r in records)
    assert {r.fabrication_category for r in records} == {GENERIC_IDENTIFIER}


def test_fuzz_client_is_always_out_of_vocabulary(envs):
    env = envs["aerospace"]
    client = FuzzClient(seed=1)
    members = env.projection.members()
    tools = tuple(export_function_schemas(env.service.schemas(), constrained=True))
    for i in range(500):
        call = client.complete(ClientRequest(f"q{i}", "aerospace", "constrained", (), tools)).call
        assert any(isinstance(v, str) and v not in members for v in call.arguments.values())


# ---- http client -----------------------------------------------------------------------------

def _http(handler):
    return HttpClient("http://model.test/v1", "test-model", api_key="k", transport=httpx.MockTransport(handler))


def test_http_client_parses_tool_call():
    seen = {}

    def handler(request):
        seen["body"] = json.loads(request.content)
        seen["auth"] = request.headers["authorization"]
        return httpx.Response(200, json={"choices": [{"message": {"content": None, "tool_calls": [
            {"function": {"name": "first_pass_yield", "arguments": '{"station_nid": "S4"}'}}]}}]})

    client = _http(handler)
    req = ClientRequest("q1", "aerospace", "constrained", ({"role": "user", "content": "FPY at S4?"},), ())
    reply = client.complete(req)
    assert reply.call == ToolCall("first_pass_yield", {"station_nid": "S4"}, "constrained")
    assert seen["body"]["temperature"] == 0 and seen["body"]["model"] == "test-model"
    assert seen["auth"] == "Bearer k"


def test_http_client_text_reply_and_errors():
    text = _http(lambda r: httpx.Response(200, json={"choices": [{"message": {"content": "no tool"}}]}))
    req = ClientRequest("q1", "aerospace", "constrained", (), ())
    assert text.complete(req).call is None
    for handler in (lambda r: httpx.Response(500),
                    lambda r: httpx.Response(200, json={"choices": []}),
                    lambda r: httpx.Response(200, json={"choices": [{"message": {"tool_calls": [
                        {"function": {"name": "x", "arguments": "{broken"}}]}}]})):
        with pytest.raises(TransportError):
            _http(handler).complete(req)


def test_http_client_needs_endpoint(monkeypatch):
    monkeypatch.delenv("MESYNTH_LLM_ENDPOINT", raising=False)
    monkeypatch.delenv("MESYNTH_LLM_MODEL", raising=False)
    with pytest.raises(ValueError):
        HttpClient()


# ---- kpis and calibration --------------------------------------------------------------------

def test_kpis_from_run(aero):
    k = extract_kpis(aero.summary, aero.store)
    assert k.throughput == pytest.approx(aero.store.count("WorkOrder") / aero.summary.operating_days)
    passed = sum(p for p, _ in k.gate_counts.values())
    failed = sum(f for _, f in k.gate_counts.values())
    assert k.fpy == pytest.approx(passed / (passed + failed))
    assert failed == aero.store.count("NonConformance")


@pytest.mark.parametrize("tid", ["aerospace", "pharma", "automotive"])
def test_station_fpy_within_binomial_error(tid):
    """Configured gate FPY lies inside a 99.9% Wilson interval of each station's pooled gate counts."""
    r = simulate(tid)
    k = extract_kpis(r.summary, r.store)
    stations = r.registry.active.stations
    assert k.gate_counts
    for sid, (passed, failed) in k.gate_counts.items():
        lo, hi = wilson_ci(passed, passed + failed, z=3.29)
        assert lo <= stations[sid].first_pass_yield <= hi, (sid, passed, failed)


def test_targets_from_template():
    registry = TemplateRegistry()
    load_template(registry, "aerospace")
    t = target_ranges(registry.active)
    assert t["fpy"] == (0.94, 0.97)
    assert t["throughput"][0] < 8.0 < t["throughput"][1]
    assert t["ncr_rate"][0] < 0.051 < t["ncr_rate"][1]


def _fake(values):
    def simulate(tid, seed, days, profile):
        if seed == 13:
            raise RuntimeError("boom")
        v = values[seed]
        return KpiSet(v, {"S1": v}, {"S1": (1, 0)}, 8.0, 0.05)
    return simulate


def test_calibration_single_seed_is_flagged():
    report = run_calibration(["aerospace"], seeds=[1], simulate=_fake({1: 0.95}))
    cell = report.cell("aerospace", "fpy")
    assert cell.insufficient_n and cell.strictly_within is None
    assert not report.all_within


def test_calibration_isolates_failing_seed():
    values = {s: 0.95 + 0.001 * (s % 3) for s in range(10, 20)}
    report = run_calibration(["aerospace"], seeds=range(10, 20), simulate=_fake(values))
    assert list(report.failures) == ["aerospace/13"]
    cell = report.cell("aerospace", "fpy")
    assert cell.ci.n == 9 and 13 not in cell.seeds
    assert cell.strictly_within
    assert "aerospace" in report.render()
