"""Controlled tool-parameter fabrication experiment.

Each template gets a fresh simulated run, star schema and conversation. Every
query is sent once with either the constrained render (enums and patterns)
or the unconstrained render (free text) of the tool schemas. Constrained
calls pass through validation before execution; unconstrained calls are
executed as given. Outcomes are classified by :mod:`.classify`.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Any, Iterable, Optional, Sequence

from ..domain.registry import TemplateRegistry, load_template
from ..domain.vocabulary import VocabularyProjection, vocabulary_projection
from ..sim.engine import RunConfig, run
from ..star.builder import StarSchema, rebuild_from_registry
from ..store.store import Store
from ..tools.execute import NotFound, execute_tool
from ..tools.schemas import TOOL_DOMAINS, SchemaService, export_function_schemas
from ..tools.validation import ToolCall, ToolCallError, admit_unchecked, validate_call
from .classify import (
    CORRECT,
    EMPTY_VALID,
    REJECTED,
    TOOL_PARAM_FABRICATION,
    TRANSPORT_ERROR,
    classify_outcome,
    invalid_identifiers,
)
from .clients import ClientRequest, ModelClient, ReplayClient, TransportError
from .stats import cohens_h, fishers_exact, wilson_ci

CONDITIONS = ("constrained", "unconstrained")
NO_CALL = "no_call"
DOMAIN_ORDER = ("Production", "Quality", "Materials", "Eng. Change", "Operations")
SYSTEM_PROMPT = ("You are a manufacturing analytics assistant. Answer the engineer's question by calling "
                 "exactly one of the available tools.")


@dataclass(frozen=True)
class Query:
    id: str
    template_id: str
    tool: str
    text: str
    expected: dict
    unconstrained: Optional[dict]  # recorded {"tool", "arguments"} for the replay client

    @property
    def domain(self) -> str:
        return TOOL_DOMAINS[self.tool]


@dataclass(frozen=True)
class QueryCorpus:
    seed: int
    days: int
    profile: str
    queries: tuple[Query, ...]

    def for_template(self, template_id: str) -> list[Query]:
        return [q for q in self.queries if q.template_id == template_id]

    @property
    def template_ids(self) -> list[str]:
        return list(dict.fromkeys(q.template_id for q in self.queries))

    def replay(self) -> dict[str, dict[str, Any]]:
        return {
            "constrained": {q.id: {"tool": q.tool, "arguments": q.expected} for q in self.queries},
            "unconstrained": {q.id: q.unconstrained for q in self.queries},
        }


def load_corpus(path: str | None = None) -> QueryCorpus:
    if path is None:
        text = resources.files("mesynth.experiments").joinpath("data/queries.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    doc = json.loads(text)
    queries = tuple(Query(q["id"], q["template_id"], q["tool"], q["text"], q["expected"], q.get("unconstrained"))
                    for q in doc["queries"])
    return QueryCorpus(doc["seed"], doc["days"], doc["profile"], queries)


def replay_client(corpus: QueryCorpus | None = None) -> ReplayClient:
    return ReplayClient((corpus or load_corpus()).replay())


@dataclass
class Environment:
    """One template's run: registry, schema service, star and vocabulary projection."""

    template_id: str
    registry: TemplateRegistry
    service: SchemaService
    star: StarSchema
    projection: VocabularyProjection

    @classmethod
    def build(cls, template_id: str, seed: int = 42, days: int = 30, profile: str = "stable") -> "Environment":
        registry = TemplateRegistry()
        load_template(registry, template_id)
        store = Store()
        run(RunConfig(template_id, duration_days=days, seed=seed, profile=profile), registry, store)
        star = rebuild_from_registry(store, registry)
        return cls(template_id, registry, SchemaService(registry), star, vocabulary_projection(registry))


@dataclass(frozen=True)
class OutcomeRecord:
    query_id: str
    template_id: str
    tool: str
    domain: str
    query: str
    condition: str
    call: Optional[dict]
    outcome: str
    schema_mismatch: bool = False
    fabrication_category: Optional[str] = None
    fabricated: tuple[tuple[str, str], ...] = field(default=())  # (parameter, value)
    row_count: Optional[int] = None
    error: Optional[str] = None

    @property
    def counted(self) -> bool:
        return self.outcome != TRANSPORT_ERROR

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fabricated"] = [list(x) for x in self.fabricated]
        return d


def evaluate_call(env: Environment, tool: str, arguments: dict, condition: str) -> tuple:
    """Validate (constrained) or admit (unconstrained), execute and classify. Returns (classification, rows, error)."""
    call = ToolCall(tool, arguments, condition)
    try:
        vc = validate_call(call, env.service) if condition == "constrained" else admit_unchecked(call, env.service)
    except ToolCallError as exc:
        return classify_outcome(tool, arguments, env.projection, None), None, str(exc)
    missing: frozenset[str] = frozenset()
    try:
        rows = len(execute_tool(vc, env.star, env.registry))
    except NotFound as exc:
        rows, missing = 0, frozenset({exc.what})
    return classify_outcome(tool, arguments, env.projection, rows, missing), rows, None


def run_hallucination(corpus: QueryCorpus, client: ModelClient, condition: str,
                      templates: Sequence[str] | None = None,
                      environments: dict[str, Environment] | None = None) -> list[OutcomeRecord]:
    if condition not in CONDITIONS:
        raise ValueError(f"condition must be one of {CONDITIONS}")
    envs = environments if environments is not None else {}
    records: list[OutcomeRecord] = []
    for tid in templates or corpus.template_ids:
        env = envs.get(tid)
        if env is None:
            env = envs[tid] = Environment.build(tid, corpus.seed, corpus.days, corpus.profile)
        tools_doc = tuple(export_function_schemas(env.service.schemas(), constrained=condition == "constrained"))
        # fresh conversation per template
        messages: list[dict] = [{"role": "system", "content": SYSTEM_PROMPT}]
        for q in corpus.for_template(tid):
            messages.append({"role": "user", "content": q.text})
            base = dict(query_id=q.id, template_id=tid, tool=q.tool, domain=q.domain, query=q.text,
                        condition=condition)
            try:
                reply = client.complete(ClientRequest(q.id, tid, condition, tuple(messages), tools_doc))
            except TransportError as exc:
                records.append(OutcomeRecord(**base, call=None, outcome=TRANSPORT_ERROR, error=str(exc)))
                messages.pop()
                continue
            if reply.call is None:
                records.append(OutcomeRecord(**base, call=None, outcome=NO_CALL, error=reply.text or None))
                messages.append({"role": "assistant", "content": reply.text})
                continue
            args = dict(reply.call.arguments)
            cls, rows, err = evaluate_call(env, reply.call.tool, args, condition)
            outcome = cls.outcome
            # a constrained call that fails validation never reaches execution, so it is a rejection
            if err is not None and (condition == "constrained" or outcome != TOOL_PARAM_FABRICATION):
                outcome = REJECTED
            records.append(OutcomeRecord(
                **base, call={"tool": reply.call.tool, "arguments": args}, outcome=outcome,
                schema_mismatch=cls.schema_mismatch if outcome == TOOL_PARAM_FABRICATION else False,
                fabrication_category=cls.category if outcome == TOOL_PARAM_FABRICATION else None,
                fabricated=tuple((f.parameter, str(f.value)) for f in cls.fabrications),
                row_count=rows, error=err))
            messages.append({"role": "assistant",
                             "content": f"{reply.call.tool}({json.dumps(args, sort_keys=True)}) -> "
                                        f"{'error: ' + err if err else str(rows) + ' rows'}"})
    return records


# ---- aggregation -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Aggregate:
    condition: str
    queries: int
    fabrications: int
    empty: int
    correct: int
    rejected: int
    no_call: int
    transport_errors: int
    categories: dict[str, int]

    @property
    def fabrication_rate(self) -> float:
        return self.fabrications / self.queries if self.queries else 0.0


def aggregate(records: Iterable[OutcomeRecord]) -> Aggregate:
    recs = list(records)
    condition = recs[0].condition if recs else ""
    c = Counter(r.outcome for r in recs)
    cats = Counter(r.fabrication_category for r in recs if r.outcome == TOOL_PARAM_FABRICATION)
    return Aggregate(condition, sum(1 for r in recs if r.counted), c[TOOL_PARAM_FABRICATION], c[EMPTY_VALID],
                     c[CORRECT], c[REJECTED], c[NO_CALL], c[TRANSPORT_ERROR], dict(sorted(cats.items())))


@dataclass(frozen=True)
class BreakdownRow:
    label: str
    queries: int
    fabricated: int
    ci: tuple[float, float]

    @property
    def rate(self) -> float:
        return self.fabricated / self.queries if self.queries else 0.0


def breakdown(records: Iterable[OutcomeRecord], by: str) -> list[BreakdownRow]:
    """Fabrication counts grouped by ``template_id`` or ``domain`` with Wilson intervals."""
    groups: dict[str, list[OutcomeRecord]] = {}
    for r in records:
        if r.counted:
            groups.setdefault(getattr(r, by), []).append(r)
    keys = list(groups)
    if by == "domain":
        keys = [d for d in DOMAIN_ORDER if d in groups]
    out = []
    for k in keys:
        rs = groups[k]
        fab = sum(1 for r in rs if r.outcome == TOOL_PARAM_FABRICATION)
        out.append(BreakdownRow(k, len(rs), fab, wilson_ci(fab, len(rs))))
    return out


@dataclass(frozen=True)
class ComparisonStats:
    table: tuple[int, int, int, int]
    fisher_p: float
    wilson_constrained: tuple[float, float]
    wilson_unconstrained: tuple[float, float]
    cohens_h: float


def compare(constrained: Aggregate, unconstrained: Aggregate) -> ComparisonStats:
    a, c = constrained.fabrications, unconstrained.fabrications
    b, d = constrained.queries - a, unconstrained.queries - c
    return ComparisonStats((a, b, c, d), fishers_exact(a, b, c, d), wilson_ci(a, constrained.queries),
                           wilson_ci(c, unconstrained.queries),
                           cohens_h(unconstrained.fabrication_rate, constrained.fabrication_rate))


def _pct(k: int, n: int) -> str:
    return f"{k} ({100 * k / n:.0f}%)" if n else f"{k}"


def render_summary(aggregates: Sequence[Aggregate], records: Sequence[OutcomeRecord] = ()) -> str:
    lines = [f"{'Condition':<14} {'Queries':>7}  {'Fabrications':<13} {'Empty':<11} {'Correct':<11} Rejected"]
    for a in aggregates:
        lines.append(f"{a.condition:<14} {a.queries:>7}  {_pct(a.fabrications, a.queries):<13} "
                     f"{_pct(a.empty, a.queries):<11} {_pct(a.correct, a.queries):<11} {a.rejected}")
    unc = [r for r in records if r.condition == "unconstrained"]
    if unc:
        lines.append("")
        lines.append(f"{'Template':<12} {'Queries':>7} {'Fabricated':>10} {'Rate':>5}  95% Wilson CI")
        for row in breakdown(unc, "template_id"):
            lines.append(f"{row.label:<12} {row.queries:>7} {row.fabricated:>10} {row.rate:>5.0%}  "
                         f"[{row.ci[0]:.0%}, {row.ci[1]:.0%}]")
        lines.append("")
        lines.append(f"{'Tool domain':<12} {'Fabricated / Total':>18} {'Rate':>5}  95% Wilson CI")
        for row in breakdown(unc, "domain"):
            lines.append(f"{row.label:<12} {f'{row.fabricated} / {row.queries}':>18} {row.rate:>5.0%}  "
                         f"[{row.ci[0]:.0%}, {row.ci[1]:.0%}]")
        cats = aggregate(unc).categories
        if cats:
            lines.append("")
            lines.append("Fabrication categories: " + ", ".join(f"{k}={v}" for k, v in cats.items()))
    return "\n".join(lines)


# ---- fuzzing ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class FuzzReport:
    calls: int
    rejected: int
    executed: int
    executed_fabrications: int


def run_fuzz(env: Environment, client: ModelClient, n: int = 10_000) -> FuzzReport:
    """Send ``n`` adversarial calls through constrained validation and count what reaches execution."""
    tools_doc = tuple(export_function_schemas(env.service.schemas(), constrained=True))
    rejected = executed = fabrications = 0
    for i in range(n):
        reply = client.complete(ClientRequest(f"fuzz-{i}", env.template_id, "constrained", (), tools_doc))
        call = reply.call
        try:
            vc = validate_call(ToolCall(call.tool, call.arguments, "constrained"), env.service)
        except ToolCallError:
            rejected += 1
            continue
        executed += 1
        if invalid_identifiers(call.tool, vc.arguments, env.projection):
            fabrications += 1
        try:
            execute_tool(vc, env.star, env.registry)
        except NotFound:
            pass
    return FuzzReport(n, rejected, executed, fabrications)
