"""Command-line entry point: ``mesynth <verb> [flags]``.

Run directory layout (every path below is canonical, i.e. a pure function of
the flags and seed, except ``metrics.json``)::

    <run-dir>/
      run.json          run config and summary
      events.jsonl      committed event stream (store journal)
      store/            operational-store snapshot, one .jsonl per table + _changelog.jsonl
      lake/             CDC lakehouse (written by ``sync`` or a streaming ``run``)
      star/             star-schema export (written by ``rebuild``)
      reports/          tool results, swap report
      metrics.json      wall-clock timings (non-canonical)
      .lock             present while a verb holds the directory

Exit codes: 0 ok, 2 usage, 3 template, 4 store/simulation, 5 lake, 6 star,
7 tool call rejected, 8 tool target not found or stale schema, 9 client
transport, 10 run directory locked, 11 acceptance check failed, 1 unexpected.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Sequence

from .domain.parser import TemplateError, parse_template
from .domain.registry import TemplateRegistry, available_templates, load_template, read_template_document
from .domain.relations import validate_relations
from .domain.vocabulary import vocabulary_projection
from .lake.lakehouse import LakeError, Lakehouse
from .lake.sync import LakeView, SyncLoop, lake_matches_store, recover, sync_cycle
from .sim.engine import RunConfig, StoreWriteFailure, run
from .star.builder import MappingMismatch, SourceInconsistent, StarSchema, export_star, rebuild_from_registry
from .store.store import Store, StoreError
from .tools.execute import NotFound, StaleSchema, ResultTable, execute_tool
from .tools.schemas import SchemaService, export_function_schemas
from .tools.validation import ToolCall, ToolCallError, admit_unchecked, validate_call

log = logging.getLogger("mesynth")

EXIT_OK, EXIT_UNEXPECTED, EXIT_USAGE = 0, 1, 2
EXIT_TEMPLATE, EXIT_STORE, EXIT_LAKE, EXIT_STAR = 3, 4, 5, 6
EXIT_TOOL_REJECTED, EXIT_TOOL_TARGET, EXIT_TRANSPORT, EXIT_LOCKED, EXIT_CHECK = 7, 8, 9, 10, 11


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class RunDirLocked(CliError):
    def __init__(self, path: Path):
        super().__init__(f"run directory {path} is locked by another process (remove {path / '.lock'} if stale)",
                         EXIT_LOCKED)


def _error_code(exc: BaseException) -> int:
    from .experiments.clients import TransportError

    table = ((CliError, None), (TemplateError, EXIT_TEMPLATE), (StoreError, EXIT_STORE),
             (StoreWriteFailure, EXIT_STORE), (LakeError, EXIT_LAKE), (SourceInconsistent, EXIT_STAR),
             (MappingMismatch, EXIT_STAR), (ToolCallError, EXIT_TOOL_REJECTED), (NotFound, EXIT_TOOL_TARGET),
             (StaleSchema, EXIT_TOOL_TARGET), (TransportError, EXIT_TRANSPORT))
    for cls, code in table:
        if isinstance(exc, cls):
            return exc.code if code is None else code
    return EXIT_UNEXPECTED


# ---- run directory helpers ---------------------------------------------------------------------

@contextmanager
def locked(run_dir: Path) -> Iterator[Path]:
    run_dir.mkdir(parents=True, exist_ok=True)
    lock = run_dir / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RunDirLocked(run_dir) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield run_dir
    finally:
        lock.unlink(missing_ok=True)


def _write_json(path: Path, doc: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n", encoding="utf-8")


def _record_metrics(run_dir: Path, verb: str, values: dict) -> None:
    path = run_dir / "metrics.json"
    doc = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
    doc[verb] = values
    _write_json(path, doc)


def _read_run(run_dir: Path) -> dict:
    path = run_dir / "run.json"
    if not path.exists():
        raise CliError(f"{run_dir} is not a run directory (no run.json); create one with `mesynth run`", EXIT_STORE)
    return json.loads(path.read_text(encoding="utf-8"))


def _load_run(run_dir: Path) -> tuple[dict, TemplateRegistry, Store]:
    meta = _read_run(run_dir)
    registry = TemplateRegistry()
    load_template(registry, meta["config"]["template_id"])
    return meta, registry, Store.import_snapshot(run_dir / "store")


def _build_star(run_dir: Path, source: str) -> tuple[dict, TemplateRegistry, Store, StarSchema]:
    meta, registry, store = _load_run(run_dir)
    if source == "lake":
        lake_dir = run_dir / "lake"
        if not lake_dir.is_dir():
            raise CliError(f"no lake in {run_dir}; run `mesynth sync` first", EXIT_LAKE)
        view: Any = LakeView(Lakehouse(lake_dir), store)
    else:
        view = store
    return meta, registry, store, rebuild_from_registry(view, registry)


def _print_table(result: ResultTable, limit: int | None = 50) -> None:
    rows = result.rows if limit is None else result.rows[:limit]
    cells = [[("" if v is None else f"{v:.4g}" if isinstance(v, float) else str(v)) for v in r] for r in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(result.columns)]
    print("  ".join(c.ljust(w) for c, w in zip(result.columns, widths)))
    for r in cells:
        print("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    if limit is not None and len(result.rows) > limit:
        print(f"... {len(result.rows) - limit} more rows")
    if result.meta:
        print(json.dumps(result.meta, sort_keys=True, default=str))


# ---- verbs -------------------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    ids = available_templates() if args.all else [args.template]
    reports = {}
    for tid in ids:
        try:
            report = validate_relations(parse_template(read_template_document(tid), tid)).to_dict()
        except TemplateError as exc:
            report = {"ok": False, "violations": [{"rule": "parse", "message": str(exc), "subjects": []}]}
        reports[tid] = report
        status = "ok" if report["ok"] else f"{len(report['violations'])} violation(s)"
        print(f"{tid:<12} {status}")
        for v in report["violations"]:
            print(f"  [{v['rule']}] {v['message']}")
    if args.json:
        _write_json(Path(args.json), reports)
    return EXIT_OK if all(r["ok"] for r in reports.values()) else EXIT_TEMPLATE


def cmd_run(args: argparse.Namespace) -> int:
    run_dir = Path(args.out)
    cfg = RunConfig(args.template, duration_days=args.days, seed=args.seed, profile=args.profile,
                    mode=args.mode, speed_factor=args.speed)
    with locked(run_dir):
        registry = TemplateRegistry()
        store = Store()
        loop = None
        if cfg.mode == "streaming":
            loop = SyncLoop(store, Lakehouse(run_dir / "lake"), interval_s=args.sync_interval)
            loop.start()
        started = time.perf_counter()
        try:
            summary = run(cfg, registry, store)
        finally:
            reports = loop.stop() if loop is not None else []
        elapsed = time.perf_counter() - started
        store.export_snapshot(run_dir / "store")
        with open(run_dir / "events.jsonl", "w", encoding="utf-8") as fh:
            for line in store.journal_lines():
                fh.write(line + "\n")
        config = {"template_id": cfg.template_id, "duration_days": cfg.duration_days, "seed": cfg.seed,
                  "profile": cfg.profile, "mode": cfg.mode, "t0": cfg.t0.isoformat()}
        _write_json(run_dir / "run.json", {"config": config, "summary": summary.to_dict()})
        _record_metrics(run_dir, "run", {"wall_seconds": round(elapsed, 3), "sync_cycles": len(reports),
                                         "sync_latency_ms": [round(r.latency_ms, 2) for r in reports]})
    print(f"{cfg.template_id} seed={cfg.seed} days={cfg.duration_days} profile={cfg.profile}: "
          f"{summary.total_rows} rows in {elapsed:.1f}s -> {run_dir}")
    for table, n in sorted(summary.counts.items()):
        print(f"  {table:<28} {n}")
    return EXIT_OK


def cmd_sync(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    with locked(run_dir):
        _, _, store = _load_run(run_dir)
        lake = Lakehouse(run_dir / "lake")
        state = recover(lake)
        reports = [sync_cycle(store, lake, state) for _ in range(args.cycles)]
        mismatch = lake_matches_store(store, lake)
        _record_metrics(run_dir, "sync", {"latency_ms": [round(r.latency_ms, 2) for r in reports]})
    for r in reports:
        print(f"cycle {r.cycle_id}: {r.total_rows} rows in {r.snapshots_written} snapshots, "
              f"{r.dedup_drops} boundary duplicates dropped")
    if mismatch:
        for table, (lake_n, store_n) in sorted(mismatch.items()):
            print(f"  {table}: lake {lake_n} != store {store_n}")
        return EXIT_LAKE
    print("lake matches store")
    return EXIT_OK


def cmd_rebuild(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    with locked(run_dir):
        started = time.perf_counter()
        _, _, _, star = _build_star(run_dir, args.source)
        elapsed = time.perf_counter() - started
        counts = export_star(star, run_dir / "star")
        _record_metrics(run_dir, "rebuild", {"wall_seconds": round(elapsed, 3), "source": args.source})
    print(f"rebuilt {len(counts)} tables, {sum(counts.values())} rows in {elapsed:.2f}s")
    for table, n in counts.items():
        print(f"  {table:<26} {n}")
    return EXIT_OK


def cmd_tool(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    try:
        arguments = json.loads(args.args)
    except json.JSONDecodeError as exc:
        raise CliError(f"--args is not valid JSON: {exc}", EXIT_USAGE) from None
    if not isinstance(arguments, dict):
        raise CliError("--args must be a JSON object", EXIT_USAGE)
    _, registry, _, star = _build_star(run_dir, args.source)
    service = SchemaService(registry)
    condition = "unconstrained" if args.unconstrained else "constrained"
    call = ToolCall(args.name, arguments, condition)
    vc = admit_unchecked(call, service) if args.unconstrained else validate_call(call, service)
    started = time.perf_counter()
    result = execute_tool(vc, star, registry)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    _print_table(result, None if args.all_rows else 50)
    if args.save:
        with locked(run_dir):
            _write_json(run_dir / "reports" / f"tool-{args.name}.json",
                        {"call": {"tool": args.name, "arguments": arguments, "condition": condition},
                         "result": result.to_dict()})
            _record_metrics(run_dir, f"tool:{args.name}", {"latency_ms": round(elapsed_ms, 3)})
    return EXIT_OK


def cmd_schemas(args: argparse.Namespace) -> int:
    registry = TemplateRegistry()
    load_template(registry, args.template)
    doc = export_function_schemas(SchemaService(registry).schemas(), constrained=not args.unconstrained)
    text = json.dumps(doc, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"{len(doc)} tool schemas -> {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _seeds(spec: str) -> list[int]:
    out: list[int] = []
    for part in spec.split(","):
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def cmd_calibrate(args: argparse.Namespace) -> int:
    from .experiments.calibration import run_calibration

    templates = available_templates() if args.templates == "all" else args.templates.split(",")
    report = run_calibration(templates, _seeds(args.seeds), args.days, args.profile)
    print(report.render())
    if args.out:
        out = Path(args.out)
        _write_json(out / "calibration.json", report.to_dict())
        (out / "calibration.txt").write_text(report.render() + "\n", encoding="utf-8")
    return EXIT_OK if report.all_within and not report.failures else EXIT_CHECK


def _make_client(args: argparse.Namespace, corpus):
    from .experiments.clients import FuzzClient, HttpClient, ReplayClient

    if args.client == "replay":
        if args.replay:
            return ReplayClient(json.loads(Path(args.replay).read_text(encoding="utf-8")))
        return ReplayClient(corpus.replay())
    if args.client == "fuzz":
        return FuzzClient(args.seed)
    return HttpClient(endpoint=args.endpoint, model=args.model, timeout_s=args.timeout)


def cmd_halluc_eval(args: argparse.Namespace) -> int:
    from .experiments.hallucination import (
        CONDITIONS, Environment, aggregate, compare, load_corpus, render_summary, run_fuzz, run_hallucination)

    corpus = load_corpus(args.corpus)
    client = _make_client(args, corpus)
    templates = args.templates.split(",") if args.templates else corpus.template_ids
    envs: dict[str, Environment] = {}
    out = Path(args.out) if args.out else None
    if args.client == "fuzz":
        reports = {}
        for tid in templates:
            env = envs[tid] = Environment.build(tid, corpus.seed, corpus.days, corpus.profile)
            r = run_fuzz(env, client, args.fuzz_calls)
            reports[tid] = r.__dict__
            print(f"{tid:<12} calls={r.calls} rejected={r.rejected} executed={r.executed} "
                  f"executed_fabrications={r.executed_fabrications}")
        if out:
            _write_json(out / "fuzz.json", reports)
        return EXIT_OK if all(r["executed_fabrications"] == 0 for r in reports.values()) else EXIT_CHECK
    conditions = CONDITIONS if args.condition == "both" else (args.condition,)
    records = {c: run_hallucination(corpus, client, c, templates, envs) for c in conditions}
    aggregates = [aggregate(records[c]) for c in conditions]
    all_records = [r for c in conditions for r in records[c]]
    print(render_summary(aggregates, all_records))
    doc: dict[str, Any] = {"client": args.client, "aggregates": {a.condition: a.__dict__ for a in aggregates},
                           "records": [r.to_dict() for r in all_records]}
    if len(aggregates) == 2:
        stats = compare(aggregates[0], aggregates[1])
        doc["comparison"] = stats.__dict__
        print(f"\nFisher exact p = {stats.fisher_p:.3e}; Cohen's h = {stats.cohens_h:.3f}")
    if out:
        _write_json(out / "hallucination.json", doc)
        (out / "hallucination.txt").write_text(render_summary(aggregates, all_records) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_swap(args: argparse.Namespace) -> int:
    registry = TemplateRegistry()
    run_dir = Path(args.run_dir) if args.run_dir else None
    if run_dir is not None:
        load_template(registry, _read_run(run_dir)["config"]["template_id"])
    elif args.from_template:
        load_template(registry, args.from_template)
    service = SchemaService(registry)

    def describe() -> dict:
        active = registry.current()
        schemas = service.schemas()
        projection = vocabulary_projection(registry)
        enum_values = {v for s in schemas for p in s.parameters if p.enum for v in p.enum}
        stale = sorted(v for v in enum_values if v not in projection.members())
        return {"template_id": active.template_id, "version": active.version,
                "failure_codes": len(active.template.failure_codes), "stations": len(active.template.stations),
                "schema_version": schemas[0].template_version, "stale_enum_values": stale}

    before = describe() if (run_dir is not None or args.from_template) else None
    load_template(registry, args.template)
    after = describe()
    service.close()
    report = {"before": before, "after": after}
    print(json.dumps(report, indent=1))
    if run_dir is not None:
        with locked(run_dir):
            _write_json(run_dir / "reports" / "swap.json", report)
    return EXIT_OK if not after["stale_enum_values"] else EXIT_CHECK


# ---- parser ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mesynth", description="Synthetic MES data and tool-calling experiments.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    s = sub.add_parser("validate", help="parse and relationally validate templates")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--template")
    g.add_argument("--all", action="store_true", help="every shipped template")
    s.add_argument("--json", metavar="PATH", help="also write the violation report as JSON")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("run", help="simulate into a run directory")
    s.add_argument("--template", required=True)
    s.add_argument("--days", type=int, default=30)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--profile", default="stable", choices=["stable", "stressful"])
    s.add_argument("--mode", default="batch", choices=["batch", "streaming"])
    s.add_argument("--speed", type=float, default=60.0, help="streaming: simulated minutes per wall second")
    s.add_argument("--sync-interval", type=float, default=5.0, help="streaming: seconds between sync cycles")
    s.add_argument("--out", required=True, metavar="RUN_DIR")
    s.set_defaults(fn=cmd_run)

    s = sub.add_parser("sync", help="CDC-sync a run's store snapshot into its lake")
    s.add_argument("--run-dir", required=True)
    s.add_argument("--cycles", type=int, default=1)
    s.set_defaults(fn=cmd_sync)

    s = sub.add_parser("rebuild", help="rebuild and export the star schema")
    s.add_argument("--run-dir", required=True)
    s.add_argument("--source", default="store", choices=["store", "lake"])
    s.set_defaults(fn=cmd_rebuild)

    s = sub.add_parser("tool", help="execute one analytics tool against a run")
    s.add_argument("--run-dir", required=True)
    s.add_argument("--name", required=True)
    s.add_argument("--args", default="{}", help="JSON object of tool arguments")
    s.add_argument("--source", default="store", choices=["store", "lake"])
    s.add_argument("--unconstrained", action="store_true", help="skip vocabulary validation")
    s.add_argument("--all-rows", action="store_true")
    s.add_argument("--save", action="store_true", help="write reports/tool-<name>.json")
    s.set_defaults(fn=cmd_tool)

    s = sub.add_parser("schemas", help="export function-calling tool schemas")
    s.add_argument("--template", required=True)
    s.add_argument("--unconstrained", action="store_true", help="free-text render without enums/patterns")
    s.add_argument("--out", metavar="PATH")
    s.set_defaults(fn=cmd_schemas)

    s = sub.add_parser("calibrate", help="multi-seed KPI calibration")
    s.add_argument("--templates", default="aerospace,pharma", help="comma list or 'all'")
    s.add_argument("--seeds", default="42-51", help="e.g. 42-51 or 1,2,3")
    s.add_argument("--days", type=int, default=30)
    s.add_argument("--profile", default="stable", choices=["stable", "stressful"])
    s.add_argument("--out", metavar="DIR")
    s.set_defaults(fn=cmd_calibrate)

    s = sub.add_parser("halluc-eval", help="tool-parameter fabrication experiment")
    s.add_argument("--client", default="replay", choices=["replay", "fuzz", "http"])
    s.add_argument("--condition", default="both", choices=["constrained", "unconstrained", "both"])
    s.add_argument("--templates", help="comma list (default: every template in the corpus)")
    s.add_argument("--corpus", metavar="PATH", help="query corpus JSON (default: bundled)")
    s.add_argument("--replay", metavar="PATH", help="replay document {condition: {query_id: call}}")
    s.add_argument("--fuzz-calls", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0, help="fuzz client seed")
    s.add_argument("--endpoint", help="http: chat-completions base URL (or MESYNTH_LLM_ENDPOINT)")
    s.add_argument("--model", help="http: model name (or MESYNTH_LLM_MODEL)")
    s.add_argument("--timeout", type=float, default=120.0)
    s.add_argument("--out", metavar="DIR")
    s.set_defaults(fn=cmd_halluc_eval)

    s = sub.add_parser("swap", help="hot-swap the active template and report schema coherence")
    s.add_argument("--template", required=True, help="template to activate")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--run-dir", help="start from this run's template; writes reports/swap.json")
    g.add_argument("--from", dest="from_template", help="start from this template")
    s.set_defaults(fn=cmd_swap)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except Exception as exc:  # noqa: BLE001 - mapped to typed exit codes
        code = _error_code(exc)
        if code == EXIT_UNEXPECTED and isinstance(exc, ValueError):
            code = EXIT_USAGE
        elif code == EXIT_UNEXPECTED:
            log.exception("unexpected failure")
        print(f"mesynth {args.verb}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
