"""Query semantics of the twelve tools over an immutable star schema.

Every tool is a pure function of its validated arguments and the star. Time
windows end at the close of the simulated run: ``time_range_days = 7`` covers
the last seven calendar days of the run. Omitting it covers the whole run.
"""

from __future__ import annotations

import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from typing import Any, Callable, Optional

from ..domain.registry import TemplateRegistry
from ..star.builder import StarSchema
from .validation import ValidatedCall


class StaleSchema(Exception):
    pass


class NotFound(Exception):
    def __init__(self, what: str, value: str):
        self.what = what
        self.value = value
        super().__init__(f"{what} {value!r} does not exist in this run")


@dataclass(frozen=True)
class ResultTable:
    tool: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def empty(self) -> bool:
        return not self.rows

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_dict(self) -> dict:
        return {"tool": self.tool, "columns": list(self.columns), "rows": [list(r) for r in self.rows],
                "meta": self.meta}


def _r(x: Optional[float], nd: int = 4) -> Optional[float]:
    return None if x is None else round(x, nd)


def _stdev(xs: list[float]) -> Optional[float]:
    return statistics.stdev(xs) if len(xs) >= 2 else None


def _table(tool: str, columns: tuple[str, ...], records: list[dict], **meta) -> ResultTable:
    return ResultTable(tool, columns, tuple(tuple(rec[c] for c in columns) for rec in records), meta)


class _Ctx:
    def __init__(self, star: StarSchema, args: dict):
        self.star = star
        self.args = args
        self.end = datetime.fromisoformat(star.window_end) if star.window_end else None
        self.station_order = {r["station_id"]: r["sequence"] for r in star["DimStation"]}

    def arg(self, name: str, default: Any = None) -> Any:
        return self.args.get(name, default)

    @property
    def cutoff(self) -> Optional[int]:
        days = self.args.get("time_range_days")
        if days is None or self.end is None:
            return None
        start: date = (self.end - timedelta(days=days)).date()
        return int(start.strftime("%Y%m%d"))

    @property
    def cutoff_ts(self) -> Optional[str]:
        days = self.args.get("time_range_days")
        if days is None or self.end is None:
            return None
        return (self.end - timedelta(days=days)).isoformat(timespec="seconds")

    def in_window(self, row: dict) -> bool:
        c = self.cutoff
        return c is None or row["date_key"] >= c

    def window_dates(self) -> list[dict]:
        c = self.cutoff
        return [d for d in self.star["DimDate"] if c is None or d["date_key"] >= c]

    def station_ok(self, row: dict, key: str = "station_id") -> bool:
        s = self.args.get("station_nid")
        return s is None or row[key] == s


def _cycle_time_analysis(ctx: _Ctx) -> ResultTable:
    program = ctx.arg("program_code")
    groups: dict[str, list[dict]] = defaultdict(list)
    for r in ctx.star["FctProduction"]:
        if ctx.station_ok(r) and ctx.in_window(r) and (program is None or r["program_code"] == program):
            groups[r["station_id"]].append(r)
    out = []
    for sid in sorted(groups, key=ctx.station_order.get):
        rows = groups[sid]
        actual = [r["cycle_time"] for r in rows]
        planned = statistics.fmean(r["planned_cycle_time"] for r in rows)
        mean = statistics.fmean(actual)
        out.append({"station_id": sid, "operations": len(rows), "planned_cycle_time": _r(planned, 2),
                    "mean_cycle_time": _r(mean, 2), "variance_minutes": _r(mean - planned, 2),
                    "variance_pct": _r((mean - planned) / planned * 100 if planned else None, 2),
                    "stddev": _r(_stdev(actual), 2), "min": min(actual), "max": max(actual)})
    cols = ("station_id", "operations", "planned_cycle_time", "mean_cycle_time", "variance_minutes", "variance_pct",
            "stddev", "min", "max")
    return _table("cycle_time_analysis", cols, out)


def _period(date_key: int, group_by: str) -> str:
    d = date(date_key // 10000, date_key // 100 % 100, date_key % 100)
    if group_by == "day":
        return d.isoformat()
    if group_by == "month":
        return f"{d.year:04d}-{d.month:02d}"
    y, w, _ = d.isocalendar()
    return f"{y:04d}-W{w:02d}"


def _first_pass_yield(ctx: _Ctx) -> ResultTable:
    group_by = ctx.arg("group_by", "week")
    disposition = {q["operation_key"]: q["disposition"] for q in ctx.star["FctQuality"]}
    acc: dict[tuple[str, str], Counter] = defaultdict(Counter)
    for r in ctx.star["FctProduction"]:
        if r["quality_result"] is None or not (ctx.station_ok(r) and ctx.in_window(r)):
            continue
        c = acc[(_period(r["date_key"], group_by), r["station_id"])]
        c["produced"] += 1
        if r["quality_result"] == "Pass":
            c["passed"] += 1
        else:
            c["failed"] += 1
            d = disposition.get(r["operation_key"])
            if d == "Scrap":
                c["scrapped"] += 1
            elif d == "Rework":
                c["reworked"] += 1
    out = []
    for (period, sid) in sorted(acc, key=lambda k: (k[0], ctx.station_order[k[1]])):
        c = acc[(period, sid)]
        out.append({"period": period, "station_id": sid, "produced": c["produced"], "passed": c["passed"],
                    "failed": c["failed"], "scrapped": c["scrapped"], "reworked": c["reworked"],
                    "fpy": _r(c["passed"] / c["produced"], 6)})
    cols = ("period", "station_id", "produced", "passed", "failed", "scrapped", "reworked", "fpy")
    return _table("first_pass_yield", cols, out, group_by=group_by)


def _oee_decomposition(ctx: _Ctx) -> ResultTable:
    acc: dict[str, Counter] = defaultdict(Counter)
    for r in ctx.star["FctOEE"]:
        if ctx.station_ok(r) and ctx.in_window(r):
            c = acc[r["station_id"]]
            for k in ("scheduled_minutes", "downtime_minutes", "planned_cycle_minutes", "actual_cycle_minutes",
                      "passed", "inspected"):
                c[k] += r[k]
    out = []
    for sid in sorted(acc, key=ctx.station_order.get):
        c = acc[sid]
        if not c["scheduled_minutes"]:
            continue
        a = (c["scheduled_minutes"] - c["downtime_minutes"]) / c["scheduled_minutes"]
        p = min(1.0, c["planned_cycle_minutes"] / c["actual_cycle_minutes"]) if c["actual_cycle_minutes"] else None
        q = c["passed"] / c["inspected"] if c["inspected"] else None
        oee = a * p * q if p is not None and q is not None else None
        out.append({"station_id": sid, "availability": _r(a), "performance": _r(p), "quality": _r(q),
                    "oee": _r(oee), "scheduled_minutes": c["scheduled_minutes"],
                    "downtime_minutes": c["downtime_minutes"]})
    cols = ("station_id", "availability", "performance", "quality", "oee", "scheduled_minutes", "downtime_minutes")
    return _table("oee_decomposition", cols, out)


def _ncr_root_cause_pareto(ctx: _Ctx) -> ResultTable:
    severity = ctx.arg("severity")
    code = ctx.arg("failure_code_nid")
    top_n = ctx.arg("top_n", 10)
    counts: Counter = Counter()
    for r in ctx.star["FctQuality"]:
        if (ctx.station_ok(r) and ctx.in_window(r) and (severity is None or r["severity"] == severity)
                and (code is None or r["failure_code"] == code)):
            counts[r["failure_code"]] += 1
    defects = ctx.star.index("DimDefectType", "failure_code")
    total = sum(counts.values())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    out = []
    running = 0
    for rank, (fc, n) in enumerate(ranked, start=1):
        running += n
        d = defects[fc]
        out.append({"rank": rank, "failure_code": fc, "description": d["description"], "station_id": d["station_id"],
                    "severity": d["severity"], "count": n, "pct": _r(100 * n / total, 2),
                    "cumulative_pct": _r(100 * running / total, 2)})
    cols = ("rank", "failure_code", "description", "station_id", "severity", "count", "pct", "cumulative_pct")
    return _table("ncr_root_cause_pareto", cols, out, total_ncrs=total)


def _spc_violation_detection(ctx: _Ctx) -> ResultTable:
    char = ctx.arg("characteristic_nid")
    values: dict[str, list[dict]] = defaultdict(list)
    for r in ctx.star["FctInspection"]:
        if ctx.station_ok(r) and (char is None or r["characteristic_nid"] == char):
            values[r["characteristic_nid"]].append(r)
    dims = ctx.star.index("DimCharacteristic", "characteristic_nid")
    out = []
    for cid in sorted(values, key=lambda c: (ctx.station_order[dims[c]["station_id"]], c)):
        rows = values[cid]
        d = dims[cid]
        xs = [r["value"] for r in rows]
        mean = statistics.fmean(xs)
        sd = _stdev(xs)
        cpk = None
        if d["kind"] == "variable" and sd:
            cpk = min(d["usl"] - mean, mean - d["lsl"]) / (3 * sd)
        beyond = 0
        if d["lcl"] is not None and d["ucl"] is not None and d["kind"] == "variable":
            beyond = sum(1 for x in xs if not d["lcl"] <= x <= d["ucl"])
        out.append({"characteristic_nid": cid, "name": d["name"], "station_id": d["station_id"], "samples": len(xs),
                    "out_of_spec": sum(1 for r in rows if not r["in_spec"]), "beyond_control_limits": beyond,
                    "mean": _r(mean, 6), "stddev": _r(sd, 6), "lsl": d["lsl"], "usl": d["usl"], "cpk": _r(cpk, 4)})
    cols = ("characteristic_nid", "name", "station_id", "samples", "out_of_spec", "beyond_control_limits", "mean",
            "stddev", "lsl", "usl", "cpk")
    return _table("spc_violation_detection", cols, out)


def _quality_action_status(ctx: _Ctx) -> ResultTable:
    status = ctx.arg("status_filter")
    ctype = ctx.arg("capa_type")
    end = ctx.star.window_end
    out = []
    for r in ctx.star["FctQuality"]:
        if r["capa_nid"] is None:
            continue
        if (status is not None and r["capa_status"] != status) or (ctype is not None and r["capa_type"] != ctype):
            continue
        overdue = r["capa_closed_on"] is None and end is not None and r["capa_due_on"] < end
        out.append({"capa_nid": r["capa_nid"], "ncr_nid": r["ncr_nid"], "station_id": r["station_id"],
                    "capa_type": r["capa_type"], "status": r["capa_status"], "opened_on": r["capa_opened_on"],
                    "due_on": r["capa_due_on"], "overdue": overdue, "sub_actions": r["capa_sub_actions"]})
    out.sort(key=lambda rec: rec["capa_nid"])
    cols = ("capa_nid", "ncr_nid", "station_id", "capa_type", "status", "opened_on", "due_on", "overdue",
            "sub_actions")
    return _table("quality_action_status", cols, out, open=sum(1 for o in out if o["status"] != "Closed"),
                  overdue=sum(1 for o in out if o["overdue"]))


def _material_genealogy(ctx: _Ctx) -> ResultTable:
    serial = ctx.arg("serial_number")
    order = ctx.arg("order_nid")
    mtus = ctx.star["DimMTU"]
    if serial is not None and not any(m["serial_number"] == serial for m in mtus):
        raise NotFound("serial_number", serial)
    if order is not None and not any(m["work_order_nid"] == order for m in mtus):
        raise NotFound("order_nid", order)
    out = [r for r in ctx.star["FctMaterialGenealogy"]
           if (serial is None or r["serial_number"] == serial) and (order is None or r["work_order_nid"] == order)]
    out.sort(key=lambda r: (r["consumed_on"], r["operation_nid"], r["material_nid"]))
    cols = ("supplier_nid", "lot_nid", "material_nid", "operation_nid", "station_id", "work_order_nid",
            "serial_number", "part_number", "quantity", "consumed_on")
    return _table("material_genealogy", cols, out)


def _supplier_performance(ctx: _Ctx) -> ResultTable:
    code = ctx.arg("supplier_code")
    failed_ops = {q["operation_key"] for q in ctx.star["FctQuality"]}
    materials = ctx.star.index("DimMaterial", "material_nid")
    lots: dict[str, set] = defaultdict(set)
    ops: dict[str, set] = defaultdict(set)
    for r in ctx.star["FctMaterialGenealogy"]:
        if (code is None or r["supplier_nid"] == code) and ctx.in_window(r):
            lots[r["supplier_nid"]].add(r["lot_nid"])
            ops[r["supplier_nid"]].add(r["operation_key"])
    cost = {m["supplier_nid"]: m["supplier_defect_cost"] for m in materials.values() if m["supplier_nid"]}
    out = []
    for sup in sorted(ops):
        n_ops = len(ops[sup])
        defects = len(ops[sup] & failed_ops)
        out.append({"supplier_nid": sup, "lots_received": len(lots[sup]), "operations_supplied": n_ops,
                    "ncrs": defects, "defect_rate": _r(defects / n_ops, 6),
                    "copq": _r(defects * (cost.get(sup) or 0.0), 2)})
    cols = ("supplier_nid", "lots_received", "operations_supplied", "ncrs", "defect_rate", "copq")
    return _table("supplier_performance", cols, out)


def _change_impact_analysis(ctx: _Ctx) -> ResultTable:
    nid = ctx.arg("change_package_nid")
    packages = ctx.star["FctChangePackage"]
    if nid is not None and not any(p["change_package_nid"] == nid for p in packages):
        raise NotFound("change_package_nid", nid)
    selected = [p for p in packages if (nid is None or p["change_package_nid"] == nid) and ctx.in_window(p)]
    out = []
    for p in selected:
        lo, hi = p["opened_on"], p["impact_window_end"]
        prod = [r for r in ctx.star["FctProduction"]
                if r["station_id"] == p["station_id"] and lo <= r["start_time"] < hi]
        prod_keys = ctx.star.index("DimProduct", "product_key")
        prod = [r for r in prod if prod_keys[r["product_key"]]["part_number"] == p["part_number"]]
        ncrs = [q for q in ctx.star["FctQuality"]
                if q["station_id"] == p["station_id"] and lo <= q["created_on"] < hi
                and q["product_key"] == p["product_key"]]
        out.append({"change_package_nid": p["change_package_nid"], "change_type": p["change_type"],
                    "status": p["status"], "part_number": p["part_number"], "station_id": p["station_id"],
                    "opened_on": lo, "affected_orders": len({r["work_order_nid"] for r in prod}),
                    "affected_operations": len(prod), "related_ncrs": len(ncrs),
                    "ncr_rate": _r(len(ncrs) / len(prod), 6) if prod else None})
    out.sort(key=lambda rec: rec["change_package_nid"])
    cols = ("change_package_nid", "change_type", "status", "part_number", "station_id", "opened_on",
            "affected_orders", "affected_operations", "related_ncrs", "ncr_rate")
    return _table("change_impact_analysis", cols, out)


def _engineering_change_velocity(ctx: _Ctx) -> ResultTable:
    ctype = ctx.arg("change_type")
    groups: dict[str, list[dict]] = defaultdict(list)
    for p in ctx.star["FctChangePackage"]:
        if (ctype is None or p["change_type"] == ctype) and ctx.in_window(p):
            groups[p["change_type"]].append(p)
    out = []
    for t in sorted(groups):
        ps = groups[t]
        closed = [p["days_open"] for p in ps if p["days_open"] is not None]
        waiting = Counter(p["status"] for p in ps if p["closed_on"] is None)
        bottleneck = min(waiting.items(), key=lambda kv: (-kv[1], kv[0]))[0] if waiting else None
        out.append({"change_type": t, "opened": len(ps), "closed": len(closed), "open": len(ps) - len(closed),
                    "mean_days_to_close": _r(statistics.fmean(closed), 3) if closed else None,
                    "median_days_to_close": _r(statistics.median(closed), 3) if closed else None,
                    "max_days_to_close": _r(max(closed), 3) if closed else None, "bottleneck_status": bottleneck})
    cols = ("change_type", "opened", "closed", "open", "mean_days_to_close", "median_days_to_close",
            "max_days_to_close", "bottleneck_status")
    return _table("engineering_change_velocity", cols, out)


def _equipment_downtime_analysis(ctx: _Ctx) -> ResultTable:
    events: dict[str, list[dict]] = defaultdict(list)
    for r in ctx.star["FctEquipmentDowntime"]:
        if ctx.station_ok(r) and ctx.in_window(r):
            events[r["equipment_nid"]].append(r)
    per_unit_minutes = sum(d["working_minutes"] for d in ctx.window_dates())
    station_of = {e["equipment_nid"]: e["station_id"] for e in ctx.star["DimEquipment"]}
    out = []
    for eq in sorted(events, key=lambda e: (ctx.station_order[station_of[e]], e)):
        evs = events[eq]
        breakdowns = [e for e in evs if e["event_type"] == "Breakdown"]
        down = sum(e["duration_minutes"] for e in breakdowns)
        causes = Counter(e["reason"] for e in evs)
        top = min(causes.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        out.append({"equipment_nid": eq, "station_id": station_of[eq], "events": len(evs),
                    "breakdowns": len(breakdowns), "downtime_minutes": sum(e["duration_minutes"] for e in evs),
                    "breakdown_minutes": down,
                    "mtbf_minutes": _r((per_unit_minutes - down) / len(breakdowns), 1) if breakdowns else None,
                    "mttr_minutes": _r(down / len(breakdowns), 1) if breakdowns else None, "top_cause": top})
    cols = ("equipment_nid", "station_id", "events", "breakdowns", "downtime_minutes", "breakdown_minutes",
            "mtbf_minutes", "mttr_minutes", "top_cause")
    return _table("equipment_downtime_analysis", cols, out)


TOTAL_ROW = "(all)"


def _production_status_summary(ctx: _Ctx) -> ResultTable:
    """Per-station status plus a plant total.

    Station rows report completed operations per operating day; the total
    row reports work orders released per operating day.
    """
    program = ctx.arg("program_code")
    station = ctx.arg("station_nid")
    end = ctx.star.window_end
    operating_days = sum(1 for d in ctx.star["DimDate"] if d["is_operating_day"]) or None
    acc: dict[str, Counter] = defaultdict(Counter)
    overdue_orders: dict[str, set] = defaultdict(set)
    for op in ctx.star["DimOperation"]:
        if (program is not None and op["program_code"] != program) or (station is not None
                                                                       and op["station_id"] != station):
            continue
        c = acc[op["station_id"]]
        c["seen"] += 1
        if op["state"] == "Active":
            c["wip_active"] += 1
        elif op["is_queued"]:
            c["wip_queued"] += 1
            c["on_hold"] += op["on_hold"]
        if (op["state"] == "Active" or op["is_queued"]) and end is not None and op["order_due_on"] < end:
            overdue_orders[op["station_id"]].add(op["work_order_nid"])
    for r in ctx.star["FctProduction"]:
        if (program is None or r["program_code"] == program) and (station is None or r["station_id"] == station):
            acc[r["station_id"]]["completed"] += 1
    out = []
    for sid in sorted(acc, key=ctx.station_order.get):
        c = acc[sid]
        out.append({"station_id": sid, "wip_queued": c["wip_queued"], "wip_active": c["wip_active"],
                    "on_hold": c["on_hold"], "overdue": len(overdue_orders[sid]), "completed": c["completed"],
                    "throughput_per_day": _r(c["completed"] / operating_days, 3) if operating_days else None})
    if out:
        released = [m for m in ctx.star["DimMTU"] if program is None or _program_of(ctx, m) == program]
        orders_done = {r["work_order_nid"] for r in ctx.star["DimOperation"]
                       if r["order_state"] == "Complete" and (program is None or r["program_code"] == program)}
        out.append({"station_id": TOTAL_ROW, "wip_queued": sum(o["wip_queued"] for o in out),
                    "wip_active": sum(o["wip_active"] for o in out), "on_hold": sum(o["on_hold"] for o in out),
                    "overdue": len(set().union(*overdue_orders.values())) if overdue_orders else 0,
                    "completed": len(orders_done),
                    "throughput_per_day": _r(len(released) / operating_days, 3) if operating_days else None})
    cols = ("station_id", "wip_queued", "wip_active", "on_hold", "overdue", "completed", "throughput_per_day")
    return _table("production_status_summary", cols, out)


def _program_of(ctx: _Ctx, mtu: dict) -> str:
    return ctx.star.index("DimProduct", "part_number")[mtu["part_number"]]["program_code"]


TOOLS: dict[str, Callable[[_Ctx], ResultTable]] = {
    "cycle_time_analysis": _cycle_time_analysis,
    "first_pass_yield": _first_pass_yield,
    "oee_decomposition": _oee_decomposition,
    "ncr_root_cause_pareto": _ncr_root_cause_pareto,
    "spc_violation_detection": _spc_violation_detection,
    "quality_action_status": _quality_action_status,
    "material_genealogy": _material_genealogy,
    "supplier_performance": _supplier_performance,
    "change_impact_analysis": _change_impact_analysis,
    "engineering_change_velocity": _engineering_change_velocity,
    "equipment_downtime_analysis": _equipment_downtime_analysis,
    "production_status_summary": _production_status_summary,
}


def execute_tool(vc: ValidatedCall, star: StarSchema, registry: TemplateRegistry | None = None) -> ResultTable:
    """Run a validated call. Raises StaleSchema when the call, star and registry disagree on the template."""
    built = star.built_from
    if vc.template_id != built.template_id or vc.template_version != built.template_version:
        raise StaleSchema(f"call validated against {vc.template_id} v{vc.template_version}, "
                          f"star built from {built.template_id} v{built.template_version}")
    if registry is not None and registry.version != built.template_version:
        raise StaleSchema(f"star built from template version {built.template_version}, "
                          f"registry at version {registry.version}")
    if vc.tool not in TOOLS:
        from .validation import UnknownTool
        raise UnknownTool(vc.tool)
    return TOOLS[vc.tool](_Ctx(star, dict(vc.arguments)))

