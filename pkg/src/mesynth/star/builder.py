"""Full-rebuild star schema: 14 dimensions, 8 facts, 1 bridge.

Every rebuild recomputes all 23 tables from the source view and the current
template mappings; a :class:`StarSchema` is never modified after it is built.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Protocol

from ..domain.registry import TemplateRegistry
from ..sim.calendar import ShiftCalendar
from .mappings import DimensionMappings, derive_mappings

DIMENSIONS = ("DimDate", "DimOperator", "DimSkill", "DimProduct", "DimStation", "DimEquipment", "DimDefectType",
              "DimShift", "DimMaterial", "DimPlant", "DimMTU", "DimOperation", "DimCharacteristic",
              "DimInspectionSample")
FACTS = ("FctProduction", "FctQuality", "FctInspection", "FctMaterialGenealogy", "FctChangePackage",
         "FctEquipmentDowntime", "FctDailyStationSummary", "FctOEE")
BRIDGES = ("BridgeOperationSkill",)
STAR_TABLES = DIMENSIONS + FACTS + BRIDGES


class SourceInconsistent(Exception):
    pass


class MappingMismatch(Exception):
    pass


class SourceView(Protocol):
    def rows(self, table: str) -> list[dict]: ...


@dataclass(frozen=True)
class BuiltFrom:
    template_id: str
    template_version: int
    store_snapshot: str

    def to_dict(self) -> dict:
        return {"template_id": self.template_id, "template_version": self.template_version,
                "store_snapshot": self.store_snapshot}


@dataclass(frozen=True)
class StarSchema:
    tables: Mapping[str, tuple]
    built_from: BuiltFrom
    window_start: str | None
    window_end: str | None

    def __getitem__(self, name: str) -> tuple:
        return self.tables[name]

    def counts(self) -> dict[str, int]:
        return {name: len(rows) for name, rows in self.tables.items()}

    def index(self, table: str, key: str) -> dict:
        return {r[key]: r for r in self.tables[table]}


def date_key(ts: str) -> int:
    return int(ts[:4] + ts[5:7] + ts[8:10])


def _snapshot_id(source) -> str:
    return str(getattr(source, "snapshot_id", "external"))


def _keyed(rows: list[dict], natural: str, key: str) -> tuple[tuple, dict]:
    out = []
    lookup = {}
    for i, r in enumerate(rows, start=1):
        row = {key: i, **r}
        out.append(row)
        lookup[r[natural]] = i
    return tuple(out), lookup


def rebuild(source: SourceView, mappings: DimensionMappings, registry: TemplateRegistry) -> StarSchema:
    """Regenerate all 23 tables. Raises SourceInconsistent on any unresolved dimension key."""
    active = registry.current()
    if mappings.template_id != active.template_id:
        raise MappingMismatch(f"mappings for {mappings.template_id!r}, active template {active.template_id!r}")
    t = active.template
    rows = {name: source.rows(name) for name in (
        "SimulationRun", "Plant", "Shift", "Operator", "Skill", "StationSkill", "OperatorSkill", "Material",
        "MaterialLot", "MaterialTrackingUnit", "WorkOrder", "WorkOrderOperation", "Characteristic", "SpcLimit",
        "InspectionPlan", "InspectionSample", "InspectionValue", "NonConformance", "QualityAction",
        "ActualConsumedMaterial", "ChangePackage", "ChangePackageAffectedItem", "EquipmentEvent", "WipSnapshot",
        "Supplier", "QualityActionTask", "DisruptionEvent")}

    def need(lookup: dict, key, what: str):
        try:
            return lookup[key]
        except KeyError:
            raise SourceInconsistent(f"{what} {key!r} has no dimension row") from None

    tables: dict[str, tuple] = {}
    run = rows["SimulationRun"][-1] if rows["SimulationRun"] else None
    t0 = datetime.fromisoformat(run["start_on"]) if run else None
    days = run["duration_days"] if run else 0
    cal = ShiftCalendar.from_template(t, t0) if t0 is not None else None

    # ---- dimensions ---------------------------------------------------------------------------
    date_rows = []
    for d in range(days):
        day: date = (t0 + timedelta(days=d)).date()
        iso_year, iso_week, _ = day.isocalendar()
        date_rows.append({"date_key": int(day.strftime("%Y%m%d")), "date": day.isoformat(), "day_index": d,
                          "year": day.year, "month": day.month, "iso_year": iso_year, "iso_week": iso_week,
                          "day_of_week": day.strftime("%a"), "is_operating_day": cal.is_operating_day(d),
                          "working_minutes": cal.working_minutes_on_day(d)})
    tables["DimDate"] = tuple(date_rows)
    dates = {r["date_key"]: r["date_key"] for r in date_rows}

    def dkey(ts: str) -> int:
        return need(dates, date_key(ts), "date")

    plant_rows, plant_key = _keyed([{"plant_nid": p["nid"], "name": p["name"], "template_id": t.template_id}
                                    for p in rows["Plant"]], "plant_nid", "plant_key")
    tables["DimPlant"] = plant_rows
    shift_rows, shift_key = _keyed([{"shift_nid": s["nid"], "start_time": s["start_time"],
                                     "end_time": s["end_time"], "break_start": s["break_start"],
                                     "break_minutes": s["break_minutes"],
                                     "plant_key": need(plant_key, s["plant_nid"], "plant")}
                                    for s in rows["Shift"]], "shift_nid", "shift_key")
    tables["DimShift"] = shift_rows
    station_rows, station_key = _keyed([{"station_id": s.station_id, "name": s.name, "work_center": s.work_center,
                                         "sequence": s.sequence, "first_pass_yield": s.first_pass_yield,
                                         "mean_cycle_time": s.mean_cycle_time,
                                         "is_quality_gate": s.is_quality_gate}
                                        for s in mappings.station_rows], "station_id", "station_key")
    tables["DimStation"] = station_rows
    product_rows, product_key = _keyed([dict(p) for p in mappings.product_rows], "part_number", "product_key")
    tables["DimProduct"] = product_rows
    equipment_rows, equipment_key = _keyed([dict(e) for e in mappings.equipment_rows], "equipment_nid",
                                           "equipment_key")
    tables["DimEquipment"] = equipment_rows
    defect_rows, defect_key = _keyed([dict(d) for d in mappings.defect_rows], "failure_code", "defect_type_key")
    tables["DimDefectType"] = defect_rows
    operator_rows, operator_key = _keyed([{"operator_nid": o["nid"], "name": o["name"],
                                           "shift_key": need(shift_key, o["shift_nid"], "shift")}
                                          for o in rows["Operator"]], "operator_nid", "operator_key")
    tables["DimOperator"] = operator_rows
    skill_rows, skill_key = _keyed([{"skill_nid": s["nid"], "name": s["name"]} for s in rows["Skill"]],
                                   "skill_nid", "skill_key")
    tables["DimSkill"] = skill_rows
    suppliers = {sup["nid"]: sup for sup in rows["Supplier"]}
    material_rows, material_key = _keyed([{"material_nid": m["nid"], "name": m["name"],
                                           "material_type": m["material_type"], "uom": m["uom"],
                                           "supplier_nid": m["supplier_nid"], "unit_cost": m["unit_cost"],
                                           "supplier_name": suppliers[m["supplier_nid"]]["name"]
                                           if m["supplier_nid"] else None,
                                           "supplier_defect_cost": suppliers[m["supplier_nid"]]["defect_cost"]
                                           if m["supplier_nid"] else None}
                                          for m in rows["Material"]], "material_nid", "material_key")
    tables["DimMaterial"] = material_rows
    orders = {w["nid"]: w for w in rows["WorkOrder"]}
    mtu_rows, mtu_key = _keyed([{"serial_number": m["nid"], "work_order_nid": m["work_order_nid"],
                                 "part_number": m["part_number"], "created_on": m["created_on"],
                                 "product_key": need(product_key, m["part_number"], "product")}
                                for m in rows["MaterialTrackingUnit"]], "serial_number", "mtu_key")
    tables["DimMTU"] = mtu_rows

    def op_station(op: dict) -> str:
        # operation -> station through its unit's work center (inverse sigma), falling back to the routing
        eq = op.get("equipment_nid")
        if eq is not None:
            return need(mappings.unit_to_station, eq, "equipment unit")
        return op["station_nid"]

    # stations under a supply delay still running at the end of the window: queued work there is on hold
    window_end = (t0 + timedelta(days=days)).isoformat(timespec="seconds") if t0 else None
    held = {d["target"] for d in rows["DisruptionEvent"]
            if d["kind"] == "supply_delay" and window_end is not None and d["start_time"] <= window_end < d["end_time"]}
    op_rows = []
    for op in rows["WorkOrderOperation"]:
        wo = need(orders, op["work_order_nid"], "work order")
        sid = op_station(op)
        queued = op["state"] == "New" and op["queued_at"] is not None
        op_rows.append({"operation_nid": op["nid"], "work_order_nid": wo["nid"], "part_number": wo["part_number"],
                        "program_code": wo["program_code"], "sequence": op["sequence"], "station_id": sid,
                        "state": op["state"], "is_queued": queued, "on_hold": queued and sid in held,
                        "order_state": wo["state"], "order_due_on": wo["due_on"]})
    operation_rows, operation_key = _keyed(op_rows, "operation_nid", "operation_key")
    tables["DimOperation"] = operation_rows

    plan_station = {p["nid"]: p["station_nid"] for p in rows["InspectionPlan"]}
    spc = {s["characteristic_nid"]: s for s in rows["SpcLimit"]}
    char_rows, char_key = _keyed([{"characteristic_nid": c["nid"], "name": c["name"], "kind": c["kind"],
                                   "nominal": c["nominal"], "lsl": c["lsl"], "usl": c["usl"], "uom": c["uom"],
                                   "station_id": plan_station[c["inspection_plan_nid"]],
                                   "lcl": spc[c["nid"]]["lcl"] if c["nid"] in spc else None,
                                   "ucl": spc[c["nid"]]["ucl"] if c["nid"] in spc else None}
                                  for c in rows["Characteristic"]], "characteristic_nid", "characteristic_key")
    tables["DimCharacteristic"] = char_rows
    ops_by_nid = {o["nid"]: o for o in rows["WorkOrderOperation"]}
    sample_rows, sample_key = _keyed([{"sample_nid": s["nid"], "operation_nid": s["operation_nid"],
                                       "inspection_plan_nid": s["inspection_plan_nid"],
                                       "sampled_on": s["sampled_on"], "result": s["result"]}
                                      for s in rows["InspectionSample"]], "sample_nid", "sample_key")
    tables["DimInspectionSample"] = sample_rows

    # ---- facts --------------------------------------------------------------------------------
    prod = []
    for op in rows["WorkOrderOperation"]:
        if op["state"] != "Complete":
            continue
        wo = orders[op["work_order_nid"]]
        sid = op_station(op)
        operator = op["operator_nid"]
        prod.append({
            "operation_key": operation_key[op["nid"]], "station_key": need(station_key, sid, "station"),
            "station_id": sid, "product_key": need(product_key, wo["part_number"], "product"),
            "equipment_key": need(equipment_key, op["equipment_nid"], "equipment"),
            "operator_key": need(operator_key, operator, "operator"),
            "date_key": dkey(op["end_time"]), "work_order_nid": wo["nid"], "program_code": wo["program_code"],
            "start_time": op["start_time"], "end_time": op["end_time"], "setup_time": op["setup_time"],
            "cycle_time": op["cycle_time"], "planned_cycle_time": op["planned_cycle_time"],
            "cycle_variance": op["cycle_time"] - op["planned_cycle_time"], "delay_minutes": op["delay_minutes"] or 0,
            "quality_result": op["quality_result"], "expedited": wo["expedited"]})
    tables["FctProduction"] = tuple(prod)

    tasks = defaultdict(int)
    for task in rows["QualityActionTask"]:
        tasks[task["quality_action_nid"]] += 1
    capa_by_ncr = {qa["ncr_nid"]: qa for qa in rows["QualityAction"]}
    quality = []
    for n in rows["NonConformance"]:
        # station comes from the failure code's template station, never from a positional guess
        sid = need(mappings.defect_to_station, n["failure_code_nid"], "failure code")
        wo = orders[n["work_order_nid"]]
        quality.append({
            "ncr_nid": n["nid"], "defect_type_key": need(defect_key, n["failure_code_nid"], "failure code"),
            "station_key": need(station_key, sid, "station"), "station_id": sid,
            "operation_key": need(operation_key, n["operation_nid"], "operation"),
            "product_key": need(product_key, wo["part_number"], "product"), "program_code": wo["program_code"],
            "date_key": dkey(n["created_on"]), "created_on": n["created_on"], "failure_code": n["failure_code_nid"],
            "severity": n["severity"], "state": n["state"], "disposition": n["disposition"],
            "triggers_capa": n["triggers_capa"], **_capa_columns(capa_by_ncr.get(n["nid"]), tasks),
            "closed_on": n["closed_on"]})
    tables["FctQuality"] = tuple(quality)

    samples = {s["nid"]: s for s in rows["InspectionSample"]}
    inspection = []
    for v in rows["InspectionValue"]:
        s = samples[v["sample_nid"]]
        op = ops_by_nid[s["operation_nid"]]
        sid = op_station(op)
        inspection.append({
            "sample_key": need(sample_key, s["nid"], "sample"),
            "characteristic_key": need(char_key, v["characteristic_nid"], "characteristic"),
            "characteristic_nid": v["characteristic_nid"], "station_key": station_key[sid], "station_id": sid,
            "date_key": dkey(s["sampled_on"]), "sampled_on": s["sampled_on"], "value": v["value"],
            "in_spec": v["in_spec"], "result": s["result"]})
    tables["FctInspection"] = tuple(inspection)

    lots = {lot["nid"]: lot for lot in rows["MaterialLot"]}
    genealogy = []
    for c in rows["ActualConsumedMaterial"]:
        op = ops_by_nid[c["operation_nid"]]
        wo = orders[op["work_order_nid"]]
        lot = need(lots, c["lot_nid"], "lot")
        sid = op_station(op)
        genealogy.append({
            "mtu_key": need(mtu_key, c["mtu_nid"], "MTU"), "serial_number": c["mtu_nid"],
            "material_key": need(material_key, c["material_nid"], "material"), "material_nid": c["material_nid"],
            "supplier_nid": lot["supplier_nid"], "lot_nid": lot["nid"], "lot_received_on": lot["received_on"],
            "operation_key": operation_key[op["nid"]], "operation_nid": op["nid"], "station_key": station_key[sid],
            "station_id": sid, "product_key": product_key[wo["part_number"]], "part_number": wo["part_number"],
            "work_order_nid": wo["nid"], "quantity": c["quantity"], "date_key": dkey(c["created_on"]),
            "consumed_on": c["created_on"]})
    tables["FctMaterialGenealogy"] = tuple(genealogy)

    affected = defaultdict(int)
    for item in rows["ChangePackageAffectedItem"]:
        affected[item["change_package_nid"]] += 1
    impact_days = t.typed.CHANGE_PACKAGE_PARAMS.affected_window_days
    changes = []
    for cp in rows["ChangePackage"]:
        closed = cp["closed_on"]
        days_open = None
        if closed is not None:
            days_open = (datetime.fromisoformat(closed) - datetime.fromisoformat(cp["opened_on"])).total_seconds() / 86400
        changes.append({
            "change_package_nid": cp["nid"], "change_type": cp["change_type"], "status": cp["status"],
            "product_key": need(product_key, cp["part_number"], "product"), "part_number": cp["part_number"],
            "station_key": need(station_key, cp["station_nid"], "station"), "station_id": cp["station_nid"],
            "date_key": dkey(cp["opened_on"]), "opened_on": cp["opened_on"], "status_entered_on":
            cp["status_entered_on"], "closed_on": closed, "days_open": days_open,
            "affected_items": affected[cp["nid"]],
            "impact_window_end": (datetime.fromisoformat(cp["opened_on"]) + timedelta(days=impact_days))
            .isoformat(timespec="seconds")})
    tables["FctChangePackage"] = tuple(changes)

    downtime = []
    for ev in rows["EquipmentEvent"]:
        sid = need(mappings.unit_to_station, ev["equipment_nid"], "equipment unit")
        downtime.append({
            "event_nid": ev["nid"], "equipment_key": need(equipment_key, ev["equipment_nid"], "equipment"),
            "equipment_nid": ev["equipment_nid"], "station_key": station_key[sid], "station_id": sid,
            "date_key": dkey(ev["start_time"]), "event_type": ev["event_type"], "reason": ev["reason"],
            "start_time": ev["start_time"], "end_time": ev["end_time"], "duration_minutes": ev["duration_minutes"]})
    tables["FctEquipmentDowntime"] = tuple(downtime)

    # station-day rollups shared by the daily summary and OEE
    units_per_station = defaultdict(int)
    for u, sid in mappings.unit_to_station.items():
        units_per_station[sid] += 1
    agg: dict[tuple[int, str], dict] = {}
    for r in date_rows:
        for s in mappings.station_rows:
            agg[(r["date_key"], s.station_id)] = {
                "completed": 0, "passed": 0, "failed": 0, "ncrs": 0, "cycle_minutes": 0, "setup_minutes": 0,
                "planned_minutes": 0, "downtime_minutes": 0, "queued": 0, "active": 0,
                "scheduled_minutes": r["working_minutes"] * units_per_station[s.station_id]}
    for p in prod:
        a = agg[(p["date_key"], p["station_id"])]
        a["completed"] += 1
        a["cycle_minutes"] += p["cycle_time"]
        a["setup_minutes"] += p["setup_time"]
        a["planned_minutes"] += p["planned_cycle_time"]
        if p["quality_result"] == "Pass":
            a["passed"] += 1
        elif p["quality_result"] == "Fail":
            a["failed"] += 1
    for q in quality:
        agg[(q["date_key"], q["station_id"])]["ncrs"] += 1
    for d in downtime:
        agg[(d["date_key"], d["station_id"])]["downtime_minutes"] += d["duration_minutes"]
    for w in rows["WipSnapshot"]:
        a = agg[(dkey(w["snapshot_on"]), w["station_nid"])]
        a["queued"] += w["queued"]
        a["active"] += w["active"]
    daily = []
    oee = []
    for (dk, sid), a in agg.items():
        base = {"date_key": dk, "station_key": station_key[sid], "station_id": sid}
        daily.append({**base, "operations_completed": a["completed"], "passed": a["passed"], "failed": a["failed"],
                      "ncr_count": a["ncrs"], "cycle_minutes": a["cycle_minutes"],
                      "setup_minutes": a["setup_minutes"], "downtime_minutes": a["downtime_minutes"],
                      "wip_queued": a["queued"], "wip_active": a["active"]})
        sched = a["scheduled_minutes"]
        down = min(a["downtime_minutes"], sched)
        inspected = a["passed"] + a["failed"]
        availability = (sched - down) / sched if sched else None
        performance = min(1.0, a["planned_minutes"] / a["cycle_minutes"]) if a["cycle_minutes"] else None
        qual = a["passed"] / inspected if inspected else None
        product = (availability * performance * qual
                   if None not in (availability, performance, qual) else None)
        oee.append({**base, "scheduled_minutes": sched, "downtime_minutes": down,
                    "planned_cycle_minutes": a["planned_minutes"], "actual_cycle_minutes": a["cycle_minutes"],
                    "passed": a["passed"], "inspected": inspected, "availability": availability,
                    "performance": performance, "quality": qual, "oee": product})
    tables["FctDailyStationSummary"] = tuple(daily)
    tables["FctOEE"] = tuple(oee)

    station_skills = defaultdict(list)
    for ss in rows["StationSkill"]:
        station_skills[ss["station_nid"]].append(ss["skill_nid"])
    bridge = []
    for op in op_rows:
        for kid in station_skills[op["station_id"]]:
            bridge.append({"operation_key": operation_key[op["operation_nid"]],
                           "skill_key": need(skill_key, kid, "skill")})
    tables["BridgeOperationSkill"] = tuple(bridge)

    ordered = MappingProxyType({name: tables[name] for name in STAR_TABLES})
    start = t0.isoformat(timespec="seconds") if t0 else None
    end = (t0 + timedelta(days=days)).isoformat(timespec="seconds") if t0 else None
    return StarSchema(ordered, BuiltFrom(t.template_id, active.version, _snapshot_id(source)), start, end)


def _capa_columns(qa: dict | None, tasks: dict) -> dict:
    if qa is None:
        return {"capa_nid": None, "capa_type": None, "capa_status": None, "capa_opened_on": None,
                "capa_due_on": None, "capa_closed_on": None, "capa_sub_actions": 0}
    return {"capa_nid": qa["nid"], "capa_type": qa["capa_type"], "capa_status": qa["status"],
            "capa_opened_on": qa["opened_on"], "capa_due_on": qa["due_on"], "capa_closed_on": qa["closed_on"],
            "capa_sub_actions": tasks[qa["nid"]]}


def rebuild_from_registry(source: SourceView, registry: TemplateRegistry) -> StarSchema:
    return rebuild(source, derive_mappings(registry.active), registry)


def export_star(star: StarSchema, directory: Path | str) -> dict[str, int]:
    """Write one line-delimited document per table and a manifest of names and counts."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    counts = {}
    for name, rows in star.tables.items():
        with open(d / f"{name}.jsonl", "w", encoding="utf-8") as fh:
            for r in rows:
                fh.write(json.dumps(r, separators=(",", ":"), ensure_ascii=False) + "\n")
        counts[name] = len(rows)
    manifest = {"tables": list(STAR_TABLES), "row_counts": counts, "built_from": star.built_from.to_dict(),
                "window": [star.window_start, star.window_end]}
    (d / "_manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return counts
