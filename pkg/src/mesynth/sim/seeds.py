"""Reference (seed) rows derived from a template."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime

from ..domain.model import WEEKDAYS, DomainTemplate
from .calendar import iso
from .rng import Xoshiro256, derive_seed

SEED_LOTS_PER_MATERIAL = 2
LOT_ORDER_COVERAGE = 40  # orders' worth of material per received lot


@dataclass(frozen=True)
class OperatorInfo:
    nid: str
    shift: str
    certifications: frozenset[str]
    expires: dict  # certification -> expiry minute relative to t0 (may be negative)


@dataclass
class SeedBatch:
    rows: list[tuple[str, dict]] = field(default_factory=list)
    operators: list[OperatorInfo] = field(default_factory=list)
    lots: dict[str, list[tuple[str, float]]] = field(default_factory=dict)  # material -> [(lot, qty)]
    lot_size: dict[str, float] = field(default_factory=dict)

    def add(self, table: str, row: dict) -> None:
        self.rows.append((table, row))

    def counts(self) -> Counter:
        return Counter(t for t, _ in self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def material_quantity(t: DomainTemplate, station: str, material: str) -> float:
    for use in t.typed.OPERATION_MATERIAL_CONSUMPTION.get(station, []):
        if use.material == material:
            return use.quantity
    return 1.0


def _roster(t: DomainTemplate) -> list[list[str]]:
    """Station coverage for each operator slot within one shift.

    Every unit gets a primary operator certified for its station; the
    remaining slots are floaters certified for every station.
    """
    x = t.typed
    slots: list[list[str]] = []
    for sid, st in t.stations.items():
        for _ in x.WORK_CENTER_UNITS.get(st.work_center, []):
            slots.append([sid])
    n = x.OPERATORS_PER_SHIFT
    if n <= len(slots):
        return slots[:n]
    return slots + [list(t.stations) for _ in range(n - len(slots))]


def generate_seeds(t: DomainTemplate, t0: datetime, seed: int | None = None) -> SeedBatch:
    x = t.typed
    rng = Xoshiro256(derive_seed(x.DEFAULT_RANDOM_SEED if seed is None else seed, "seeds"))
    out = SeedBatch()
    stamp = lambda minutes: iso(t0, minutes)  # noqa: E731

    out.add("Plant", {"nid": x.PLANT_CODE, "name": x.PLANT_NAME})
    for s in x.SHIFTS:
        out.add("Shift", {"nid": s.name, "plant_nid": x.PLANT_CODE, "start_time": s.start, "end_time": s.end,
                          "break_start": s.break_start, "break_minutes": x.BREAK_DURATION_MIN})
    for i, day in enumerate(WEEKDAYS):
        out.add("OperatingDay", {"nid": day, "plant_nid": x.PLANT_CODE, "weekday_index": i,
                                 "is_operating": day in x.OPERATING_DAYS})

    station_of_wc = {st.work_center: sid for sid, st in t.stations.items()}
    unit_station = {u: station_of_wc.get(wc) for wc, units in t.units_by_work_center.items() for u in units}
    for node in x.EQUIPMENT:
        status = "Idle" if node.level == "Unit" else "Available"
        station = station_of_wc.get(node.nid) if node.level == "WorkCenter" else unit_station.get(node.nid)
        out.add("Equipment", {"nid": node.nid, "name": node.name, "level": node.level, "parent_nid": node.parent,
                              "isa95_level": node.isa95_level, "status": status, "station_nid": station})

    for code in t.program_codes:
        out.add("Program", {"nid": code, "name": f"Program {code}"})
    for pn, p in t.products.items():
        out.add("Product", {"nid": pn, "name": p.name, "program_code": p.program_code,
                            "annual_volume": p.annual_volume})
    for seq, (sid, st) in enumerate(t.stations.items(), start=1):
        out.add("Station", {"nid": sid, "name": st.name, "work_center_nid": st.work_center, "sequence": seq,
                            "cycle_time_low": st.cycle_time_range_min[0], "cycle_time_high": st.cycle_time_range_min[1],
                            "setup_time_low": st.setup_time_min[0], "setup_time_high": st.setup_time_min[1],
                            "first_pass_yield": st.first_pass_yield, "is_quality_gate": st.is_quality_gate})
    for pn, p in t.products.items():
        for seq, sid in enumerate(p.stations, start=1):
            out.add("ProductRouting", {"nid": f"{pn}/{sid}", "part_number": pn, "station_nid": sid, "sequence": seq})
    for pn, plan in x.PROCESS_PLANS.items():
        out.add("ProcessPlan", {"nid": plan.nid, "part_number": pn, "revision": plan.revision, "status": "Released"})
        for op in plan.operations:
            out.add("ProcessPlanOperation", {"nid": f"{plan.nid}/{op.seq:03d}", "process_plan_nid": plan.nid,
                                             "sequence": op.seq, "station_nid": op.station,
                                             "description": op.description})
    for sid, steps in x.STEP_TEMPLATES.items():
        for st in steps:
            out.add("StepTemplate", {"nid": f"{sid}/STEP-{st.step}", "station_nid": sid, "step": st.step,
                                     "description": st.description})

    for code, sup in x.SUPPLIERS.items():
        out.add("Supplier", {"nid": code, "name": sup.name, "category": sup.category,
                             "lead_time_days": sup.lead_time_days, "defect_cost": sup.defect_cost})
    for code, m in x.RAW_MATERIALS.items():
        out.add("Material", {"nid": code, "name": m.name, "material_type": "raw", "uom": m.uom,
                             "supplier_nid": m.supplier, "unit_cost": m.unit_cost, "part_number": None})
    for code, fm in x.FINISHED_MATERIALS.items():
        out.add("Material", {"nid": code, "name": fm.name, "material_type": "finished", "uom": "ea",
                             "supplier_nid": None, "unit_cost": None, "part_number": fm.part_number})
    usage: Counter = Counter()
    for pn, by_station in x.BOM_STATION_MATERIALS.items():
        for sid, materials in by_station.items():
            for mat in materials:
                qty = material_quantity(t, sid, mat)
                usage[mat] += qty
                out.add("BillOfMaterial", {"nid": f"{pn}/{sid}/{mat}", "part_number": pn, "material_nid": mat,
                                           "station_nid": sid, "quantity": qty})
    for sid, uses in x.OPERATION_MATERIAL_CONSUMPTION.items():
        for use in uses:
            out.add("OperationMaterial", {"nid": f"{sid}/{use.material}", "station_nid": sid,
                                          "material_nid": use.material, "quantity": use.quantity})
    for code, m in x.RAW_MATERIALS.items():
        size = round(max(usage[code], 1.0) * LOT_ORDER_COVERAGE, 3)
        out.lot_size[code] = size
        out.lots[code] = []
        for k in range(SEED_LOTS_PER_MATERIAL):
            lot = f"LOT-{code}-{k + 1:03d}"
            received = -(SEED_LOTS_PER_MATERIAL - k) * 7 * 1440
            out.add("MaterialLot", {"nid": lot, "material_nid": code, "supplier_nid": m.supplier,
                                    "received_on": stamp(received), "quantity": size})
            out.lots[code].append((lot, size))

    for pid, plan in x.INSPECTION_PLANS.items():
        station = next((s for s, p in x.STATION_INSPECTION_PLANS.items() if p == pid), None)
        if station is None:
            continue
        out.add("InspectionPlan", {"nid": pid, "name": plan.name, "station_nid": station})
        for c in plan.characteristics:
            out.add("Characteristic", {"nid": c.nid, "inspection_plan_nid": pid, "name": c.name, "kind": c.kind,
                                       "nominal": c.nominal, "lsl": c.lsl, "usl": c.usl, "uom": c.uom})
            sigma = (c.usl - c.lsl) / 8.0
            out.add("SpcLimit", {"nid": f"SPC-{c.nid}", "characteristic_nid": c.nid, "center_line": c.nominal,
                                 "lcl": round(c.nominal - 3 * sigma, 6), "ucl": round(c.nominal + 3 * sigma, 6)})
    for fc in x.FAILURE_CODES:
        out.add("FailureCode", {"nid": fc.nid, "station_nid": fc.station, "description": fc.description,
                                "severity": fc.severity})
    for d in x.NCR_DISPOSITIONS:
        out.add("Disposition", {"nid": d.code, "weight": d.weight})

    for cid, cert in x.CERTIFICATIONS.items():
        out.add("Certification", {"nid": cid, "name": cert.name, "valid_days": cert.valid_days})
    for sid, certs in x.STATION_CERTIFICATIONS.items():
        for cid in certs:
            out.add("StationCertification", {"nid": f"{sid}/{cid}", "station_nid": sid, "certification_nid": cid})
    for kid, skill in x.SKILLS.items():
        out.add("Skill", {"nid": kid, "name": skill.name})
    for sid, skills in x.STATION_SKILLS.items():
        for kid in skills:
            out.add("StationSkill", {"nid": f"{sid}/{kid}", "station_nid": sid, "skill_nid": kid})
    for tid, tool in x.TOOL_DEFINITIONS.items():
        out.add("ToolDefinition", {"nid": tid, "name": tool.name,
                                   "calibration_interval_days": tool.calibration_interval_days})
    for sid, tools in x.STATION_TOOLS.items():
        for tid in tools:
            out.add("StationTool", {"nid": f"{sid}/{tid}", "station_nid": sid, "tool_nid": tid})
    for sid, tools in x.STATION_TOOLS.items():
        wc = t.stations[sid].work_center
        for tid in tools:
            interval = x.TOOL_DEFINITIONS[tid].calibration_interval_days
            for unit in x.WORK_CENTER_UNITS.get(wc, []):
                last = -rng.randint(0, interval - 1) * 1440
                out.add("ToolInstance", {"nid": f"{unit}/{tid}", "tool_nid": tid, "equipment_nid": unit,
                                         "last_calibrated_on": stamp(last),
                                         "calibration_due_on": stamp(last + interval * 1440)})

    slots = _roster(t)
    n = 0
    for shift in x.SHIFTS:
        for stations in slots:
            n += 1
            nid = f"EMP-{n:04d}"
            out.add("Operator", {"nid": nid, "name": f"Operator {n:04d}", "shift_nid": shift.name,
                                 "hired_on": stamp(-rng.randint(180, 3650) * 1440)})
            certs = sorted({c for sid in stations for c in x.STATION_CERTIFICATIONS.get(sid, [])})
            expires = {}
            for cid in certs:
                valid = x.CERTIFICATIONS[cid].valid_days
                # issued recently enough to stay valid for well over a year of simulation
                issued = -rng.randint(0, max(valid - 400, 0)) * 1440 if valid > 400 else 0
                exp = issued + valid * 1440
                expires[cid] = exp
                out.add("OperatorCertification", {"nid": f"{nid}/{cid}", "operator_nid": nid,
                                                  "certification_nid": cid, "issued_on": stamp(issued),
                                                  "expires_on": stamp(exp)})
            skills = sorted({k for sid in stations[:1] for k in x.STATION_SKILLS.get(sid, [])})
            for kid in skills:
                out.add("OperatorSkill", {"nid": f"{nid}/{kid}", "operator_nid": nid, "skill_nid": kid,
                                          "proficiency": rng.randint(1, 5)})
            out.operators.append(OperatorInfo(nid, shift.name, frozenset(certs), expires))
    return out


def seed_row_count(t: DomainTemplate, t0: datetime | None = None) -> int:
    return len(generate_seeds(t, t0 or datetime(2026, 1, 5)))

