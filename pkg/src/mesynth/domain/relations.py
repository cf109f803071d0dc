"""Relational checks across template exports.

Violations are collected, never raised; an empty report means the template
is consistent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .model import DomainTemplate

# Required parent level for each equipment level (Unit < WorkCenter < Area < Site).
PARENT_LEVEL = {"Site": None, "Area": "Site", "WorkCenter": "Area", "Unit": "WorkCenter", "Instrument": "Unit"}


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    subjects: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, message: str, *subjects: str) -> None:
        self.violations.append(Violation(rule, message, tuple(subjects)))

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [
            {"rule": v.rule, "message": v.message, "subjects": list(v.subjects)} for v in self.violations]}


def validate_relations(t: DomainTemplate) -> ValidationReport:
    report = ValidationReport()
    x = t.typed
    stations = t.stations
    nodes = {n.nid: n for n in t.equipment}

    # equipment forest containment
    dupes = [nid for nid, c in Counter(n.nid for n in t.equipment).items() if c > 1]
    for nid in dupes:
        report.add("containment", f"duplicate equipment nid {nid}", nid)
    for n in t.equipment:
        want = PARENT_LEVEL[n.level]
        if want is None:
            if n.parent is not None:
                report.add("containment", f"Site {n.nid} must not have a parent", n.nid)
            continue
        parent = nodes.get(n.parent) if n.parent else None
        if parent is None:
            report.add("containment", f"{n.level} {n.nid} has missing parent {n.parent!r}", n.nid)
        elif parent.level != want:
            report.add("containment", f"{n.level} {n.nid} parent {parent.nid} is {parent.level}, expected {want}",
                       n.nid, parent.nid)

    # sigma: station -> work center, injective, consistent with STATION_TO_WC
    by_wc: dict[str, list[str]] = {}
    for sid, s in stations.items():
        by_wc.setdefault(s.work_center, []).append(sid)
    for wc, sids in by_wc.items():
        if len(sids) > 1:
            report.add("sigma_injective", f"stations {', '.join(sids)} share work center {wc}", *sids)
    for sid, s in stations.items():
        mapped = x.STATION_TO_WC.get(sid)
        if mapped != s.work_center:
            report.add("sigma_consistency", f"STATION_TO_WC[{sid}]={mapped!r} but station work_center={s.work_center!r}", sid)
    for sid in x.STATION_TO_WC:
        if sid not in stations:
            report.add("sigma_consistency", f"STATION_TO_WC names unknown station {sid}", sid)

    # work-center units
    units = t.units_by_work_center
    for wc, listed in x.WORK_CENTER_UNITS.items():
        if sorted(listed) != sorted(units.get(wc, [])):
            report.add("work_center_units", f"WORK_CENTER_UNITS[{wc}] disagrees with EQUIPMENT units", wc)

    # phi: failure codes station-scoped, surjective over quality gates
    fc_nids = Counter(fc.nid for fc in t.failure_codes)
    for nid, c in fc_nids.items():
        if c > 1:
            report.add("failure_codes", f"duplicate failure code {nid}", nid)
    for fc in t.failure_codes:
        if fc.station not in stations:
            report.add("phi_station", f"failure code {fc.nid} names unknown station {fc.station}", fc.nid)
    covered = {fc.station for fc in t.failure_codes}
    for sid, s in stations.items():
        if s.is_quality_gate and sid not in covered:
            report.add("phi_surjective", f"quality gate {sid} has no failure codes", sid)
    expected = {}
    for fc in t.failure_codes:
        expected.setdefault(fc.station, []).append(fc.nid)
    for sid in set(expected) | set(x.STATION_FAILURE_CODES):
        if sorted(expected.get(sid, [])) != sorted(x.STATION_FAILURE_CODES.get(sid, [])):
            report.add("phi_consistency", f"STATION_FAILURE_CODES[{sid}] disagrees with FAILURE_CODES", sid)

    # routing referential integrity
    for pn, p in t.products.items():
        for sid in p.stations:
            s = stations.get(sid)
            if s is None:
                report.add("routing_integrity", f"product {pn} routes through unknown station {sid}", pn, sid)
                continue
            wc = nodes.get(s.work_center)
            if wc is None or wc.level != "WorkCenter":
                report.add("routing_integrity", f"station {sid} work center {s.work_center} is not a WorkCenter node",
                           pn, sid)
            elif not units.get(s.work_center):
                report.add("routing_integrity", f"work center {s.work_center} (station {sid}) has no Unit", pn, sid)

    # catalog references
    def _refs(rule: str, mapping: dict, catalog, what: str) -> None:
        for key, values in mapping.items():
            if key not in stations:
                report.add(rule, f"{what} map names unknown station {key}", key)
            for v in values:
                if v not in catalog:
                    report.add(rule, f"{what} {v} (station {key}) is not defined", key, v)

    _refs("certifications", x.STATION_CERTIFICATIONS, x.CERTIFICATIONS, "certification")
    _refs("skills", x.STATION_SKILLS, x.SKILLS, "skill")
    _refs("tools", x.STATION_TOOLS, x.TOOL_DEFINITIONS, "tool")
    for sid in stations:
        if not x.STATION_CERTIFICATIONS.get(sid):
            report.add("certifications", f"station {sid} requires no certification", sid)
    for sid in x.STEP_TEMPLATES:
        if sid not in stations:
            report.add("step_templates", f"step templates for unknown station {sid}", sid)

    for sid, pid in x.STATION_INSPECTION_PLANS.items():
        if sid not in stations:
            report.add("inspection_plans", f"inspection plan map names unknown station {sid}", sid)
        if pid not in x.INSPECTION_PLANS:
            report.add("inspection_plans", f"station {sid} inspection plan {pid} is not defined", sid, pid)
    for sid, s in stations.items():
        if s.is_quality_gate and sid not in x.STATION_INSPECTION_PLANS:
            report.add("inspection_plans", f"quality gate {sid} has no inspection plan", sid)
    chars = Counter(c.nid for plan in x.INSPECTION_PLANS.values() for c in plan.characteristics)
    for nid, c in chars.items():
        if c > 1:
            report.add("inspection_plans", f"characteristic {nid} appears in several plans", nid)

    for code, m in x.RAW_MATERIALS.items():
        if m.supplier not in x.SUPPLIERS:
            report.add("materials", f"raw material {code} names unknown supplier {m.supplier}", code)
    for code, fm in x.FINISHED_MATERIALS.items():
        if fm.part_number not in t.products:
            report.add("materials", f"finished material {code} names unknown product {fm.part_number}", code)
    for pn, mats in x.PRODUCT_RAW_MATERIAL.items():
        if pn not in t.products:
            report.add("materials", f"PRODUCT_RAW_MATERIAL names unknown product {pn}", pn)
        for m in mats:
            if m not in x.RAW_MATERIALS:
                report.add("materials", f"product {pn} raw material {m} is not defined", pn, m)
    for sid, uses in x.OPERATION_MATERIAL_CONSUMPTION.items():
        if sid not in stations:
            report.add("materials", f"consumption map names unknown station {sid}", sid)
        for u in uses:
            if u.material not in x.RAW_MATERIALS:
                report.add("materials", f"station {sid} consumes undefined material {u.material}", sid)
    for pn, per_station in x.BOM_STATION_MATERIALS.items():
        p = t.products.get(pn)
        if p is None:
            report.add("bom", f"BOM_STATION_MATERIALS names unknown product {pn}", pn)
            continue
        allowed = set(x.PRODUCT_RAW_MATERIAL.get(pn, []))
        for sid, mats in per_station.items():
            if sid not in p.stations:
                report.add("bom", f"product {pn} BOM uses station {sid} outside its routing", pn, sid)
            for m in mats:
                if m not in allowed:
                    report.add("bom", f"product {pn} BOM material {m} not in PRODUCT_RAW_MATERIAL", pn, m)

    for pn, plan in x.PROCESS_PLANS.items():
        p = t.products.get(pn)
        if p is None:
            report.add("process_plans", f"process plan for unknown product {pn}", pn)
            continue
        if [op.station for op in plan.operations] != p.stations:
            report.add("process_plans", f"process plan {plan.nid} disagrees with product {pn} routing", pn)
    return report
