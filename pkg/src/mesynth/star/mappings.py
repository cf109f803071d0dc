"""Template-derived identifier mappings for the dimensional model.

Everything here is recomputed from the template on each call. Nothing
station-specific is hard-coded, so swapping the template changes dimension
contents without touching the builder.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..domain.model import DomainTemplate


@dataclass(frozen=True)
class StationRow:
    station_id: str
    name: str
    work_center: str
    sequence: int
    first_pass_yield: float
    mean_cycle_time: int
    is_quality_gate: bool


@dataclass(frozen=True)
class DimensionMappings:
    template_id: str
    wc_to_station: dict[str, str]
    defect_to_station: dict[str, str]
    unit_to_station: dict[str, str]
    station_rows: tuple[StationRow, ...]
    product_rows: tuple[dict, ...]
    defect_rows: tuple[dict, ...]
    equipment_rows: tuple[dict, ...]


def derive_mappings(t: DomainTemplate) -> DimensionMappings:
    # invert sigma: work center -> station (well defined because sigma is injective)
    wc_to_station = {st.work_center: sid for sid, st in t.stations.items()}
    defect_to_station = {fc.nid: fc.station for fc in t.failure_codes}
    unit_to_station = {}
    for wc, units in t.units_by_work_center.items():
        if wc in wc_to_station:
            for u in units:
                unit_to_station[u] = wc_to_station[wc]
    stations = tuple(
        StationRow(sid, st.name, st.work_center, seq, st.first_pass_yield,
                   (st.cycle_time_range_min[0] + st.cycle_time_range_min[1]) // 2, st.is_quality_gate)
        for seq, (sid, st) in enumerate(t.stations.items(), start=1))
    products = tuple({"part_number": pn, "name": p.name, "program_code": p.program_code,
                      "annual_volume": p.annual_volume, "routing_length": len(p.stations)}
                     for pn, p in t.products.items())
    defects = tuple({"failure_code": fc.nid, "description": fc.description, "station_id": defect_to_station[fc.nid],
                     "severity": fc.severity} for fc in t.failure_codes)
    equipment = []
    for node in t.equipment:
        if node.level == "WorkCenter":
            station = wc_to_station.get(node.nid)
        else:
            station = unit_to_station.get(node.nid)
        equipment.append({"equipment_nid": node.nid, "name": node.name, "level": node.level,
                          "parent_nid": node.parent, "isa95_level": node.isa95_level, "station_id": station})
    return DimensionMappings(t.template_id, wc_to_station, defect_to_station, unit_to_station, stations, products,
                             defects, tuple(equipment))
