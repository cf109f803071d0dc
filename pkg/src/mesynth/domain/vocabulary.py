"""Identifier sets shared by the simulator and the tool constraints."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import SEVERITIES, DomainTemplate
from .registry import TemplateRegistry

WORK_ORDER_STATES = ("Edit", "New", "Active", "Complete", "Aborted")
OPERATION_STATES = ("New", "Active", "Complete", "Aborted")
NCR_STATES = ("New", "InProcess", "PendingDisposition", "Closed")
GROUP_BY = ("day", "week", "month")


@dataclass(frozen=True)
class VocabularyProjection:
    template_id: str
    stations: tuple[str, ...]
    part_numbers: tuple[str, ...]
    program_codes: tuple[str, ...]
    failure_codes: tuple[str, ...]
    equipment: tuple[str, ...]
    suppliers: tuple[str, ...]
    characteristics: tuple[str, ...]
    severities: tuple[str, ...] = SEVERITIES
    work_order_states: tuple[str, ...] = WORK_ORDER_STATES
    ncr_states: tuple[str, ...] = NCR_STATES
    capa_statuses: tuple[str, ...] = ()
    capa_types: tuple[str, ...] = ()
    change_types: tuple[str, ...] = ()
    change_statuses: tuple[str, ...] = ()
    group_by: tuple[str, ...] = GROUP_BY
    # human-readable names per identifier, used for fabrication categorisation
    names: dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    def members(self) -> set[str]:
        out: set[str] = set()
        for name in self.set_names():
            out.update(getattr(self, name))
        return out

    @staticmethod
    def set_names() -> tuple[str, ...]:
        return ("stations", "part_numbers", "program_codes", "failure_codes", "equipment", "suppliers",
                "characteristics", "severities", "work_order_states", "ncr_states", "capa_statuses",
                "capa_types", "change_types", "change_statuses", "group_by")


def _project(t: DomainTemplate) -> VocabularyProjection:
    x = t.typed
    names: dict[str, str] = {}
    for sid, s in t.stations.items():
        names[sid] = s.name
    for pn, p in t.products.items():
        names[pn] = p.name
    for fc in t.failure_codes:
        names[fc.nid] = fc.description
    for node in t.equipment:
        names[node.nid] = node.name
    for code, sup in x.SUPPLIERS.items():
        names[code] = sup.name
    chars = []
    for plan in x.INSPECTION_PLANS.values():
        for c in plan.characteristics:
            chars.append(c.nid)
            names[c.nid] = c.name
    meta = t.settings
    return VocabularyProjection(
        template_id=t.template_id,
        stations=tuple(t.stations),
        part_numbers=tuple(t.products),
        program_codes=tuple(t.program_codes),
        failure_codes=tuple(fc.nid for fc in t.failure_codes),
        equipment=tuple(n.nid for n in t.equipment),
        suppliers=tuple(x.SUPPLIERS),
        characteristics=tuple(chars),
        capa_statuses=tuple(meta.capa_statuses),
        capa_types=tuple(meta.capa_types),
        change_types=tuple(x.CHANGE_PACKAGE_PARAMS.change_types),
        change_statuses=tuple(x.CHANGE_PACKAGE_PARAMS.statuses),
        names=names,
    )


def vocabulary_projection(source: TemplateRegistry | DomainTemplate) -> VocabularyProjection:
    """Project identifier sets, always from the currently active template (no caching)."""
    t = source.active if isinstance(source, TemplateRegistry) else source
    return _project(t)
