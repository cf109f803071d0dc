"""The twelve analytics tool schemas, constrained by the active template."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from ..domain.registry import TemplateRegistry
from ..domain.vocabulary import VocabularyProjection, vocabulary_projection

ORDER_PATTERN = r"^WO-\d{3,}$"
SERIAL_PATTERN = r"^SN-\d{6,}$"
CHANGE_PACKAGE_PATTERN = r"^CP-\d{3,}$"

TOOL_NAMES = (
    "cycle_time_analysis", "first_pass_yield", "oee_decomposition",
    "ncr_root_cause_pareto", "spc_violation_detection", "quality_action_status",
    "material_genealogy", "supplier_performance",
    "change_impact_analysis", "engineering_change_velocity",
    "equipment_downtime_analysis", "production_status_summary",
)

TOOL_DOMAINS = {
    "cycle_time_analysis": "Production", "first_pass_yield": "Production", "oee_decomposition": "Production",
    "ncr_root_cause_pareto": "Quality", "spc_violation_detection": "Quality", "quality_action_status": "Quality",
    "material_genealogy": "Materials", "supplier_performance": "Materials",
    "change_impact_analysis": "Eng. Change", "engineering_change_velocity": "Eng. Change",
    "equipment_downtime_analysis": "Operations", "production_status_summary": "Operations",
}


@dataclass(frozen=True)
class Parameter:
    name: str
    type: str  # "string" | "integer"
    description: str
    required: bool = False
    enum: Optional[tuple[str, ...]] = None
    pattern: Optional[str] = None
    minimum: Optional[int] = None
    default: Optional[object] = None
    # which vocabulary set the enum is projected from (None for open scalars)
    vocabulary: Optional[str] = None

    @property
    def is_identifier(self) -> bool:
        return self.enum is not None or self.pattern is not None


@dataclass(frozen=True)
class ToolSchema:
    name: str
    description: str
    parameters: tuple[Parameter, ...]
    template_id: str
    template_version: int
    # at least one of these must be supplied
    one_of: tuple[str, ...] = field(default=())

    def param(self, name: str) -> Parameter:
        for p in self.parameters:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def domain(self) -> str:
        return TOOL_DOMAINS[self.name]


def _station(v: VocabularyProjection, what: str = "Station identifier") -> Parameter:
    return Parameter("station_nid", "string", f"{what}.", enum=v.stations, vocabulary="stations")


def _days(default: int | None = None) -> Parameter:
    return Parameter("time_range_days", "integer", "Look-back window in days, ending at the close of the run.",
                     minimum=1, default=default)


def _program(v: VocabularyProjection) -> Parameter:
    return Parameter("program_code", "string", "Program code of the products to include.", enum=v.program_codes,
                     vocabulary="program_codes")


def build_schemas(v: VocabularyProjection, version: int) -> list[ToolSchema]:
    tid = v.template_id

    def tool(name: str, description: str, *params: Parameter, one_of: tuple[str, ...] = ()) -> ToolSchema:
        return ToolSchema(name, description, tuple(params), tid, version, one_of)

    return [
        tool("cycle_time_analysis",
             "Actual versus planned cycle time per station: variance, standard deviation, min and max.",
             _station(v), _program(v), _days()),
        tool("first_pass_yield",
             "First pass yield trend with produced, scrapped and reworked counts.",
             _station(v), _days(),
             Parameter("group_by", "string", "Trend bucket.", enum=v.group_by, default="week", vocabulary="group_by")),
        tool("oee_decomposition",
             "Availability, performance and quality factors per station and their product (OEE).",
             _station(v), _days()),
        tool("ncr_root_cause_pareto",
             "Defect types ranked by NCR count with cumulative Pareto percentage.",
             _station(v),
             Parameter("severity", "string", "NCR severity.", enum=v.severities, vocabulary="severities"),
             Parameter("failure_code_nid", "string", "Restrict to one failure code.", enum=v.failure_codes,
                       vocabulary="failure_codes"),
             _days(),
             Parameter("top_n", "integer", "Number of defect types to return.", minimum=1, default=10)),
        tool("spc_violation_detection",
             "Out-of-spec counts, Cpk, mean and standard deviation per inspected characteristic.",
             Parameter("characteristic_nid", "string", "Inspection characteristic identifier.",
                       enum=v.characteristics, vocabulary="characteristics"),
             _station(v)),
        tool("quality_action_status",
             "Corrective and preventive actions with overdue flags and sub-action counts.",
             Parameter("status_filter", "string", "CAPA status.", enum=v.capa_statuses, vocabulary="capa_statuses"),
             Parameter("capa_type", "string", "CAPA type.", enum=v.capa_types, vocabulary="capa_types")),
        tool("material_genealogy",
             "Trace supplier, lot, material, operation and product for one work order or serial number.",
             Parameter("serial_number", "string", "Serial number of the tracked unit.", pattern=SERIAL_PATTERN),
             Parameter("order_nid", "string", "Work order identifier.", pattern=ORDER_PATTERN),
             one_of=("serial_number", "order_nid")),
        tool("supplier_performance",
             "Defect rate, lots received and cost of poor quality per supplier.",
             Parameter("supplier_code", "string", "Supplier code.", enum=v.suppliers, vocabulary="suppliers"),
             _days()),
        tool("change_impact_analysis",
             "Orders and NCRs affected by engineering change packages.",
             Parameter("change_package_nid", "string", "Change package identifier.", pattern=CHANGE_PACKAGE_PATTERN),
             _days()),
        tool("engineering_change_velocity",
             "Open-to-close durations of change packages and the status where open packages accumulate.",
             _days(),
             Parameter("change_type", "string", "Change package type.", enum=v.change_types,
                       vocabulary="change_types")),
        tool("equipment_downtime_analysis",
             "Downtime causes with MTBF and MTTR per equipment unit.",
             _station(v), _days()),
        tool("production_status_summary",
             "Work in process, on-hold, overdue and throughput per station.",
             _program(v), _station(v)),
    ]


def generate_tool_schemas(registry: TemplateRegistry) -> list[ToolSchema]:
    """Project the twelve schemas from the registry's active template."""
    active = registry.current()
    return build_schemas(vocabulary_projection(active.template), active.version)


class SchemaService:
    """Caches schemas per registry version; a load invalidates the cache before any reader can see it."""

    def __init__(self, registry: TemplateRegistry):
        self.registry = registry
        self._lock = threading.Lock()
        self._cache: tuple[int, list[ToolSchema]] | None = None
        self.invalidations = 0
        self._unsubscribe = registry.subscribe(self._invalidate)

    def _invalidate(self, *_args) -> None:
        with self._lock:
            self._cache = None
            self.invalidations += 1

    def schemas(self) -> list[ToolSchema]:
        with self._lock:
            version = self.registry.version
            if self._cache is None or self._cache[0] != version:
                self._cache = (version, generate_tool_schemas(self.registry))
            return self._cache[1]

    def get(self, name: str) -> ToolSchema:
        for s in self.schemas():
            if s.name == name:
                return s
        from .validation import UnknownTool
        raise UnknownTool(name)

    def close(self) -> None:
        self._unsubscribe()


def _render_param(p: Parameter, constrained: bool) -> dict:
    doc: dict = {"type": p.type, "description": p.description}
    if constrained:
        if p.enum is not None:
            doc["enum"] = list(p.enum)
        if p.pattern is not None:
            doc["pattern"] = p.pattern
    if p.minimum is not None:
        doc["minimum"] = p.minimum
    if p.default is not None:
        doc["default"] = p.default
    return doc


def export_function_schemas(schemas: list[ToolSchema], constrained: bool = True) -> list[dict]:
    """Render the function-calling ``tools`` array.

    The unconstrained render keeps names, types and descriptions but drops
    every enum and pattern, leaving identifier parameters as free text.
    """
    out = []
    for s in schemas:
        out.append({
            "type": "function",
            "function": {
                "name": s.name,
                "description": s.description,
                "parameters": {
                    "type": "object",
                    "properties": {p.name: _render_param(p, constrained) for p in s.parameters},
                    "required": [p.name for p in s.parameters if p.required],
                    "additionalProperties": False,
                },
            },
        })
    return out
