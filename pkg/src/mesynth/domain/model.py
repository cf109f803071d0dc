"""Typed structures for a domain template.

A template document is a JSON object whose top-level keys are the 45 export
names below. Element shapes are checked here (types, ranges, enums); the
cross-references between exports are checked in :mod:`mesynth.domain.relations`.
"""

from __future__ import annotations

import re
from functools import cached_property
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

REQUIRED_EXPORTS: tuple[str, ...] = (
    "PLANT_CODE", "PLANT_NAME", "SHIFTS", "OPERATING_DAYS",
    "BREAK_DURATION_MIN", "WEEKLY_PM_HOURS",
    "TARGET_OEE_RANGE", "FIRST_PASS_YIELD_RANGE", "AVG_WIP_RANGE",
    "OPERATORS_PER_SHIFT",
    "EQUIPMENT", "WORK_CENTER_UNITS", "PRODUCTS", "WORKING_DAYS_PER_YEAR",
    "STATIONS", "STATION_TO_WC",
    "RAW_MATERIALS", "FINISHED_MATERIALS", "PRODUCT_RAW_MATERIAL",
    "OPERATION_MATERIAL_CONSUMPTION",
    "SUPPLIERS", "FAILURE_CODES", "STATION_FAILURE_CODES",
    "PROCESS_PLANS", "INSPECTION_PLANS", "STATION_INSPECTION_PLANS",
    "NCR_DISPOSITIONS", "NCR_STATUS_DURATIONS", "CAPA_TRIGGER_RATE",
    "EQUIPMENT_DOWNTIME_PROB", "EQUIPMENT_DOWNTIME_DURATION_MIN",
    "ORDER_EXPEDITE_RATE", "BOP_REVISION_INTERVAL_DAYS",
    "CYCLE_TIME_VARIANCE", "DEFAULT_RANDOM_SEED",
    "CERTIFICATIONS", "STATION_CERTIFICATIONS",
    "SKILLS", "STATION_SKILLS",
    "TOOL_DEFINITIONS", "STATION_TOOLS",
    "STEP_TEMPLATES", "CHANGE_PACKAGE_RATE", "CHANGE_PACKAGE_PARAMS",
    "BOM_STATION_MATERIALS",
)
assert len(REQUIRED_EXPORTS) == 45

EQUIPMENT_LEVELS = ("Site", "Area", "WorkCenter", "Unit", "Instrument")

# Table II annotations; documentation only, never enforced.
ISA95_LEVELS = {
    "Site": "Level 4 (Enterprise)",
    "Area": "Level 3 (Site/Area)",
    "WorkCenter": "Level 3 (WorkCenter)",
    "Unit": "Level 2 (Unit)",
    "Instrument": "Level 1-2 (Instrument)",
}

SEVERITIES = ("MINOR", "MAJOR", "CRITICAL")
WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
NCR_TIMED_STATES = ("New", "InProcess", "PendingDisposition")

_HHMM = re.compile(r"^([01]\d|2[0-3]):[0-5]\d$")


def _check_range(value: tuple[float, float], *, lo: float | None = None, hi: float | None = None,
                 strict_lo: bool = False) -> tuple[float, float]:
    a, b = value
    if a > b:
        raise ValueError(f"range low {a} exceeds high {b}")
    if lo is not None and (a <= lo if strict_lo else a < lo):
        raise ValueError(f"range low {a} below {lo}")
    if hi is not None and b > hi:
        raise ValueError(f"range high {b} above {hi}")
    return value


class _Element(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ShiftDef(_Element):
    name: str
    start: str
    end: str
    break_start: str

    @field_validator("start", "end", "break_start")
    @classmethod
    def _clock(cls, v: str) -> str:
        if not _HHMM.match(v):
            raise ValueError(f"expected HH:MM, got {v!r}")
        return v


class EquipmentNode(_Element):
    nid: str
    name: str
    level: Literal["Site", "Area", "WorkCenter", "Unit", "Instrument"]
    parent: Optional[str] = None

    @property
    def isa95_level(self) -> str:
        return ISA95_LEVELS[self.level]


class Station(_Element):
    station_id: str = ""
    name: str
    work_center: str
    cycle_time_range_min: tuple[int, int]
    setup_time_min: tuple[int, int]
    first_pass_yield: float
    is_quality_gate: bool

    @field_validator("cycle_time_range_min", "setup_time_min")
    @classmethod
    def _minutes(cls, v: tuple[int, int]) -> tuple[int, int]:
        return _check_range(v, lo=0)

    @field_validator("first_pass_yield")
    @classmethod
    def _fpy(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError(f"first_pass_yield must be in (0, 1], got {v}")
        return v

    @property
    def planned_cycle_time(self) -> int:
        lo, hi = self.cycle_time_range_min
        return (lo + hi) // 2


class Product(_Element):
    part_number: str = ""
    name: str
    program_code: str
    annual_volume: int = Field(ge=0)
    stations: list[str] = Field(min_length=1)


class FailureCode(_Element):
    nid: str
    description: str
    station: str
    severity: Literal["MINOR", "MAJOR", "CRITICAL"]


class Supplier(_Element):
    name: str
    category: str
    lead_time_days: int = Field(ge=0)
    defect_cost: float = Field(ge=0)


class RawMaterial(_Element):
    name: str
    uom: str
    supplier: str
    unit_cost: float = Field(ge=0)


class FinishedMaterial(_Element):
    name: str
    part_number: str


class MaterialUse(_Element):
    material: str
    quantity: float = Field(gt=0)


class PlanOperation(_Element):
    seq: int = Field(ge=1)
    station: str
    description: str


class ProcessPlan(_Element):
    nid: str
    revision: str
    operations: list[PlanOperation] = Field(min_length=1)


class Characteristic(_Element):
    nid: str
    name: str
    kind: Literal["variable", "attribute"]
    nominal: float
    lsl: float
    usl: float
    uom: str

    @model_validator(mode="after")
    def _limits(self) -> "Characteristic":
        if not self.lsl <= self.nominal <= self.usl:
            raise ValueError("characteristic limits must satisfy lsl <= nominal <= usl")
        return self


class InspectionPlan(_Element):
    name: str
    characteristics: list[Characteristic] = Field(min_length=1)


class Disposition(_Element):
    code: str
    weight: float = Field(gt=0)


class Certification(_Element):
    name: str
    valid_days: int = Field(gt=0)


class Skill(_Element):
    name: str


class ToolDefinition(_Element):
    name: str
    calibration_interval_days: int = Field(gt=0)


class StepTemplate(_Element):
    step: int = Field(ge=1)
    description: str


class ChangePackageParams(_Element):
    change_types: list[str] = Field(min_length=1)
    statuses: list[str] = Field(min_length=2)
    status_durations_days: tuple[float, float]
    affected_window_days: int = Field(gt=0)

    @field_validator("status_durations_days")
    @classmethod
    def _durations(cls, v: tuple[float, float]) -> tuple[float, float]:
        return _check_range(v, lo=0)


def _ratio_range(v: tuple[float, float]) -> tuple[float, float]:
    return _check_range(v, lo=0.0, hi=1.0, strict_lo=True)


class TemplateExports(BaseModel):
    """The 45 exports, shape-checked. Field names are the export names."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    PLANT_CODE: str
    PLANT_NAME: str
    SHIFTS: list[ShiftDef] = Field(min_length=1)
    OPERATING_DAYS: list[Literal["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]] = Field(min_length=1)
    BREAK_DURATION_MIN: int = Field(ge=0)
    WEEKLY_PM_HOURS: float = Field(ge=0)
    TARGET_OEE_RANGE: tuple[float, float]
    FIRST_PASS_YIELD_RANGE: tuple[float, float]
    AVG_WIP_RANGE: tuple[float, float]
    OPERATORS_PER_SHIFT: int = Field(ge=1)
    EQUIPMENT: list[EquipmentNode] = Field(min_length=1)
    WORK_CENTER_UNITS: dict[str, list[str]]
    PRODUCTS: dict[str, Product] = Field(min_length=1)
    WORKING_DAYS_PER_YEAR: int = Field(gt=0, le=366)
    STATIONS: dict[str, Station] = Field(min_length=1)
    STATION_TO_WC: dict[str, str]
    RAW_MATERIALS: dict[str, RawMaterial]
    FINISHED_MATERIALS: dict[str, FinishedMaterial]
    PRODUCT_RAW_MATERIAL: dict[str, list[str]]
    OPERATION_MATERIAL_CONSUMPTION: dict[str, list[MaterialUse]]
    SUPPLIERS: dict[str, Supplier]
    FAILURE_CODES: list[FailureCode]
    STATION_FAILURE_CODES: dict[str, list[str]]
    PROCESS_PLANS: dict[str, ProcessPlan]
    INSPECTION_PLANS: dict[str, InspectionPlan]
    STATION_INSPECTION_PLANS: dict[str, str]
    NCR_DISPOSITIONS: list[Disposition] = Field(min_length=1)
    NCR_STATUS_DURATIONS: dict[Literal["New", "InProcess", "PendingDisposition"], tuple[int, int]]
    CAPA_TRIGGER_RATE: float = Field(ge=0, le=1)
    EQUIPMENT_DOWNTIME_PROB: float = Field(ge=0, le=1)
    EQUIPMENT_DOWNTIME_DURATION_MIN: tuple[int, int]
    ORDER_EXPEDITE_RATE: float = Field(ge=0, le=1)
    BOP_REVISION_INTERVAL_DAYS: int = Field(gt=0)
    CYCLE_TIME_VARIANCE: float = Field(ge=0, le=1)
    DEFAULT_RANDOM_SEED: int
    CERTIFICATIONS: dict[str, Certification]
    STATION_CERTIFICATIONS: dict[str, list[str]]
    SKILLS: dict[str, Skill]
    STATION_SKILLS: dict[str, list[str]]
    TOOL_DEFINITIONS: dict[str, ToolDefinition]
    STATION_TOOLS: dict[str, list[str]]
    STEP_TEMPLATES: dict[str, list[StepTemplate]]
    CHANGE_PACKAGE_RATE: float = Field(ge=0)
    CHANGE_PACKAGE_PARAMS: ChangePackageParams
    BOM_STATION_MATERIALS: dict[str, dict[str, list[str]]]

    @field_validator("TARGET_OEE_RANGE", "FIRST_PASS_YIELD_RANGE")
    @classmethod
    def _ratio(cls, v: tuple[float, float]) -> tuple[float, float]:
        return _ratio_range(v)

    @field_validator("AVG_WIP_RANGE")
    @classmethod
    def _wip(cls, v: tuple[float, float]) -> tuple[float, float]:
        return _check_range(v, lo=0)

    @field_validator("EQUIPMENT_DOWNTIME_DURATION_MIN")
    @classmethod
    def _downtime(cls, v: tuple[int, int]) -> tuple[int, int]:
        return _check_range(v, lo=0)

    @field_validator("NCR_STATUS_DURATIONS")
    @classmethod
    def _ncr_durations(cls, v: dict[str, tuple[int, int]]) -> dict[str, tuple[int, int]]:
        missing = [s for s in NCR_TIMED_STATES if s not in v]
        if missing:
            raise ValueError(f"missing NCR status durations: {missing}")
        for rng in v.values():
            _check_range(rng, lo=0)
        return v


class DisruptionDefaults(_Element):
    mtbf_min: float = Field(gt=0)
    duration_min: tuple[int, int]


class TemplateMeta(BaseModel):
    """Optional non-export metadata (underscore key ``_meta`` in the document)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    description: str = ""
    synthetic_note: str = ""
    supply_delay: DisruptionDefaults = DisruptionDefaults(mtbf_min=7200, duration_min=(60, 180))
    operator_shortage: DisruptionDefaults = DisruptionDefaults(mtbf_min=9600, duration_min=(30, 120))
    quality_excursion: DisruptionDefaults = DisruptionDefaults(mtbf_min=14400, duration_min=(120, 480))
    quality_excursion_fpy_drop: float = Field(default=0.10, ge=0, le=1)
    capa_types: list[str] = ["Corrective", "Preventive"]
    capa_statuses: list[str] = ["Open", "InProgress", "Closed"]
    capa_duration_days: tuple[float, float] = (5.0, 40.0)
    capa_due_days: int = 21


class DomainTemplate:
    """A parsed template: raw exports plus typed views.

    Equality and serialization use the raw exports, so a template survives a
    serialize/parse round trip unchanged.
    """

    def __init__(self, template_id: str, exports: dict[str, Any], meta: dict[str, Any],
                 typed: TemplateExports, typed_meta: TemplateMeta):
        self.template_id = template_id
        self.exports = exports
        self.meta = meta
        self._typed = typed
        self._meta = typed_meta

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DomainTemplate):
            return NotImplemented
        return (self.template_id, self.exports, self.meta) == (other.template_id, other.exports, other.meta)

    def __hash__(self) -> int:
        return hash(self.template_id)

    def __repr__(self) -> str:
        return f"DomainTemplate({self.template_id!r}, stations={len(self.stations)})"

    def __getitem__(self, export_name: str) -> Any:
        return getattr(self._typed, export_name)

    @property
    def typed(self) -> TemplateExports:
        return self._typed

    @property
    def settings(self) -> TemplateMeta:
        return self._meta

    @cached_property
    def stations(self) -> dict[str, Station]:
        return {sid: s.model_copy(update={"station_id": sid}) for sid, s in self._typed.STATIONS.items()}

    @cached_property
    def products(self) -> dict[str, Product]:
        return {pn: p.model_copy(update={"part_number": pn}) for pn, p in self._typed.PRODUCTS.items()}

    @property
    def failure_codes(self) -> list[FailureCode]:
        return self._typed.FAILURE_CODES

    @property
    def equipment(self) -> list[EquipmentNode]:
        return self._typed.EQUIPMENT

    @cached_property
    def units_by_work_center(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for node in self.equipment:
            if node.level == "Unit" and node.parent is not None:
                out.setdefault(node.parent, []).append(node.nid)
        return out

    @cached_property
    def characteristics_by_station(self) -> dict[str, list[Characteristic]]:
        plans = self._typed.INSPECTION_PLANS
        return {sid: list(plans[pid].characteristics) for sid, pid in self._typed.STATION_INSPECTION_PLANS.items()
                if pid in plans}

    @cached_property
    def failure_codes_by_station(self) -> dict[str, list[FailureCode]]:
        by_nid = {fc.nid: fc for fc in self.failure_codes}
        return {sid: [by_nid[n] for n in nids if n in by_nid]
                for sid, nids in self._typed.STATION_FAILURE_CODES.items()}

    @property
    def program_codes(self) -> list[str]:
        seen: dict[str, None] = {}
        for p in self.products.values():
            seen.setdefault(p.program_code, None)
        return list(seen)
