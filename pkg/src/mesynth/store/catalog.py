"""Template-independent operational table catalog."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class TableClass(str, Enum):
    MUTABLE = "mutable-CDC"
    APPEND_ONLY = "append-only-CDC"
    SEED = "seed"


MUTABLE_TABLES = ("WorkOrder", "WorkOrderOperation", "NonConformance", "ChangePackage", "QualityAction", "Equipment")
APPEND_ONLY_TABLES = ("InspectionValue", "InspectionSample", "ActualConsumedMaterial", "EquipmentEvent", "Defect")
CDC_TABLES = MUTABLE_TABLES + APPEND_ONLY_TABLES
STAMP_COLUMNS = ("created_on", "modified_on")


@dataclass(frozen=True)
class Column:
    name: str
    type: str  # str | int | float | bool | ts
    required: bool = True
    references: Optional[str] = None


@dataclass(frozen=True)
class TableDef:
    name: str
    cls: TableClass
    columns: tuple[Column, ...]
    primary_key: str = "nid"

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns) + STAMP_COLUMNS

    @property
    def foreign_keys(self) -> dict[str, str]:
        return {c.name: c.references for c in self.columns if c.references}

    @property
    def required(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.required)


@dataclass(frozen=True)
class TableCatalog:
    tables: dict[str, TableDef] = field(default_factory=dict)

    def __getitem__(self, name: str) -> TableDef:
        return self.tables[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tables

    def __iter__(self):
        return iter(self.tables)

    def __len__(self) -> int:
        return len(self.tables)

    def by_class(self, cls: TableClass) -> list[str]:
        return [n for n, d in self.tables.items() if d.cls is cls]

    def structure(self) -> list[tuple]:
        """Hashable structural description (names, columns, keys, classes)."""
        return [(d.name, d.cls.value, d.primary_key, tuple((c.name, c.type, c.required, c.references)
                                                         for c in d.columns)) for d in self.tables.values()]


def _c(name: str, typ: str = "str", required: bool = True, ref: str | None = None) -> Column:
    return Column(name, typ, required, ref)


def _opt(name: str, typ: str = "str", ref: str | None = None) -> Column:
    return Column(name, typ, False, ref)


_NID = _c("nid")
_S, _M, _A = TableClass.SEED, TableClass.MUTABLE, TableClass.APPEND_ONLY

_DEFS: list[TableDef] = [
    # plant and calendar
    TableDef("Plant", _S, (_NID, _c("name"))),
    TableDef("Shift", _S, (_NID, _c("plant_nid", ref="Plant"), _c("start_time"), _c("end_time"),
                           _c("break_start"), _c("break_minutes", "int"))),
    TableDef("OperatingDay", _S, (_NID, _c("plant_nid", ref="Plant"), _c("weekday_index", "int"),
                                  _c("is_operating", "bool"))),
    TableDef("SimulationRun", _S, (_NID, _c("template_id"), _c("seed", "int"), _c("profile"), _c("start_on", "ts"),
                                   _c("duration_days", "int"), _c("rng_algorithm"))),
    # equipment and process
    TableDef("Equipment", _M, (_NID, _c("name"), _c("level"), _opt("parent_nid", ref="Equipment"),
                               _c("isa95_level"), _c("status"), _opt("station_nid"))),
    TableDef("Program", _S, (_NID, _c("name"))),
    TableDef("Product", _S, (_NID, _c("name"), _c("program_code", ref="Program"), _c("annual_volume", "int"))),
    TableDef("Station", _S, (_NID, _c("name"), _c("work_center_nid", ref="Equipment"), _c("sequence", "int"),
                             _c("cycle_time_low", "int"), _c("cycle_time_high", "int"), _c("setup_time_low", "int"),
                             _c("setup_time_high", "int"), _c("first_pass_yield", "float"),
                             _c("is_quality_gate", "bool"))),
    TableDef("ProductRouting", _S, (_NID, _c("part_number", ref="Product"), _c("station_nid", ref="Station"),
                                    _c("sequence", "int"))),
    TableDef("ProcessPlan", _S, (_NID, _c("part_number", ref="Product"), _c("revision"), _c("status"))),
    TableDef("ProcessPlanOperation", _S, (_NID, _c("process_plan_nid", ref="ProcessPlan"), _c("sequence", "int"),
                                          _c("station_nid", ref="Station"), _c("description"))),
    TableDef("StepTemplate", _S, (_NID, _c("station_nid", ref="Station"), _c("step", "int"), _c("description"))),
    # materials
    TableDef("Supplier", _S, (_NID, _c("name"), _c("category"), _c("lead_time_days", "int"),
                              _c("defect_cost", "float"))),
    TableDef("Material", _S, (_NID, _c("name"), _c("material_type"), _c("uom"), _opt("supplier_nid", ref="Supplier"),
                              _opt("unit_cost", "float"), _opt("part_number", ref="Product"))),
    TableDef("BillOfMaterial", _S, (_NID, _c("part_number", ref="Product"), _c("material_nid", ref="Material"),
                                    _c("station_nid", ref="Station"), _c("quantity", "float"))),
    TableDef("OperationMaterial", _S, (_NID, _c("station_nid", ref="Station"), _c("material_nid", ref="Material"),
                                       _c("quantity", "float"))),
    TableDef("MaterialLot", _S, (_NID, _c("material_nid", ref="Material"), _c("supplier_nid", ref="Supplier"),
                                 _c("received_on", "ts"), _c("quantity", "float"))),
    # quality reference data
    TableDef("InspectionPlan", _S, (_NID, _c("name"), _c("station_nid", ref="Station"))),
    TableDef("Characteristic", _S, (_NID, _c("inspection_plan_nid", ref="InspectionPlan"), _c("name"),
                                    _c("kind"), _c("nominal", "float"), _c("lsl", "float"), _c("usl", "float"),
                                    _c("uom"))),
    TableDef("SpcLimit", _S, (_NID, _c("characteristic_nid", ref="Characteristic"), _c("center_line", "float"),
                              _c("lcl", "float"), _c("ucl", "float"))),
    TableDef("FailureCode", _S, (_NID, _c("station_nid", ref="Station"), _c("description"), _c("severity"))),
    TableDef("Disposition", _S, (_NID, _c("weight", "float"))),
    # people and tooling
    TableDef("Certification", _S, (_NID, _c("name"), _c("valid_days", "int"))),
    TableDef("StationCertification", _S, (_NID, _c("station_nid", ref="Station"),
                                          _c("certification_nid", ref="Certification"))),
    TableDef("Skill", _S, (_NID, _c("name"))),
    TableDef("StationSkill", _S, (_NID, _c("station_nid", ref="Station"), _c("skill_nid", ref="Skill"))),
    TableDef("ToolDefinition", _S, (_NID, _c("name"), _c("calibration_interval_days", "int"))),
    TableDef("StationTool", _S, (_NID, _c("station_nid", ref="Station"), _c("tool_nid", ref="ToolDefinition"))),
    TableDef("ToolInstance", _S, (_NID, _c("tool_nid", ref="ToolDefinition"), _c("equipment_nid", ref="Equipment"),
                                  _c("last_calibrated_on", "ts"), _c("calibration_due_on", "ts"))),
    TableDef("Operator", _S, (_NID, _c("name"), _c("shift_nid", ref="Shift"), _c("hired_on", "ts"))),
    TableDef("OperatorCertification", _S, (_NID, _c("operator_nid", ref="Operator"),
                                           _c("certification_nid", ref="Certification"), _c("issued_on", "ts"),
                                           _c("expires_on", "ts"))),
    TableDef("OperatorSkill", _S, (_NID, _c("operator_nid", ref="Operator"), _c("skill_nid", ref="Skill"),
                                   _c("proficiency", "int"))),
    # execution
    TableDef("WorkOrder", _M, (_NID, _c("part_number", ref="Product"), _c("program_code", ref="Program"),
                               _c("state"), _c("quantity", "int"), _c("expedited", "bool"), _c("due_on", "ts"),
                               _c("serial_number"), _opt("started_on", "ts"), _opt("completed_on", "ts"))),
    TableDef("MaterialTrackingUnit", _S, (_NID, _c("work_order_nid", ref="WorkOrder"),
                                          _c("part_number", ref="Product"),
                                          _c("finished_material_nid", ref="Material"))),
    TableDef("WorkOrderOperation", _M, (_NID, _c("work_order_nid", ref="WorkOrder"),
                                        _c("station_nid", ref="Station"), _c("sequence", "int"), _c("state"),
                                        _opt("queued_at", "ts"), _opt("start_time", "ts"), _opt("end_time", "ts"),
                                        _opt("setup_time", "int"), _opt("cycle_time", "int"),
                                        _c("planned_cycle_time", "int"), _opt("delay_minutes", "int"),
                                        _opt("equipment_nid", ref="Equipment"), _opt("operator_nid", ref="Operator"),
                                        _opt("quality_result"))),
    TableDef("OperatorAssignment", _S, (_NID, _c("operation_nid", ref="WorkOrderOperation"),
                                        _c("operator_nid", ref="Operator"), _c("shift_nid", ref="Shift"),
                                        _c("assigned_on", "ts"))),
    TableDef("OperationStepExecution", _S, (_NID, _c("operation_nid", ref="WorkOrderOperation"),
                                            _c("step_template_nid", ref="StepTemplate"), _c("step", "int"),
                                            _c("executed_on", "ts"))),
    TableDef("ActualConsumedMaterial", _A, (_NID, _c("operation_nid", ref="WorkOrderOperation"),
                                            _c("material_nid", ref="Material"), _c("lot_nid", ref="MaterialLot"),
                                            _c("mtu_nid", ref="MaterialTrackingUnit"), _c("quantity", "float"))),
    TableDef("InspectionSample", _A, (_NID, _c("operation_nid", ref="WorkOrderOperation"),
                                      _c("inspection_plan_nid", ref="InspectionPlan"), _c("sampled_on", "ts"),
                                      _c("result"))),
    TableDef("InspectionValue", _A, (_NID, _c("sample_nid", ref="InspectionSample"),
                                     _c("characteristic_nid", ref="Characteristic"), _c("value", "float"),
                                     _c("in_spec", "bool"))),
    TableDef("NonConformance", _M, (_NID, _c("operation_nid", ref="WorkOrderOperation"),
                                    _c("work_order_nid", ref="WorkOrder"), _c("station_nid", ref="Station"),
                                    _c("failure_code_nid", ref="FailureCode"), _c("severity"), _c("state"),
                                    _opt("disposition", ref="Disposition"), _c("state_entered_on", "ts"),
                                    _c("triggers_capa", "bool"), _opt("closed_on", "ts"))),
    TableDef("Defect", _A, (_NID, _c("ncr_nid", ref="NonConformance"), _c("failure_code_nid", ref="FailureCode"),
                            _c("station_nid", ref="Station"), _c("quantity", "int"), _c("description"))),
    TableDef("QualityAction", _M, (_NID, _c("ncr_nid", ref="NonConformance"), _c("capa_type"), _c("status"),
                                   _c("opened_on", "ts"), _c("due_on", "ts"), _opt("closed_on", "ts"))),
    TableDef("QualityActionTask", _S, (_NID, _c("quality_action_nid", ref="QualityAction"), _c("step", "int"),
                                       _c("description"))),
    TableDef("ChangePackage", _M, (_NID, _c("change_type"), _c("status"), _c("title"), _c("opened_on", "ts"),
                                   _c("status_entered_on", "ts"), _opt("closed_on", "ts"),
                                   _c("part_number", ref="Product"), _c("station_nid", ref="Station"))),
    TableDef("ChangePackageAffectedItem", _S, (_NID, _c("change_package_nid", ref="ChangePackage"),
                                               _c("item_type"), _c("item_nid"))),
    TableDef("EquipmentEvent", _A, (_NID, _c("equipment_nid", ref="Equipment"), _c("event_type"), _c("reason"),
                                    _c("start_time", "ts"), _c("end_time", "ts"), _c("duration_minutes", "int"))),
    TableDef("DisruptionEvent", _S, (_NID, _c("kind"), _opt("target"), _c("start_time", "ts"),
                                     _c("end_time", "ts"))),
    TableDef("WipSnapshot", _S, (_NID, _c("station_nid", ref="Station"), _c("snapshot_on", "ts"),
                                 _c("queued", "int"), _c("active", "int"))),
]


def define_schema(template=None) -> TableCatalog:
    """Build the catalog. The template argument is accepted for symmetry; the structure never depends on it."""
    return TableCatalog({d.name: d for d in _DEFS})
