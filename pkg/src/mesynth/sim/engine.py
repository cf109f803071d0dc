"""Time-stepped simulation main loop.

Each working minute runs five phases in order: disruptions (expire, fire),
daily order release, four-gate scheduling, completion with quality
evaluation, and periodic equipment (15 min) and lifecycle (30 min) events.
All writes made during a tick are committed to the store as one batch.
Non-working minutes are skipped entirely; an operation whose finish falls in
off-shift time completes at the next working tick.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Callable, Optional, Sequence

from ..domain.model import DomainTemplate, FailureCode, Station
from ..domain.registry import TemplateRegistry, load_template
from ..store.store import Batch, Store
from .accumulator import FractionalAccumulator, next_daily_quantity
from .calendar import MINUTES_PER_DAY, ShiftCalendar, iso
from .disruptions import ActiveDisruption, DisruptionKind, DisruptionTimer, schedule_disruption
from .profiles import Profile, get_profile
from .rng import ALGORITHM, RngStreams, Xoshiro256
from .seeds import generate_seeds, material_quantity
from .states import transition

logger = logging.getLogger(__name__)

DEFAULT_T0 = datetime(2026, 1, 5)  # a Monday
ORDER_RELEASE_MINUTE = 6 * 60
EQUIPMENT_CADENCE = 15
LIFECYCLE_CADENCE = 30
SHORTAGE_FRACTION = 0.2
BREAKDOWN_REASONS = ("Drive fault", "Hydraulic leak", "Sensor failure", "Controller fault", "Fixture damage")


class StoreWriteFailure(Exception):
    def __init__(self, last_committed_tick: int | None, cause: Exception):
        self.last_committed_tick = last_committed_tick
        self.cause = cause
        super().__init__(f"store write failed after tick {last_committed_tick}: {cause}")


@dataclass(frozen=True)
class RunConfig:
    template_id: str
    duration_days: int = 30
    seed: int = 42
    profile: str = "stable"
    mode: str = "batch"
    speed_factor: float = 60.0
    t0: datetime = DEFAULT_T0

    def __post_init__(self) -> None:
        if self.duration_days < 0:
            raise ValueError("duration_days must be >= 0")
        if self.mode not in ("batch", "streaming"):
            raise ValueError(f"mode must be batch or streaming, got {self.mode!r}")
        if self.speed_factor <= 0:
            raise ValueError("speed_factor must be positive")
        get_profile(self.profile)


@dataclass
class RunSummary:
    template_id: str
    template_version: int
    seed: int
    profile: str
    duration_days: int
    t0: str
    t_end: str
    operating_days: int
    seed_rows: int
    total_rows: int
    last_committed_tick: Optional[int]
    counts: dict = field(default_factory=dict)
    station_quality: dict = field(default_factory=dict)  # station -> {"passed": n, "failed": n}
    kpis: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GateResult:
    equipment: bool
    supply: bool
    upstream: bool
    operator: bool
    unit: Optional[str] = None
    operator_nid: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.equipment and self.supply and self.upstream and self.operator

    @property
    def blocking(self) -> Optional[str]:
        for name in ("equipment", "supply", "upstream", "operator"):
            if not getattr(self, name):
                return name
        return None


@dataclass(frozen=True)
class NcrDraft:
    operation_nid: str
    station: str
    failure_code: str
    severity: str
    triggers_capa: bool


def sample_cycle_time(s: Station, rng: Xoshiro256) -> int:
    """Integer minutes, uniform over the inclusive configured range."""
    lo, hi = s.cycle_time_range_min
    return rng.randint(lo, hi)


def evaluate_quality_gate(op, s: Station, rng: Xoshiro256, failure_codes: Sequence[FailureCode],
                          capa_rate: float = 0.0, fpy: float | None = None) -> NcrDraft | None:
    """Bernoulli(1 - FPY) gate; a failure yields an NCR with a code drawn uniformly from the station's codes."""
    if not s.is_quality_gate:
        return None
    p_pass = s.first_pass_yield if fpy is None else fpy
    if rng.random() < p_pass:
        return None
    if not failure_codes:
        raise ValueError(f"station {s.station_id} has no failure codes")
    fc = failure_codes[rng.randint(0, len(failure_codes) - 1)]
    triggers = rng.random() < capa_rate
    return NcrDraft(getattr(op, "nid", ""), s.station_id, fc.nid, fc.severity, triggers)


# ---- runtime entities ---------------------------------------------------------------------------

class _Order:
    kind = "WorkOrder"
    __slots__ = ("nid", "part_number", "program", "state", "ops", "next_idx", "expedited", "serial",
                 "created", "modified_on", "due")

    def __init__(self, nid, part_number, program, serial, created, due):
        self.nid = nid
        self.part_number = part_number
        self.program = program
        self.state = "Edit"
        self.ops: list[_Op] = []
        self.next_idx = 0
        self.expedited = False
        self.serial = serial
        self.created = created
        self.modified_on = created
        self.due = due


class _Op:
    kind = "Operation"
    __slots__ = ("nid", "order", "station", "seq", "state", "queued_at", "start", "end", "setup", "cycle",
                 "unit", "operator", "delay", "modified_on")

    def __init__(self, nid, order, station, seq):
        self.nid = nid
        self.order = order
        self.station = station
        self.seq = seq
        self.state = "New"
        self.queued_at = None
        self.start = None
        self.end = None
        self.setup = None
        self.cycle = None
        self.unit = None
        self.operator = None
        self.delay = 0
        self.modified_on = None


class _Unit:
    __slots__ = ("nid", "station", "status", "op", "down_until", "pm_until", "pm_due")

    def __init__(self, nid, station, pm_due):
        self.nid = nid
        self.station = station
        self.status = "Idle"
        self.op: _Op | None = None
        self.down_until = None
        self.pm_until = None
        self.pm_due = pm_due


class _Ncr:
    kind = "NCR"
    __slots__ = ("nid", "state", "next_at", "modified_on")

    def __init__(self, nid, next_at):
        self.nid = nid
        self.state = "New"
        self.next_at = next_at
        self.modified_on = None


@dataclass
class _Capa:
    nid: str
    status_idx: int
    schedule: list  # minute at which status index i+1 is entered


@dataclass
class _ChangePackage:
    nid: str
    status_idx: int
    next_at: int


class Simulation:
    """One run of the engine against one store."""

    def __init__(self, cfg: RunConfig, registry: TemplateRegistry, store: Store,
                 tick_hook: Callable[[int], None] | None = None):
        self.cfg = cfg
        self.registry = registry
        self.store = store
        self.tick_hook = tick_hook
        active = registry.current()
        if active.template_id != cfg.template_id:
            raise ValueError(f"registry has {active.template_id!r} active, config asks for {cfg.template_id!r}")
        self.template: DomainTemplate = active.template
        self.template_version = active.version
        self.x = self.template.typed
        self.meta = self.template.settings
        self.profile: Profile = get_profile(cfg.profile)
        self.rng = RngStreams(cfg.seed)
        self.cal = ShiftCalendar.from_template(self.template, cfg.t0)
        self.T = cfg.duration_days * MINUTES_PER_DAY
        self.stations = self.template.stations
        self.station_order = list(self.stations)
        self.fcs = self.template.failure_codes_by_station
        self.chars = self.template.characteristics_by_station
        self.batch = Batch()
        self.last_committed: int | None = None
        self._iso_cache: dict[int, str] = {}
        self.counters = {k: 0 for k in ("orders", "operations", "completed", "ncrs", "capas", "change_packages",
                                        "samples", "values", "consumed", "defects", "equipment_events",
                                        "disruptions", "lots", "assignments", "steps", "wip")}
        self.disruption_counts = {k.value: 0 for k in DisruptionKind}
        self.station_quality = {sid: {"passed": 0, "failed": 0} for sid in self.stations}

    # ---- helpers ------------------------------------------------------------------------------
    def ts(self, t: int) -> str:
        s = self._iso_cache.get(t)
        if s is None:
            s = self._iso_cache[t] = iso(self.cfg.t0, t)
        return s

    def _next(self, key: str) -> int:
        self.counters[key] += 1
        return self.counters[key]

    # ---- setup --------------------------------------------------------------------------------
    def _setup(self) -> None:
        seeds = generate_seeds(self.template, self.cfg.t0, self.cfg.seed)
        self.seed_rows = len(seeds)
        for table, row in seeds.rows:
            self.batch.insert(table, row)
        self.batch.insert("SimulationRun", {
            "nid": f"RUN-{self.cfg.template_id}-{self.cfg.seed}-{self.cfg.profile}",
            "template_id": self.cfg.template_id, "seed": self.cfg.seed, "profile": self.cfg.profile,
            "start_on": self.ts(0), "duration_days": self.cfg.duration_days, "rng_algorithm": ALGORITHM})
        self._commit(0)

        # operators
        self.operators = seeds.operators
        self.op_busy: dict[str, bool] = {o.nid: False for o in self.operators}
        self.absent: set[str] = set()
        required = self.x.STATION_CERTIFICATIONS
        self.certified: dict[tuple[str, str], list] = {}
        for sid in self.stations:
            need = set(required.get(sid, []))
            for shift in self.x.SHIFTS:
                self.certified[(sid, shift.name)] = [
                    o for o in self.operators if o.shift == shift.name and need <= o.certifications]

        # equipment
        wcu = self.x.WORK_CENTER_UNITS
        all_units = [(sid, u) for sid, st in self.stations.items() for u in wcu.get(st.work_center, [])]
        week = 7 * MINUTES_PER_DAY
        self.units: dict[str, _Unit] = {}
        self.station_units: dict[str, list[_Unit]] = {sid: [] for sid in self.stations}
        for i, (sid, nid) in enumerate(all_units):
            unit = _Unit(nid, sid, pm_due=(i * week) // max(len(all_units), 1) + ORDER_RELEASE_MINUTE)
            self.units[nid] = unit
            self.station_units[sid].append(unit)
        for sid in self.station_units:
            self.station_units[sid].sort(key=lambda u: u.nid)
        self.pm_minutes = round(self.x.WEEKLY_PM_HOURS * 60)

        # materials
        self.lots = {m: list(v) for m, v in seeds.lots.items()}  # material -> [(lot, remaining)] oldest first
        self.lot_size = dict(seeds.lot_size)
        self.lot_seq = {m: len(v) for m, v in seeds.lots.items()}
        self.bom = self.x.BOM_STATION_MATERIALS

        # orders
        wdpy = self.x.WORKING_DAYS_PER_YEAR
        self.accumulators = {pn: FractionalAccumulator.for_volume(p.annual_volume, wdpy)
                             for pn, p in self.template.products.items()}
        self.cp_accumulator = FractionalAccumulator(self.x.CHANGE_PACKAGE_RATE)
        self.daily_orders = sum(p.annual_volume for p in self.template.products.values()) / wdpy
        mean_route = {pn: sum((sum(self.stations[s].cycle_time_range_min) + sum(self.stations[s].setup_time_min)) / 2
                              for s in p.stations) for pn, p in self.template.products.items()}
        per_day = max(self.cal.working_minutes_per_week() / 7, 1)
        self.lead_days = {pn: max(1, math.ceil(1.5 * m / per_day)) for pn, m in mean_route.items()}
        self.orders: list[_Order] = []
        self.open_orders: dict[str, _Order] = {}
        self.queues: dict[str, list[_Op]] = {sid: [] for sid in self.stations}
        self.running: list[tuple[int, str]] = []  # heap of (end, op nid)
        self.op_index: dict[str, _Op] = {}
        self.ncrs: dict[str, _Ncr] = {}
        self.capas: dict[str, _Capa] = {}
        self.cps: dict[str, _ChangePackage] = {}
        self.last_release_day = -1
        self.dirty = True
        self.prev_roster: str | None = None

        # disruptions
        self.active: list[ActiveDisruption] = []
        self.timers: list[DisruptionTimer] = []
        drng = self.rng["disruptions"]
        n_units = len(self.units)
        mtbf = {
            DisruptionKind.EQUIPMENT_BREAKDOWN: (MINUTES_PER_DAY / (self.x.EQUIPMENT_DOWNTIME_PROB * n_units)
                                                 if self.x.EQUIPMENT_DOWNTIME_PROB > 0 and n_units else None),
            DisruptionKind.SUPPLY_DELAY: self.meta.supply_delay.mtbf_min,
            DisruptionKind.QUALITY_EXCURSION: self.meta.quality_excursion.mtbf_min,
            DisruptionKind.OPERATOR_SHORTAGE: self.meta.operator_shortage.mtbf_min,
            DisruptionKind.ORDER_EXPEDITE: (MINUTES_PER_DAY / (self.x.ORDER_EXPEDITE_RATE * self.daily_orders)
                                            if self.x.ORDER_EXPEDITE_RATE > 0 and self.daily_orders > 0 else None),
        }
        for kind in DisruptionKind:
            mult = self.profile.rate.get(kind, 1.0)
            base = mtbf[kind]
            if base is None or mult <= 0:
                continue
            m = base / mult
            self.timers.append(DisruptionTimer(kind, m, schedule_disruption(kind, m, 0, drng)))
        self.supply_stations = sorted({s for by in self.bom.values() for s in by}, key=self.station_order.index)

    # ---- commit -------------------------------------------------------------------------------
    def _commit(self, t: int) -> None:
        if not self.batch:
            return
        try:
            self.store.commit(self.batch, self.ts(t))
        except Exception as exc:
            raise StoreWriteFailure(self.last_committed, exc) from exc
        self.batch = Batch()
        self.last_committed = t

    # ---- main loop ----------------------------------------------------------------------------
    def run(self) -> RunSummary:
        self._setup()
        streaming = self.cfg.mode == "streaming"
        tick_seconds = 60.0 / self.cfg.speed_factor
        cal = self.cal
        for t in range(self.T):
            if streaming:
                time.sleep(tick_seconds)
            if not cal.is_working(t):
                continue
            roster = cal.rostered_shift(t)
            if roster != self.prev_roster:
                self.prev_roster = roster
                self.dirty = True
            self._phase_disruptions(t)
            self._phase_orders(t)
            if self.dirty:
                self._phase_schedule(t)
            self._phase_complete(t)
            if t % EQUIPMENT_CADENCE == 0:
                self._phase_equipment(t)
            if t % LIFECYCLE_CADENCE == 0:
                self._phase_lifecycle(t)
            self._commit(t)
            if self.tick_hook is not None:
                self.tick_hook(t)
        return self._summary()

    # ---- phase 1: disruptions -----------------------------------------------------------------
    def _phase_disruptions(self, t: int) -> None:
        if self.active:
            still = []
            for d in self.active:
                if d.end <= t:
                    self._expire(d, t)
                else:
                    still.append(d)
            self.active = still
        for timer in self.timers:
            if timer.next_fire <= t:
                self._inject(timer.kind, t)
                timer.next_fire = schedule_disruption(timer.kind, timer.mtbf, t, self.rng["disruptions"])

    def _expire(self, d: ActiveDisruption, t: int) -> None:
        if d.kind is DisruptionKind.OPERATOR_SHORTAGE:
            for nid in d.detail.get("operators", ()):
                self.absent.discard(nid)
        self.dirty = True

    def _inject(self, kind: DisruptionKind, t: int) -> None:
        rng = self.rng["disruptions"]
        dur_rng = self.rng["durations"]
        target = None
        end = t
        detail: dict = {}
        if kind is DisruptionKind.EQUIPMENT_BREAKDOWN:
            candidates = [u for u in self.units.values() if u.status in ("Idle", "Running")]
            if not candidates:
                return
            unit = rng.choice(candidates)
            lo, hi = self.x.EQUIPMENT_DOWNTIME_DURATION_MIN
            dur = dur_rng.randint(lo, hi)
            end = t + dur
            target = unit.nid
            unit.down_until = end
            unit.status = "Down"
            self.batch.update("Equipment", unit.nid, {"status": "Down"})
            self.batch.insert("EquipmentEvent", {
                "nid": f"EE-{self._next('equipment_events'):06d}", "equipment_nid": unit.nid,
                "event_type": "Breakdown", "reason": rng.choice(BREAKDOWN_REASONS), "start_time": self.ts(t),
                "end_time": self.ts(end), "duration_minutes": dur})
            if unit.op is not None:
                op = unit.op
                op.end += dur
                op.delay += dur
                heapq.heappush(self.running, (op.end, op.nid))
        elif kind is DisruptionKind.SUPPLY_DELAY:
            if not self.supply_stations:
                return
            target = rng.choice(self.supply_stations)
            lo, hi = self.meta.supply_delay.duration_min
            end = t + dur_rng.randint(lo, hi)
        elif kind is DisruptionKind.QUALITY_EXCURSION:
            target = rng.choice(self.station_order)
            lo, hi = self.meta.quality_excursion.duration_min
            end = t + dur_rng.randint(lo, hi)
        elif kind is DisruptionKind.OPERATOR_SHORTAGE:
            shift = self.cal.rostered_shift(t)
            crew = sorted(o.nid for o in self.operators if o.shift == shift and o.nid not in self.absent)
            if not crew:
                return
            k = max(1, round(SHORTAGE_FRACTION * len(crew)))
            out = sorted(rng.sample(crew, k))
            self.absent.update(out)
            detail["operators"] = out
            target = shift
            lo, hi = self.meta.operator_shortage.duration_min
            end = t + dur_rng.randint(lo, hi)
        elif kind is DisruptionKind.ORDER_EXPEDITE:
            candidates = [o for o in self.open_orders.values() if not o.expedited]
            if not candidates:
                return
            order = rng.choice(candidates)
            order.expedited = True
            target = order.nid
            self.batch.update("WorkOrder", order.nid, {"expedited": True})
        n = self._next("disruptions")
        self.disruption_counts[kind.value] += 1
        self.batch.insert("DisruptionEvent", {"nid": f"DIS-{n:05d}", "kind": kind.value, "target": target,
                                              "start_time": self.ts(t), "end_time": self.ts(end)})
        if end > t:
            self.active.append(ActiveDisruption(f"DIS-{n:05d}", kind, target, t, end, detail))
        self.dirty = True

    def supply_blocked(self, station: str) -> bool:
        return any(d.kind is DisruptionKind.SUPPLY_DELAY and d.target == station for d in self.active)

    def _fpy(self, station: str) -> float:
        base = self.stations[station].first_pass_yield
        fail = (1.0 - base) * self.profile.failure_factor
        for d in self.active:
            if d.kind is DisruptionKind.QUALITY_EXCURSION and d.target == station:
                fail += self.meta.quality_excursion_fpy_drop
        return max(0.0, 1.0 - fail)

    # ---- phase 2: orders ----------------------------------------------------------------------
    def _phase_orders(self, t: int) -> None:
        day = t // MINUTES_PER_DAY
        if day == self.last_release_day or t % MINUTES_PER_DAY < ORDER_RELEASE_MINUTE:
            return
        if not self.cal.is_operating_day(day):
            return
        self.last_release_day = day
        for pn, acc in self.accumulators.items():
            count, self.accumulators[pn] = next_daily_quantity(acc)
            for _ in range(count):
                self._create_order(pn, t)
        self._wip_snapshot(t)
        self._daily_change_packages(t, day)
        self.dirty = True

    def _create_order(self, pn: str, t: int) -> None:
        n = self._next("orders")
        product = self.template.products[pn]
        nid = f"WO-{n:03d}"
        serial = f"SN-{n:06d}"
        due = t + self.lead_days[pn] * MINUTES_PER_DAY
        order = _Order(nid, pn, product.program_code, serial, t, due)
        self.batch.insert("WorkOrder", {
            "nid": nid, "part_number": pn, "program_code": product.program_code, "state": "Edit", "quantity": 1,
            "expedited": False, "due_on": self.ts(due), "serial_number": serial})
        self.batch.insert("MaterialTrackingUnit", {"nid": serial, "work_order_nid": nid, "part_number": pn,
                                                   "finished_material_nid": f"FG-{pn}"})
        for i, sid in enumerate(product.stations):
            seq = 10 * (i + 1)
            op = _Op(f"{nid}-{seq:03d}", order, sid, seq)
            order.ops.append(op)
            self.op_index[op.nid] = op
            self._next("operations")
            self.batch.insert("WorkOrderOperation", {
                "nid": op.nid, "work_order_nid": nid, "station_nid": sid, "sequence": seq, "state": "New",
                "planned_cycle_time": self.stations[sid].planned_cycle_time})
        transition(order, "release", t)
        self.batch.update("WorkOrder", nid, {"state": order.state})
        self.orders.append(order)
        self.open_orders[nid] = order
        self._enqueue(order.ops[0], t)

    def _enqueue(self, op: _Op, t: int) -> None:
        op.queued_at = t
        self.queues[op.station].append(op)
        self.batch.update("WorkOrderOperation", op.nid, {"queued_at": self.ts(t)})
        self.dirty = True

    def _wip_snapshot(self, t: int) -> None:
        active = {sid: 0 for sid in self.stations}
        for u in self.units.values():
            if u.op is not None:
                active[u.station] += 1
        for sid in self.station_order:
            n = self._next("wip")
            self.batch.insert("WipSnapshot", {"nid": f"WIP-{n:06d}", "station_nid": sid, "snapshot_on": self.ts(t),
                                              "queued": len(self.queues[sid]), "active": active[sid]})

    # ---- phase 3: scheduling ------------------------------------------------------------------
    def idle_unit(self, station: str) -> _Unit | None:
        for u in self.station_units[station]:
            if u.status == "Idle":
                return u
        return None

    def upstream_complete(self, op: _Op) -> bool:
        idx = op.order.ops.index(op)
        return idx == 0 or op.order.ops[idx - 1].state == "Complete"

    def free_operator(self, station: str, t: int) -> str | None:
        shift = self.cal.rostered_shift(t)
        if shift is None:
            return None
        for o in self.certified.get((station, shift), ()):
            if self.op_busy[o.nid] or o.nid in self.absent:
                continue
            if all(exp > t for exp in o.expires.values()):
                return o.nid
        return None

    def _phase_schedule(self, t: int) -> None:
        self.dirty = False
        for sid in self.station_order:
            q = self.queues[sid]
            if not q:
                continue
            q.sort(key=lambda o: (not o.order.expedited, o.queued_at, o.nid))
            i = 0
            while i < len(q):
                op = q[i]
                g = gate_check(op, self, t)
                if g.passed:
                    q.pop(i)
                    self._start(op, g.unit, g.operator_nid, t)
                    continue
                if g.blocking != "upstream":
                    break
                i += 1

    def _start(self, op: _Op, unit_nid: str, operator: str, t: int) -> None:
        st = self.stations[op.station]
        drng = self.rng["durations"]
        setup = drng.randint(*st.setup_time_min)
        cycle = sample_cycle_time(st, drng)
        if self.profile.cycle_stretch > 0:
            cycle = round(cycle * (1.0 + drng.uniform(0.0, self.x.CYCLE_TIME_VARIANCE * self.profile.cycle_stretch)))
        unit = self.units[unit_nid]
        op.start, op.setup, op.cycle = t, setup, cycle
        op.end = t + setup + cycle
        op.unit, op.operator = unit_nid, operator
        transition(op, "start", t)
        unit.status, unit.op = "Running", op
        self.op_busy[operator] = True
        heapq.heappush(self.running, (op.end, op.nid))
        order = op.order
        b = self.batch
        if order.state == "New":
            transition(order, "first_operation_start", t)
            b.update("WorkOrder", order.nid, {"state": order.state, "started_on": self.ts(t)})
        b.update("WorkOrderOperation", op.nid, {"state": op.state, "start_time": self.ts(t), "setup_time": setup,
                                                "cycle_time": cycle, "equipment_nid": unit_nid,
                                                "operator_nid": operator})
        b.update("Equipment", unit_nid, {"status": "Running"})
        b.insert("OperatorAssignment", {"nid": f"OA-{self._next('assignments'):06d}", "operation_nid": op.nid,
                                        "operator_nid": operator, "shift_nid": self.cal.rostered_shift(t),
                                        "assigned_on": self.ts(t)})
        self._consume(op, t)

    def _consume(self, op: _Op, t: int) -> None:
        for mat in self.bom.get(op.order.part_number, {}).get(op.station, []):
            qty = material_quantity(self.template, op.station, mat)
            lot = self._allocate(mat, qty, t)
            self.batch.insert("ActualConsumedMaterial", {
                "nid": f"ACM-{self._next('consumed'):06d}", "operation_nid": op.nid, "material_nid": mat,
                "lot_nid": lot, "mtu_nid": op.order.serial, "quantity": qty})

    def _allocate(self, mat: str, qty: float, t: int) -> str:
        lots = self.lots[mat]
        while lots and lots[0][1] < qty:
            lots.pop(0)
        if not lots:
            self.lot_seq[mat] += 1
            lot = f"LOT-{mat}-{self.lot_seq[mat]:03d}"
            size = max(self.lot_size[mat], qty)
            self.batch.insert("MaterialLot", {"nid": lot, "material_nid": mat,
                                              "supplier_nid": self.x.RAW_MATERIALS[mat].supplier,
                                              "received_on": self.ts(t), "quantity": size})
            self._next("lots")
            lots.append((lot, size))
        lot, remaining = lots[0]
        lots[0] = (lot, remaining - qty)
        return lot

    # ---- phase 4: completion ------------------------------------------------------------------
    def _phase_complete(self, t: int) -> None:
        heap = self.running
        while heap and heap[0][0] <= t:
            end, nid = heapq.heappop(heap)
            op = self.op_index[nid]
            if op.state != "Active" or op.end != end:
                continue  # superseded by a breakdown extension
            self._complete(op, t)

    def _complete(self, op: _Op, t: int) -> None:
        b = self.batch
        transition(op, "complete", t)
        self._next("completed")
        unit = self.units[op.unit]
        unit.op = None
        if unit.status == "Running":
            unit.status = "Idle"
            b.update("Equipment", unit.nid, {"status": "Idle"})
        self.op_busy[op.operator] = False
        st = self.stations[op.station]
        draft = evaluate_quality_gate(op, st, self.rng["quality"], self.fcs.get(op.station, []),
                                      self.x.CAPA_TRIGGER_RATE, fpy=self._fpy(op.station))
        if st.is_quality_gate:
            self.station_quality[op.station]["failed" if draft else "passed"] += 1
        result = ("Fail" if draft else "Pass") if st.is_quality_gate else None
        b.update("WorkOrderOperation", op.nid, {"state": op.state, "end_time": self.ts(op.end),
                                                "delay_minutes": op.delay, "quality_result": result})
        for step in self.x.STEP_TEMPLATES.get(op.station, []):
            b.insert("OperationStepExecution", {"nid": f"OSE-{self._next('steps'):07d}", "operation_nid": op.nid,
                                                "step_template_nid": f"{op.station}/STEP-{step.step}",
                                                "step": step.step, "executed_on": self.ts(t)})
        self._inspect(op, draft, t)
        if draft is not None:
            self._open_ncr(op, draft, t)
        order = op.order
        order.next_idx += 1
        if order.next_idx < len(order.ops):
            self._enqueue(order.ops[order.next_idx], t)
        else:
            transition(order, "last_operation_complete", t)
            b.update("WorkOrder", order.nid, {"state": order.state, "completed_on": self.ts(t)})
            del self.open_orders[order.nid]
        self.dirty = True

    def _inspect(self, op: _Op, draft: NcrDraft | None, t: int) -> None:
        chars = self.chars.get(op.station)
        if not chars:
            return
        rng = self.rng["inspection"]
        bad = rng.randint(0, len(chars) - 1) if draft is not None else -1
        sample = f"INS-{self._next('samples'):06d}"
        pid = self.x.STATION_INSPECTION_PLANS[op.station]
        self.batch.insert("InspectionSample", {"nid": sample, "operation_nid": op.nid, "inspection_plan_nid": pid,
                                               "sampled_on": self.ts(t), "result": "Fail" if draft else "Pass"})
        for i, c in enumerate(chars):
            if c.kind == "attribute":
                value = float(rng.randint(1, 3)) if i == bad else 0.0
            else:
                half = (c.usl - c.lsl) / 2.0
                sigma = half / 4.0
                if i == bad and half > 0:
                    side = 1.0 if rng.random() < 0.5 else -1.0
                    value = c.nominal + side * half * rng.uniform(1.02, 1.4)
                elif sigma == 0:
                    value = c.nominal
                else:
                    value = rng.gauss(c.nominal, sigma)
                    while not c.lsl <= value <= c.usl:
                        value = rng.gauss(c.nominal, sigma)
                value = round(value, 4)
            in_spec = c.lsl <= value <= c.usl
            self.batch.insert("InspectionValue", {"nid": f"IV-{self._next('values'):07d}", "sample_nid": sample,
                                                  "characteristic_nid": c.nid, "value": value, "in_spec": in_spec})

    def _open_ncr(self, op: _Op, draft: NcrDraft, t: int) -> None:
        n = self._next("ncrs")
        nid = f"NCR-{n:05d}"
        lo, hi = self.x.NCR_STATUS_DURATIONS["New"]
        ncr = _Ncr(nid, t + self.rng["lifecycle"].randint(lo, hi))
        self.ncrs[nid] = ncr
        desc = next(fc.description for fc in self.fcs[op.station] if fc.nid == draft.failure_code)
        self.batch.insert("NonConformance", {
            "nid": nid, "operation_nid": op.nid, "work_order_nid": op.order.nid, "station_nid": op.station,
            "failure_code_nid": draft.failure_code, "severity": draft.severity, "state": "New",
            "state_entered_on": self.ts(t), "triggers_capa": draft.triggers_capa})
        self.batch.insert("Defect", {"nid": f"DEF-{self._next('defects'):05d}", "ncr_nid": nid,
                                     "failure_code_nid": draft.failure_code, "station_nid": op.station,
                                     "quantity": 1, "description": desc})
        if draft.triggers_capa:
            self._open_capa(nid, t)

    def _open_capa(self, ncr_nid: str, t: int) -> None:
        rng = self.rng["lifecycle"]
        meta = self.meta
        nid = f"CAPA-{self._next('capas'):04d}"
        total = round(rng.uniform(*meta.capa_duration_days) * MINUTES_PER_DAY)
        statuses = meta.capa_statuses
        steps = len(statuses) - 1
        schedule = [t + round(total * (i + 1) / steps) for i in range(steps)]
        capa_type = rng.choice(meta.capa_types)
        self.capas[nid] = _Capa(nid, 0, schedule)
        self.batch.insert("QualityAction", {"nid": nid, "ncr_nid": ncr_nid, "capa_type": capa_type,
                                            "status": statuses[0], "opened_on": self.ts(t),
                                            "due_on": self.ts(t + meta.capa_due_days * MINUTES_PER_DAY)})
        for k in range(1, rng.randint(2, 4) + 1):
            self.batch.insert("QualityActionTask", {"nid": f"{nid}/T{k}", "quality_action_nid": nid, "step": k,
                                                    "description": ("Containment", "Root cause analysis",
                                                                    "Corrective action", "Effectiveness check")[k - 1]})

    # ---- phase 5: periodic events -------------------------------------------------------------
    def _phase_equipment(self, t: int) -> None:
        b = self.batch
        for unit in self.units.values():
            if unit.status == "Down" and unit.down_until <= t:
                unit.status = "Running" if unit.op is not None else "Idle"
                unit.down_until = None
                b.update("Equipment", unit.nid, {"status": unit.status})
                self.dirty = True
            elif unit.status == "Maintenance" and unit.pm_until <= t:
                unit.status = "Idle"
                unit.pm_until = None
                b.update("Equipment", unit.nid, {"status": "Idle"})
                self.dirty = True
            if self.pm_minutes > 0 and unit.status == "Idle" and unit.pm_due <= t:
                unit.status = "Maintenance"
                unit.pm_until = t + self.pm_minutes
                unit.pm_due += 7 * MINUTES_PER_DAY
                b.update("Equipment", unit.nid, {"status": "Maintenance"})
                b.insert("EquipmentEvent", {
                    "nid": f"EE-{self._next('equipment_events'):06d}", "equipment_nid": unit.nid,
                    "event_type": "PlannedMaintenance", "reason": "Weekly preventive maintenance",
                    "start_time": self.ts(t), "end_time": self.ts(unit.pm_until), "duration_minutes": self.pm_minutes})

    def _phase_lifecycle(self, t: int) -> None:
        b = self.batch
        rng = self.rng["lifecycle"]
        durations = self.x.NCR_STATUS_DURATIONS
        for nid in list(self.ncrs):
            ncr = self.ncrs[nid]
            if ncr.next_at > t:
                continue
            if ncr.state == "PendingDisposition":
                disp = rng.weighted_choice([d.code for d in self.x.NCR_DISPOSITIONS],
                                           [d.weight for d in self.x.NCR_DISPOSITIONS])
                transition(ncr, "disposition", t)
                b.update("NonConformance", nid, {"state": ncr.state, "disposition": disp,
                                                 "state_entered_on": self.ts(t), "closed_on": self.ts(t)})
                del self.ncrs[nid]
            else:
                transition(ncr, "advance", t)
                lo, hi = durations[ncr.state]
                ncr.next_at = t + rng.randint(lo, hi)
                b.update("NonConformance", nid, {"state": ncr.state, "state_entered_on": self.ts(t)})
        statuses = self.meta.capa_statuses
        for nid in list(self.capas):
            capa = self.capas[nid]
            if capa.schedule[capa.status_idx] > t:
                continue
            capa.status_idx += 1
            values = {"status": statuses[capa.status_idx]}
            if capa.status_idx == len(statuses) - 1:
                values["closed_on"] = self.ts(t)
                del self.capas[nid]
            b.update("QualityAction", nid, values)
        cp_statuses = self.x.CHANGE_PACKAGE_PARAMS.statuses
        crng = self.rng["changes"]
        for nid in list(self.cps):
            cp = self.cps[nid]
            if cp.next_at > t:
                continue
            cp.status_idx += 1
            values = {"status": cp_statuses[cp.status_idx], "status_entered_on": self.ts(t)}
            if cp.status_idx == len(cp_statuses) - 1:
                values["closed_on"] = self.ts(t)
                del self.cps[nid]
            else:
                cp.next_at = t + self._cp_dwell(crng)
            b.update("ChangePackage", nid, values)

    def _cp_dwell(self, rng: Xoshiro256) -> int:
        lo, hi = self.x.CHANGE_PACKAGE_PARAMS.status_durations_days
        return max(LIFECYCLE_CADENCE, round(rng.uniform(lo, hi) * MINUTES_PER_DAY))

    def _daily_change_packages(self, t: int, day: int) -> None:
        count, self.cp_accumulator = next_daily_quantity(self.cp_accumulator)
        params = self.x.CHANGE_PACKAGE_PARAMS
        kinds = [None] * count
        if day > 0 and day % self.x.BOP_REVISION_INTERVAL_DAYS == 0:
            bop = next((c for c in params.change_types if "BOP" in c.upper()), params.change_types[-1])
            kinds.append(bop)
        rng = self.rng["changes"]
        for kind in kinds:
            change_type = kind or rng.choice(params.change_types)
            pn = rng.choice(list(self.template.products))
            station = rng.choice(self.template.products[pn].stations)
            n = self._next("change_packages")
            nid = f"CP-{n:03d}"
            self.cps[nid] = _ChangePackage(nid, 0, t + self._cp_dwell(rng))
            self.batch.insert("ChangePackage", {
                "nid": nid, "change_type": change_type, "status": params.statuses[0],
                "title": f"{change_type} {pn} at {self.stations[station].name}", "opened_on": self.ts(t),
                "status_entered_on": self.ts(t), "part_number": pn, "station_nid": station})
            plan = self.x.PROCESS_PLANS[pn].nid
            for item_type, item in (("Product", pn), ("Station", station), ("ProcessPlan", plan)):
                self.batch.insert("ChangePackageAffectedItem", {"nid": f"{nid}/{item_type}",
                                                                "change_package_nid": nid, "item_type": item_type,
                                                                "item_nid": item})

    # ---- summary ------------------------------------------------------------------------------
    def _summary(self) -> RunSummary:
        passed = sum(v["passed"] for v in self.station_quality.values())
        failed = sum(v["failed"] for v in self.station_quality.values())
        days = self.cal.operating_days_in(self.cfg.duration_days)
        c = self.counters
        kpis = {
            "fpy": passed / (passed + failed) if passed + failed else None,
            "throughput": c["orders"] / days if days else None,
            "completed_throughput": sum(1 for o in self.orders if o.state == "Complete") / days if days else None,
            "ncr_rate": c["ncrs"] / c["completed"] if c["completed"] else None,
        }
        counts = {
            "work_orders": c["orders"],
            "work_orders_completed": sum(1 for o in self.orders if o.state == "Complete"),
            "operations": c["operations"],
            "operations_completed": c["completed"],
            "ncrs": c["ncrs"],
            "capas": c["capas"],
            "change_packages": c["change_packages"],
            "inspection_samples": c["samples"],
            "equipment_events": c["equipment_events"],
            "disruptions": dict(self.disruption_counts),
        }
        return RunSummary(
            template_id=self.cfg.template_id, template_version=self.template_version, seed=self.cfg.seed,
            profile=self.cfg.profile, duration_days=self.cfg.duration_days, t0=self.ts(0), t_end=self.ts(self.T),
            operating_days=days, seed_rows=self.seed_rows, total_rows=self.store.total_rows(),
            last_committed_tick=self.last_committed, counts=counts,
            station_quality={k: dict(v) for k, v in self.station_quality.items()}, kpis=kpis)


def gate_check(op: _Op, state: Simulation, t: int) -> GateResult:
    """Evaluate the four start conditions for ``op`` at minute ``t``."""
    unit = state.idle_unit(op.station)
    supply_ok = not state.supply_blocked(op.station)
    upstream_ok = state.upstream_complete(op)
    operator = state.free_operator(op.station, t)
    return GateResult(equipment=unit is not None, supply=supply_ok, upstream=upstream_ok,
                      operator=operator is not None, unit=unit.nid if unit else None, operator_nid=operator)


def run(cfg: RunConfig, registry: TemplateRegistry, store: Store,
        tick_hook: Callable[[int], None] | None = None) -> RunSummary:
    """Run one simulation. Loads ``cfg.template_id`` into the registry when another template is active."""
    try:
        active = registry.current()
    except Exception:
        active = None
    if active is None or active.template_id != cfg.template_id:
        load_template(registry, cfg.template_id)
    summary = Simulation(cfg, registry, store, tick_hook).run()
    logger.info("run %s seed=%s: %s", cfg.template_id, cfg.seed, summary.counts)
    return summary
