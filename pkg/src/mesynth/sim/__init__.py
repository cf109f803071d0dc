from .accumulator import FractionalAccumulator, next_daily_quantity
from .calendar import ShiftCalendar, is_working_time
from .disruptions import DisruptionKind, DisruptionTimer, schedule_disruption
from .engine import (
    DEFAULT_T0,
    GateResult,
    NcrDraft,
    RunConfig,
    RunSummary,
    Simulation,
    StoreWriteFailure,
    evaluate_quality_gate,
    gate_check,
    run,
    sample_cycle_time,
)
from .rng import RngStreams, Xoshiro256
from .seeds import SeedBatch, generate_seeds
from .states import IllegalTransition, transition
