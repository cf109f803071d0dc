"""Exponential disruption timers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .rng import Xoshiro256

MIN_GAP_MIN = 5


class DisruptionKind(str, Enum):
    EQUIPMENT_BREAKDOWN = "equipment_breakdown"
    SUPPLY_DELAY = "supply_delay"
    QUALITY_EXCURSION = "quality_excursion"
    OPERATOR_SHORTAGE = "operator_shortage"
    ORDER_EXPEDITE = "order_expedite"


def schedule_disruption(kind: DisruptionKind | str, mtbf: float, now: int, rng: Xoshiro256) -> int:
    """Next firing minute: ``now + max(5, round(X))`` with ``X ~ Exponential(mean=mtbf)``."""
    if mtbf <= 0:
        raise ValueError(f"mtbf must be positive for {kind}")
    return now + max(MIN_GAP_MIN, round(rng.expovariate(mtbf)))


@dataclass
class DisruptionTimer:
    kind: DisruptionKind
    mtbf: float
    next_fire: int
    active_until: Optional[int] = None
    target: Optional[str] = None


@dataclass
class ActiveDisruption:
    nid: str
    kind: DisruptionKind
    target: Optional[str]
    start: int
    end: int
    detail: dict
