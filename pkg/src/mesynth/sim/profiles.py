"""Run profiles: multipliers applied on top of template rates.

The stressful multipliers are tuned (not sourced) so that aerospace lands
near an FPY of 0.89 and an NCR rate near 11% over a 30-day run.
"""

from __future__ import annotations

from dataclasses import dataclass

from .disruptions import DisruptionKind as K


@dataclass(frozen=True)
class Profile:
    name: str
    # rate multipliers per disruption kind; 0 disables the timer
    rate: dict
    # failure probability (1 - FPY) is multiplied by this factor
    failure_factor: float = 1.0
    # cycle-time draws are stretched by up to CYCLE_TIME_VARIANCE * this factor
    cycle_stretch: float = 0.0


PROFILES = {
    "stable": Profile(
        "stable",
        rate={K.EQUIPMENT_BREAKDOWN: 1.0, K.SUPPLY_DELAY: 1.0, K.QUALITY_EXCURSION: 0.0,
              K.OPERATOR_SHORTAGE: 1.0, K.ORDER_EXPEDITE: 1.0},
    ),
    "stressful": Profile(
        "stressful",
        rate={K.EQUIPMENT_BREAKDOWN: 6.0, K.SUPPLY_DELAY: 4.0, K.QUALITY_EXCURSION: 2.0,
              K.OPERATOR_SHORTAGE: 3.0, K.ORDER_EXPEDITE: 2.0},
        failure_factor=2.0,
        cycle_stretch=2.0,
    ),
}


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; expected one of {sorted(PROFILES)}") from None
