"""Carry-forward quantisation of fractional daily rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class FractionalAccumulator:
    """Daily rate with the fractional remainder carried to the next day.

    Arithmetic is exact (:class:`fractions.Fraction`) so a year of draws at
    ``annual_volume / working_days`` sums to ``annual_volume`` with no float drift.
    """

    rate: Fraction
    carry: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", Fraction(self.rate))
        object.__setattr__(self, "carry", Fraction(self.carry))
        if self.rate < 0:
            raise ValueError("rate must be non-negative")

    @classmethod
    def for_volume(cls, annual_volume: int, working_days: int) -> "FractionalAccumulator":
        return cls(Fraction(annual_volume, working_days))


def next_daily_quantity(acc: FractionalAccumulator) -> tuple[int, FractionalAccumulator]:
    total = acc.carry + acc.rate
    count = math.floor(total)
    return count, FractionalAccumulator(acc.rate, total - count)
