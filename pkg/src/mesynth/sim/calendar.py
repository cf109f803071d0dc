"""Shift calendar: which simulation minutes are working time."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Sequence

from ..domain.model import WEEKDAYS, ShiftDef

MINUTES_PER_DAY = 1440
MINUTES_PER_WEEK = 7 * MINUTES_PER_DAY


def hhmm(value: str) -> int:
    h, m = value.split(":")
    return int(h) * 60 + int(m)


@dataclass(frozen=True)
class ShiftWindow:
    name: str
    start: int  # minute of day
    length: int
    break_offset: int  # minutes from shift start
    break_length: int

    def offset(self, minute_of_day: int) -> int:
        return (minute_of_day - self.start) % MINUTES_PER_DAY

    def covers(self, minute_of_day: int) -> bool:
        return self.offset(minute_of_day) < self.length


def shift_windows(shifts: Iterable[ShiftDef], break_min: int) -> list[ShiftWindow]:
    out = []
    for s in shifts:
        start = hhmm(s.start)
        length = (hhmm(s.end) - start) % MINUTES_PER_DAY or MINUTES_PER_DAY
        brk = (hhmm(s.break_start) - start) % MINUTES_PER_DAY
        out.append(ShiftWindow(s.name, start, length, brk, break_min))
    return out


def is_working_time(t: int, shifts: Sequence[ShiftDef], operating_days: Sequence[str], break_min: int,
                    t0_weekday: int = 0) -> bool:
    """True iff minute ``t`` is inside a shift on an operating day and outside that shift's break.

    ``t`` counts minutes from a midnight whose weekday index is ``t0_weekday``
    (0 = Monday). A shift that crosses midnight belongs to the day it starts.
    """
    return ShiftCalendar(shift_windows(shifts, break_min), operating_days, t0_weekday).shift_at(t) is not None


class ShiftCalendar:
    """Minute-of-week lookup table built once per run."""

    def __init__(self, windows: Sequence[ShiftWindow], operating_days: Sequence[str], t0_weekday: int = 0):
        self.windows = list(windows)
        self.operating = frozenset(WEEKDAYS.index(d) for d in operating_days)
        self.t0_weekday = t0_weekday
        # index into windows, or -1 when not working; indexed by minute of week (Mon 00:00 = 0)
        table = [-1] * MINUTES_PER_WEEK
        for idx, w in enumerate(self.windows):
            for day in self.operating:
                base = day * MINUTES_PER_DAY + w.start
                for off in range(w.length):
                    if w.break_offset <= off < w.break_offset + w.break_length:
                        continue
                    table[(base + off) % MINUTES_PER_WEEK] = idx
        self._table = table
        # shift membership ignoring breaks, for operator rosters
        on_shift = [-1] * MINUTES_PER_WEEK
        for idx, w in enumerate(self.windows):
            for day in self.operating:
                base = day * MINUTES_PER_DAY + w.start
                for off in range(w.length):
                    on_shift[(base + off) % MINUTES_PER_WEEK] = idx
        self._on_shift = on_shift

    @classmethod
    def from_template(cls, t, t0: datetime) -> "ShiftCalendar":
        x = t.typed
        if t0.hour or t0.minute:
            raise ValueError("run start must be at midnight")
        return cls(shift_windows(x.SHIFTS, x.BREAK_DURATION_MIN), x.OPERATING_DAYS, t0.weekday())

    def _mow(self, t: int) -> int:
        return (t + self.t0_weekday * MINUTES_PER_DAY) % MINUTES_PER_WEEK

    def shift_at(self, t: int) -> str | None:
        idx = self._table[self._mow(t)]
        return None if idx < 0 else self.windows[idx].name

    def is_working(self, t: int) -> bool:
        return self._table[self._mow(t)] >= 0

    def rostered_shift(self, t: int) -> str | None:
        """Shift whose crew is on site at ``t`` (breaks included)."""
        idx = self._on_shift[self._mow(t)]
        return None if idx < 0 else self.windows[idx].name

    def weekday(self, t: int) -> int:
        return (self.t0_weekday + t // MINUTES_PER_DAY) % 7

    def is_operating_day(self, day_index: int) -> bool:
        return (self.t0_weekday + day_index) % 7 in self.operating

    def operating_days_in(self, days: int) -> int:
        return sum(1 for d in range(days) if self.is_operating_day(d))

    def working_minutes_per_week(self) -> int:
        return sum(1 for v in self._table if v >= 0)

    def working_minutes_on_day(self, day_index: int) -> int:
        """Working minutes between midnight of ``day_index`` and the next midnight."""
        start = self._mow(day_index * MINUTES_PER_DAY)
        return sum(1 for v in self._table[start:start + MINUTES_PER_DAY] if v >= 0)


def iso(t0: datetime, t: int) -> str:
    return (t0 + timedelta(minutes=t)).isoformat(timespec="seconds")
