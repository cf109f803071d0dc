"""Independent reference implementations used as test oracles.

None of these import the code under test; they recompute expected values by
brute force or exact arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
from scipy import stats


def fisher_bruteforce(a: int, b: int, c: int, d: int) -> Fraction:
    """Two-sided Fisher p as an exact rational: sum of tables no more probable than the observed one."""
    r1, r2, c1 = a + b, c + d, a + c
    n = r1 + r2
    denom = math.comb(n, c1)

    def prob(x: int) -> Fraction:
        return Fraction(math.comb(r1, x) * math.comb(r2, c1 - x), denom)

    observed = prob(a)
    lo, hi = max(0, c1 - r2), min(r1, c1)
    return sum((p for p in (prob(x) for x in range(lo, hi + 1)) if p <= observed), Fraction(0))


def wilson_mp(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    mpmath.mp.dps = 40
    k, n, z = mpmath.mpf(k), mpmath.mpf(n), mpmath.mpf(z)
    p = k / n
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * mpmath.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    return float(centre - half), float(centre + half)


def cohens_h_mp(p1, p2) -> float:
    mpmath.mp.dps = 50

    def phi(p) -> mpmath.mpf:
        p = Fraction(p)
        return 2 * mpmath.asin(mpmath.sqrt(mpmath.mpf(p.numerator) / p.denominator))

    return float(phi(p1) - phi(p2))


def bresenham_totals(volume: int, days: int, window: int) -> list[int]:
    """Daily counts from exact rationals: day i emits floor((i+1)r) - floor(i r)."""
    r = Fraction(volume, days)
    return [math.floor((i + 1) * r) - math.floor(i * r) for i in range(window)]


def discrete_uniform_ks(xs, lo: int, hi: int) -> tuple[float, float]:
    """KS statistic against the discrete uniform on {lo..hi}, evaluated on both sides of every support point.

    The p-value uses the continuous-null distribution, which is conservative for a discrete null.
    """
    xs = np.sort(np.asarray(xs))
    n = len(xs)
    support = np.arange(lo, hi + 1)
    m = hi - lo + 1
    right = np.searchsorted(xs, support, side="right") / n
    left = np.searchsorted(xs, support, side="left") / n
    d = max(np.max(np.abs(right - (support - lo + 1) / m)), np.max(np.abs(left - (support - lo) / m)))
    return float(d), float(stats.kstwo.sf(d, n))


def referential_audit(store) -> tuple[list[str], list[str]]:
    """Scan every row: (foreign keys that do not resolve, required fields that are null)."""
    dangling, nulls = [], []
    catalog = store.catalog
    keys = {name: set(store.keys(name)) for name in catalog}
    for name in catalog:
        tdef = catalog[name]
        fks = tdef.foreign_keys
        required = tdef.required
        for row in store.iter_rows(name):
            for col, ref in fks.items():
                v = row.get(col)
                if v is not None and v not in keys[ref]:
                    dangling.append(f"{name}.{col}={v}")
            for col in required:
                if row.get(col) is None:
                    nulls.append(f"{name}.{col}@{row.get(tdef.primary_key)}")
    return dangling, nulls


def week_calendar(shifts: list[tuple[int, int, int, int]], operating_days: set[int]) -> set[int]:
    """Working minutes of one week from (start, end, break_start, break_len) in minutes-of-day, Monday=0.

    Shifts ending at or before their start wrap past midnight and belong to the day they start.
    """
    out = set()
    for day in range(7):
        if day not in operating_days:
            continue
        for start, end, brk, brk_len in shifts:
            length = (end - start) % 1440 or 1440
            for off in range(length):
                m = (start + off) % 1440
                in_break = 0 <= (m - brk) % 1440 < brk_len
                if not in_break:
                    out.add((day * 1440 + start + off) % (7 * 1440))
    return out
