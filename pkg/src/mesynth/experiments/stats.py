"""Small-sample statistics for the two experiments."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy.stats import t as student_t

# relative tolerance when deciding whether a table is "as extreme" as the observed one
TIE_RTOL = 1e-7


def _log_choose(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def fishers_exact(a: int, b: int, c: int, d: int) -> float:
    """Two-sided Fisher exact p-value for the 2x2 table [[a, b], [c, d]].

    Sums the hypergeometric probabilities of every table with the observed
    margins whose probability does not exceed the observed one.
    """
    if min(a, b, c, d) < 0:
        raise ValueError("cell counts must be non-negative")
    row1, col1, n = a + b, a + c, a + b + c + d
    lo, hi = max(0, col1 - (n - row1)), min(row1, col1)
    if lo == hi:
        return 1.0
    denom = _log_choose(n, col1)

    def logp(x: int) -> float:
        return _log_choose(row1, x) + _log_choose(n - row1, col1 - x) - denom

    observed = logp(a)
    cutoff = observed + math.log1p(TIE_RTOL)
    terms = [logp(x) for x in range(lo, hi + 1)]
    keep = [lp for lp in terms if lp <= cutoff]
    top = max(keep)
    p = math.exp(top) * math.fsum(math.exp(lp - top) for lp in keep)
    return min(1.0, p)


def wilson_ci(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n <= 0 or not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n and n > 0")
    p = k / n
    z2 = z * z
    centre = (p + z2 / (2 * n)) / (1 + z2 / n)
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
    lo, hi = centre - half, centre + half
    # exact boundaries: rounding must not push the k=0 / k=n endpoints off 0 / 1
    if k == 0:
        lo = 0.0
    if k == n:
        hi = 1.0
    return max(0.0, lo), min(1.0, hi)


def cohens_h(p1: float, p2: float) -> float:
    for p in (p1, p2):
        if not 0.0 <= p <= 1.0:
            raise ValueError("proportions must lie in [0, 1]")
    return 2 * math.asin(math.sqrt(p1)) - 2 * math.asin(math.sqrt(p2))


@dataclass(frozen=True)
class MeanCI:
    n: int
    mean: Optional[float]
    stdev: Optional[float]
    lo: Optional[float]
    hi: Optional[float]
    t_crit: Optional[float]

    @property
    def insufficient_n(self) -> bool:
        return self.n < 2


def t_confidence_interval(xs: Sequence[float], level: float = 0.95) -> MeanCI:
    """mean ± t_{(1-level)/2, n-1} · s/√n; bounds are None below two observations."""
    n = len(xs)
    if n == 0:
        return MeanCI(0, None, None, None, None, None)
    mean = statistics.fmean(xs)
    if n < 2:
        return MeanCI(n, mean, None, None, None, None)
    s = statistics.stdev(xs)
    tc = float(student_t.ppf(1 - (1 - level) / 2, n - 1))
    half = tc * s / math.sqrt(n)
    return MeanCI(n, mean, s, mean - half, mean + half, tc)
