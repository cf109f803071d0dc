"""Calibration KPIs recomputed from the operational store."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..sim.engine import RunSummary
from ..store.store import Store


@dataclass(frozen=True)
class KpiSet:
    fpy: Optional[float]
    fpy_by_station: dict[str, Optional[float]]
    gate_counts: dict[str, tuple[int, int]]  # station -> (passed, failed)
    throughput: Optional[float]
    ncr_rate: Optional[float]
    flags: tuple[str, ...] = field(default=())

    def get(self, name: str) -> Optional[float]:
        return {"fpy": self.fpy, "throughput": self.throughput, "ncr_rate": self.ncr_rate}[name]


def extract_kpis(summary: RunSummary, store: Store) -> KpiSet:
    """FPY over quality-gate results, orders created per operating day, NCRs per completed operation."""
    counts: dict[str, list[int]] = {}
    completed = 0
    for op in store.iter_rows("WorkOrderOperation"):
        if op["state"] != "Complete":
            continue
        completed += 1
        result = op["quality_result"]
        if result is None:
            continue
        c = counts.setdefault(op["station_nid"], [0, 0])
        c[0 if result == "Pass" else 1] += 1
    passed = sum(c[0] for c in counts.values())
    failed = sum(c[1] for c in counts.values())
    flags = []
    fpy = passed / (passed + failed) if passed + failed else None
    if fpy is None:
        flags.append("no_gate_results")
    orders = store.count("WorkOrder")
    throughput = orders / summary.operating_days if summary.operating_days else None
    if throughput is None:
        flags.append("no_operating_days")
    ncrs = store.count("NonConformance")
    ncr_rate = ncrs / completed if completed else None
    if ncr_rate is None:
        flags.append("no_completed_operations")
    return KpiSet(
        fpy=fpy,
        fpy_by_station={s: c[0] / (c[0] + c[1]) for s, c in sorted(counts.items())},
        gate_counts={s: (c[0], c[1]) for s, c in sorted(counts.items())},
        throughput=throughput,
        ncr_rate=ncr_rate,
        flags=tuple(flags),
    )
