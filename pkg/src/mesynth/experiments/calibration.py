"""Multi-seed calibration of simulated KPIs against each template's configured targets.

Targets per template:

* ``fpy``: the template's FIRST_PASS_YIELD_RANGE.
* ``throughput``: nominal daily order rate (sum of annual volumes over
  working days per year) plus or minus one order per day.
* ``ncr_rate``: the complement of the FPY range scaled by the share of
  routed operations that pass through a quality gate, since only gate
  failures raise NCRs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from ..domain.model import DomainTemplate
from ..domain.registry import TemplateRegistry, load_template
from ..sim.engine import RunConfig, run
from ..store.store import Store
from .kpis import KpiSet, extract_kpis
from .stats import MeanCI, t_confidence_interval

KPIS = ("fpy", "throughput", "ncr_rate")
DEFAULT_SEEDS = tuple(range(42, 52))
THROUGHPUT_BAND = 1.0


def gate_fraction(t: DomainTemplate) -> float:
    stations = t.stations
    total = gated = 0.0
    for p in t.products.values():
        total += p.annual_volume * len(p.stations)
        gated += p.annual_volume * sum(1 for s in p.stations if stations[s].is_quality_gate)
    return gated / total if total else 0.0


def target_ranges(t: DomainTemplate) -> dict[str, tuple[float, float]]:
    x = t.typed
    lo, hi = x.FIRST_PASS_YIELD_RANGE
    nominal = sum(p.annual_volume for p in t.products.values()) / x.WORKING_DAYS_PER_YEAR
    g = gate_fraction(t)
    return {
        "fpy": (lo, hi),
        "throughput": (nominal - THROUGHPUT_BAND, nominal + THROUGHPUT_BAND),
        "ncr_rate": ((1 - hi) * g, (1 - lo) * g),
    }


@dataclass(frozen=True)
class CalibrationCell:
    template_id: str
    kpi: str
    target: tuple[float, float]
    seeds: tuple[int, ...]
    observations: tuple[float, ...]
    ci: MeanCI

    @property
    def insufficient_n(self) -> bool:
        return self.ci.insufficient_n

    @property
    def strictly_within(self) -> Optional[bool]:
        """Both CI endpoints strictly inside the target; None when n is too small for a CI."""
        if self.ci.lo is None or self.ci.hi is None:
            return None
        lo, hi = self.target
        return lo < self.ci.lo and self.ci.hi < hi

    def to_dict(self) -> dict:
        return {"template_id": self.template_id, "kpi": self.kpi, "target": list(self.target),
                "seeds": list(self.seeds), "observations": list(self.observations), "n": self.ci.n,
                "mean": self.ci.mean, "stdev": self.ci.stdev, "ci": [self.ci.lo, self.ci.hi],
                "t_crit": self.ci.t_crit, "strictly_within": self.strictly_within,
                "insufficient_n": self.insufficient_n}


@dataclass
class CalibrationReport:
    days: int
    profile: str
    cells: list[CalibrationCell] = field(default_factory=list)
    station_fpy: dict[str, dict[str, list[float]]] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)  # "template/seed" -> error

    def cell(self, template_id: str, kpi: str) -> CalibrationCell:
        for c in self.cells:
            if c.template_id == template_id and c.kpi == kpi:
                return c
        raise KeyError((template_id, kpi))

    @property
    def all_within(self) -> bool:
        return bool(self.cells) and all(c.strictly_within for c in self.cells)

    def to_dict(self) -> dict:
        return {"days": self.days, "profile": self.profile, "cells": [c.to_dict() for c in self.cells],
                "station_fpy": self.station_fpy, "failures": self.failures}

    def render(self) -> str:
        head = f"{'template':<12} {'kpi':<10} {'target':<19} {'n':>2} {'mean':>9} {'95% CI':<21} within"
        lines = [head, "-" * len(head)]
        for c in self.cells:
            fmt = "{:.4f}" if c.kpi != "throughput" else "{:.3f}"
            tgt = f"[{fmt.format(c.target[0])}, {fmt.format(c.target[1])}]"
            mean = fmt.format(c.ci.mean) if c.ci.mean is not None else "-"
            ci = f"[{fmt.format(c.ci.lo)}, {fmt.format(c.ci.hi)}]" if c.ci.lo is not None else "insufficient n"
            within = {True: "yes", False: "NO", None: "n/a"}[c.strictly_within]
            lines.append(f"{c.template_id:<12} {c.kpi:<10} {tgt:<19} {c.ci.n:>2} {mean:>9} {ci:<21} {within}")
        for key, err in sorted(self.failures.items()):
            lines.append(f"failed: {key}: {err}")
        return "\n".join(lines)


def simulate_kpis(template_id: str, seed: int, days: int, profile: str = "stable") -> KpiSet:
    registry = TemplateRegistry()
    load_template(registry, template_id)
    store = Store()
    summary = run(RunConfig(template_id, duration_days=days, seed=seed, profile=profile), registry, store)
    return extract_kpis(summary, store)


def run_calibration(template_ids: Iterable[str], seeds: Sequence[int] = DEFAULT_SEEDS, days: int = 30,
                    profile: str = "stable",
                    simulate: Callable[[str, int, int, str], KpiSet] = simulate_kpis) -> CalibrationReport:
    """Run every (template, seed) cell; a failing cell is recorded and the rest continue."""
    report = CalibrationReport(days, profile)
    for tid in template_ids:
        registry = TemplateRegistry()
        load_template(registry, tid)
        targets = target_ranges(registry.active)
        obs: dict[str, list[float]] = {k: [] for k in KPIS}
        used: dict[str, list[int]] = {k: [] for k in KPIS}
        per_station: dict[str, list[float]] = {}
        for seed in seeds:
            try:
                k = simulate(tid, seed, days, profile)
            except Exception as exc:  # noqa: BLE001 - per-cell isolation
                report.failures[f"{tid}/{seed}"] = f"{type(exc).__name__}: {exc}"
                continue
            for name in KPIS:
                value = k.get(name)
                if value is not None:
                    obs[name].append(value)
                    used[name].append(seed)
            for sid, v in k.fpy_by_station.items():
                if v is not None:
                    per_station.setdefault(sid, []).append(v)
        report.station_fpy[tid] = per_station
        for name in KPIS:
            report.cells.append(CalibrationCell(tid, name, targets[name], tuple(used[name]), tuple(obs[name]),
                                                t_confidence_interval(obs[name])))
    return report
