"""Shared simulation runs for the test suite."""

from __future__ import annotations

import functools
from dataclasses import dataclass

from mesynth.domain.registry import TemplateRegistry
from mesynth.sim.engine import RunConfig, RunSummary, run
from mesynth.star.builder import StarSchema, rebuild_from_registry
from mesynth.store.store import Store


@dataclass
class Run:
    registry: TemplateRegistry
    store: Store
    summary: RunSummary

    @functools.cached_property
    def star(self) -> StarSchema:
        return rebuild_from_registry(self.store, self.registry)


@functools.lru_cache(maxsize=None)
def simulate(template_id: str, days: int = 30, seed: int = 42, profile: str = "stable") -> Run:
    """Shared read-only run; tests must not mutate the returned store."""
    registry = TemplateRegistry()
    store = Store()
    summary = run(RunConfig(template_id, duration_days=days, seed=seed, profile=profile), registry, store)
    return Run(registry, store, summary)
