"""The single active-template registry.

Simulator, seed generator, star-schema builder and tool layer all read the
active template through one :class:`TemplateRegistry`. Nothing else keeps a
template reference across a load.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .model import DomainTemplate
from .parser import TemplateError, parse_template
from .relations import ValidationReport, validate_relations

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"
SHIPPED_TEMPLATES = ("aerospace", "pharma", "automotive", "electronics", "beverages", "warehousing")


class UnknownTemplate(TemplateError):
    pass


class NoActiveTemplate(TemplateError):
    pass


class RelationalViolations(TemplateError):
    def __init__(self, template_id: str, report: ValidationReport):
        self.template_id = template_id
        self.report = report
        detail = "; ".join(v.message for v in report.violations)
        super().__init__(f"template {template_id!r} violates relational constraints: {detail}")


@dataclass(frozen=True)
class ActiveTemplate:
    template: DomainTemplate
    template_id: str
    version: int


Subscriber = Callable[[ActiveTemplate], None]


def read_template_document(template_id: str, template_dir: Path | str | None = None) -> bytes:
    directory = Path(template_dir) if template_dir is not None else TEMPLATE_DIR
    path = directory / f"{template_id}.json"
    if not path.is_file():
        raise UnknownTemplate(f"unknown template {template_id!r} (looked in {directory})")
    return path.read_bytes()


def available_templates(template_dir: Path | str | None = None) -> list[str]:
    directory = Path(template_dir) if template_dir is not None else TEMPLATE_DIR
    return sorted(p.stem for p in directory.glob("*.json"))


class TemplateRegistry:
    def __init__(self, template_dir: Path | str | None = None):
        self.template_dir = Path(template_dir) if template_dir is not None else TEMPLATE_DIR
        self._lock = threading.RLock()
        self._current: ActiveTemplate | None = None
        self._version = 0
        self._subscribers: list[Subscriber] = []

    @property
    def version(self) -> int:
        return self._version

    def current(self) -> ActiveTemplate:
        cur = self._current
        if cur is None:
            raise NoActiveTemplate("no template loaded")
        return cur

    @property
    def active(self) -> DomainTemplate:
        return self.current().template

    @property
    def template_id(self) -> str:
        return self.current().template_id

    def subscribe(self, callback: Subscriber) -> Callable[[], None]:
        with self._lock:
            self._subscribers.append(callback)

        def unsubscribe() -> None:
            with self._lock:
                if callback in self._subscribers:
                    self._subscribers.remove(callback)
        return unsubscribe

    def install(self, template: DomainTemplate) -> ActiveTemplate:
        """Validate and activate an already-parsed template."""
        report = validate_relations(template)
        if not report.ok:
            raise RelationalViolations(template.template_id, report)
        with self._lock:
            self._version += 1
            cur = ActiveTemplate(template, template.template_id, self._version)
            self._current = cur
            subscribers = list(self._subscribers)
            for cb in subscribers:
                cb(cur)
        logger.info("template %s active (version %d)", template.template_id, cur.version)
        return cur


def load_template(registry: TemplateRegistry, template_id: str) -> ActiveTemplate:
    """Load ``template_id`` into the registry; on any failure the previous template stays active."""
    document = read_template_document(template_id, registry.template_dir)
    template = parse_template(document, template_id)
    return registry.install(template)
