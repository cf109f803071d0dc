"""Outcome classification for emitted tool calls.

Rules, applied per identifier argument in this order:

1. exact member of the parameter's vocabulary set (or, for run-derived
   identifiers, matches the pattern and exists in the run): valid;
2. matches a generic manufacturing identifier shape such as ``Line-1``,
   ``Station-A`` or ``Cell-3``: ``generic_identifier``;
3. looks like a coded identifier (upper-case, hyphen-separated, with a
   digit) but is not one: ``fabricated_code``;
4. shares a significant word with a member's name, or normalises to a
   member (``in_progress`` vs ``InProgress``): ``plausible_synonym``;
5. anything else: ``fabricated_code``.

The rules are plain data (:data:`GENERIC_WORDS`, :data:`STOP_WORDS`) so they
can be overridden by callers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from ..domain.vocabulary import VocabularyProjection
from ..tools.schemas import ToolSchema, build_schemas

TOOL_PARAM_FABRICATION = "tool_param_fabrication"
EMPTY_VALID = "empty_valid"
CORRECT = "correct"
REJECTED = "rejected"
TRANSPORT_ERROR = "transport_error"

PLAUSIBLE_SYNONYM = "plausible_synonym"
GENERIC_IDENTIFIER = "generic_identifier"
FABRICATED_CODE = "fabricated_code"
CATEGORIES = (PLAUSIBLE_SYNONYM, GENERIC_IDENTIFIER, FABRICATED_CODE)

GENERIC_WORDS = ("line", "station", "cell", "area", "bay", "zone", "unit", "machine", "dock", "door", "batch",
                 "program", "lot", "order", "board", "change", "ecn", "eco", "wc", "workcenter", "plant", "site")
STOP_WORDS = frozenset(GENERIC_WORDS) | {"the", "of", "and", "main", "booth", "press", "oven", "room", "floor",
                                         "step", "process", "parts", "part", "products", "product"}

_GENERIC = re.compile(r"^(?:%s)[-_ ]?(?:\d{1,3}|[A-Za-z])$" % "|".join(GENERIC_WORDS), re.IGNORECASE)
_CODE = re.compile(r"^[A-Z][A-Z0-9]*(?:[-_][A-Z0-9]+)+$")
_IDENT_FORMAT = re.compile(r"^[A-Za-z0-9]+(?:[-_][A-Za-z0-9]+)+$")


def _norm(s: str) -> str:
    return re.sub(r"[^a-z0-9]", "", s.lower())


def _words(s: str) -> set[str]:
    return {w for w in re.findall(r"[a-z]+", s.lower()) if len(w) > 2 and w not in STOP_WORDS}


def fabrication_category(value: str, members: tuple[str, ...], names: Mapping[str, str]) -> str:
    if _GENERIC.match(value):
        return GENERIC_IDENTIFIER
    if _CODE.match(value) and any(ch.isdigit() for ch in value):
        return FABRICATED_CODE
    n = _norm(value)
    if any(_norm(m) == n for m in members):
        return PLAUSIBLE_SYNONYM
    words = _words(value)
    pool = [names[m] for m in members if m in names] or list(names.values())
    if words and any(words & _words(name) for name in pool):
        return PLAUSIBLE_SYNONYM
    return FABRICATED_CODE


def looks_like_identifier(value: str) -> bool:
    """A plausible manufacturing identifier format (schema-mismatch flag)."""
    return bool(_IDENT_FORMAT.match(value))


@dataclass(frozen=True)
class Fabrication:
    parameter: str
    value: Any
    category: str
    schema_mismatch: bool


@dataclass(frozen=True)
class Classification:
    outcome: str
    fabrications: tuple[Fabrication, ...] = field(default=())

    @property
    def category(self) -> Optional[str]:
        return self.fabrications[0].category if self.fabrications else None

    @property
    def schema_mismatch(self) -> bool:
        return any(f.schema_mismatch for f in self.fabrications)


def _schema_for(tool: str, projection: VocabularyProjection) -> Optional[ToolSchema]:
    for s in build_schemas(projection, 0):
        if s.name == tool:
            return s
    return None


def invalid_identifiers(tool: str, arguments: Mapping[str, Any], projection: VocabularyProjection,
                        missing: frozenset[str] = frozenset()) -> tuple[Fabrication, ...]:
    """Identifier arguments outside the projection. ``missing`` names run identifiers found not to exist."""
    schema = _schema_for(tool, projection)
    if schema is None:
        return ()
    out = []
    for name, value in arguments.items():
        try:
            p = schema.param(name)
        except KeyError:
            continue
        if not p.is_identifier or value is None:
            continue
        text = str(value)
        if p.enum is not None:
            if text in p.enum:
                continue
            members = p.enum
        else:
            if re.fullmatch(p.pattern, text) and name not in missing:
                continue
            members = ()
        out.append(Fabrication(name, value, fabrication_category(text, members, projection.names),
                               looks_like_identifier(text)))
    return tuple(out)


def classify_outcome(tool: str, arguments: Mapping[str, Any], projection: VocabularyProjection,
                     row_count: Optional[int], missing: frozenset[str] = frozenset()) -> Classification:
    """Pure function of the call, the projection and the result size.

    ``row_count`` is None when the call never reached execution (rejected).
    """
    fabs = invalid_identifiers(tool, arguments, projection, missing)
    if fabs:
        return Classification(TOOL_PARAM_FABRICATION, fabs)
    if row_count is None:
        return Classification(REJECTED)
    return Classification(EMPTY_VALID if row_count == 0 else CORRECT)
