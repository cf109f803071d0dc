"""Template document parsing and canonical serialization."""

from __future__ import annotations

import json
from typing import Any

from pydantic import ValidationError

from .model import REQUIRED_EXPORTS, DomainTemplate, TemplateExports, TemplateMeta

META_KEY = "_meta"


class TemplateError(Exception):
    """Base class for template loading failures."""


class ParseError(TemplateError):
    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        lines = "; ".join(f"{path}: {msg}" for path, msg in errors)
        super().__init__(f"template parse failed: {lines}")


class MissingExports(ParseError):
    def __init__(self, template_id: str, missing: list[str]):
        self.template_id = template_id
        self.missing = missing
        super().__init__([(name, "missing export") for name in missing])
        self.args = (f"Template {template_id!r} missing exports: {missing}",)


def _pydantic_errors(exc: ValidationError, prefix: str = "") -> list[tuple[str, str]]:
    out = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"])
        out.append((f"{prefix}{path}", err["msg"]))
    return out


def parse_template(document: bytes | str, template_id: str = "") -> DomainTemplate:
    """Parse a template document. No relational validation happens here."""
    try:
        raw = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError([("<document>", str(exc))]) from exc
    if not isinstance(raw, dict):
        raise ParseError([("<document>", "top level must be an object")])

    missing = [name for name in REQUIRED_EXPORTS if name not in raw]
    if missing:
        raise MissingExports(template_id, missing)

    errors: list[tuple[str, str]] = []
    unknown = [k for k in raw if k not in REQUIRED_EXPORTS and not k.startswith("_")]
    errors.extend((k, "unknown export") for k in unknown)

    exports = {name: raw[name] for name in REQUIRED_EXPORTS}
    meta = raw.get(META_KEY, {})
    typed = typed_meta = None
    try:
        typed = TemplateExports.model_validate(exports)
    except ValidationError as exc:
        errors.extend(_pydantic_errors(exc))
    try:
        typed_meta = TemplateMeta.model_validate(meta)
    except ValidationError as exc:
        errors.extend(_pydantic_errors(exc, prefix=f"{META_KEY}."))
    if errors:
        raise ParseError(errors)
    return DomainTemplate(template_id, exports, meta, typed, typed_meta)


def serialize_template(t: DomainTemplate) -> str:
    """Canonical JSON text: exports in interface order, then metadata."""
    doc: dict[str, Any] = {name: t.exports[name] for name in REQUIRED_EXPORTS}
    if t.meta:
        doc[META_KEY] = t.meta
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
