"""Pre-execution validation of tool calls against the current schemas."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from .schemas import SchemaService, ToolSchema


class ToolCallError(Exception):
    pass


class UnknownTool(ToolCallError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown tool {name!r}")


class ConstraintError(ToolCallError):
    """A parameter value outside its allowed set; carries the full valid set when enumerated."""

    def __init__(self, parameter: str, value: Any, valid_set: Optional[tuple] = None, reason: str = "not allowed"):
        self.parameter = parameter
        self.value = value
        self.valid_set = valid_set
        self.reason = reason
        msg = f"{parameter}={value!r}: {reason}"
        if valid_set is not None:
            msg += f"; valid values: {list(valid_set)}"
        super().__init__(msg)

    def to_dict(self) -> dict:
        return {"error": "ConstraintError", "parameter": self.parameter, "value": self.value,
                "reason": self.reason, "valid_set": list(self.valid_set) if self.valid_set is not None else None}


class UnknownParameter(ConstraintError):
    def __init__(self, parameter: str, allowed: tuple[str, ...]):
        super().__init__(parameter, None, allowed, "unknown parameter")


class MissingParameter(ConstraintError):
    def __init__(self, parameter: str, alternatives: tuple[str, ...] = ()):
        reason = "required parameter missing" if not alternatives else f"one of {list(alternatives)} is required"
        super().__init__(parameter, None, None, reason)


@dataclass(frozen=True)
class ToolCall:
    tool: str
    arguments: Mapping[str, Any] = field(default_factory=dict)
    origin: str = "constrained"  # experiment bookkeeping: constrained | unconstrained


@dataclass(frozen=True)
class ValidatedCall:
    tool: str
    arguments: Mapping[str, Any]
    template_id: str
    template_version: int
    enforced: bool = True


def _check_type(schema: ToolSchema, name: str, value: Any) -> Any:
    p = schema.param(name)
    if p.type == "integer":
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, str) and value.strip().lstrip("-").isdigit():
                value = int(value)
            else:
                raise ConstraintError(name, value, None, "expected an integer")
        if p.minimum is not None and value < p.minimum:
            raise ConstraintError(name, value, None, f"must be >= {p.minimum}")
        return value
    if not isinstance(value, str):
        raise ConstraintError(name, value, None, "expected a string")
    return value


def check_call(call: ToolCall, schema: ToolSchema, enforce: bool = True) -> ValidatedCall:
    args = dict(call.arguments)
    allowed = tuple(p.name for p in schema.parameters)
    for name in args:
        if name not in allowed:
            raise UnknownParameter(name, allowed)
    for p in schema.parameters:
        if p.required and args.get(p.name) is None:
            raise MissingParameter(p.name)
    if schema.one_of and all(args.get(n) is None for n in schema.one_of):
        raise MissingParameter(schema.one_of[0], schema.one_of)
    out: dict[str, Any] = {}
    for p in schema.parameters:
        value = args.get(p.name)
        if value is None:
            if p.default is not None:
                out[p.name] = p.default
            continue
        value = _check_type(schema, p.name, value)
        if enforce:
            # exact, case-sensitive membership
            if p.enum is not None and value not in p.enum:
                raise ConstraintError(p.name, value, p.enum, "not in the active template's vocabulary")
            if p.pattern is not None and not re.fullmatch(p.pattern, value):
                raise ConstraintError(p.name, value, None, f"does not match {p.pattern}")
        out[p.name] = value
    return ValidatedCall(schema.name, out, schema.template_id, schema.template_version, enforce)


def validate_call(call: ToolCall, service: SchemaService) -> ValidatedCall:
    """Reject unknown tools, unknown or missing parameters and out-of-vocabulary identifiers."""
    return check_call(call, service.get(call.tool), enforce=True)


def admit_unchecked(call: ToolCall, service: SchemaService) -> ValidatedCall:
    """Shape-check a call without vocabulary enforcement (unconstrained experiment condition)."""
    return check_call(call, service.get(call.tool), enforce=False)
