"""snake_case <-> PascalCase key conversion.

The mapping is a bijection on names whose underscore-separated segments each
match ``[a-z][a-z0-9]*``; every catalog column satisfies that.
"""

from __future__ import annotations

import re
from typing import Any, Literal, Mapping

_SNAKE = re.compile(r"^[a-z][a-z0-9]*(_[a-z][a-z0-9]*)*$")
_PASCAL = re.compile(r"^([A-Z][a-z0-9]*)+$")
_PASCAL_SEG = re.compile(r"[A-Z][a-z0-9]*")


def to_pascal(name: str) -> str:
    if not _SNAKE.match(name):
        raise ValueError(f"not a canonical snake_case name: {name!r}")
    return "".join(seg[0].upper() + seg[1:] for seg in name.split("_"))


def to_snake(name: str) -> str:
    if not _PASCAL.match(name):
        raise ValueError(f"not a canonical PascalCase name: {name!r}")
    return "_".join(seg[0].lower() + seg[1:] for seg in _PASCAL_SEG.findall(name))


def serialize_row(row: Mapping[str, Any], casing: Literal["snake_case", "PascalCase"] = "snake_case") -> dict:
    """Re-key ``row`` into the requested casing; keys already in that casing pass through."""
    if casing == "snake_case":
        return {(k if _SNAKE.match(k) else to_snake(k)): v for k, v in row.items()}
    if casing == "PascalCase":
        return {(k if _PASCAL.match(k) else to_pascal(k)): v for k, v in row.items()}
    raise ValueError(f"unknown casing {casing!r}")
