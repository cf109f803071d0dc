"""Pluggable tool-calling clients.

A client receives a :class:`ClientRequest` and returns a :class:`ClientReply`
holding at most one tool call. Clients never retry.
"""

from __future__ import annotations

import json
import os
import random
import re
import string
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Protocol

import httpx

from ..tools.validation import ToolCall


class TransportError(Exception):
    pass


@dataclass(frozen=True)
class ClientRequest:
    query_id: str
    template_id: str
    condition: str  # constrained | unconstrained
    messages: tuple[Mapping[str, Any], ...]
    tools: tuple[Mapping[str, Any], ...]


@dataclass(frozen=True)
class ClientReply:
    call: Optional[ToolCall]
    text: str = ""
    raw: Any = None


class ModelClient(Protocol):
    name: str

    def complete(self, request: ClientRequest) -> ClientReply: ...


class ReplayClient:
    """Replays recorded calls: ``replay[condition][query_id] = {"tool": ..., "arguments": {...}}``."""

    name = "replay"

    def __init__(self, replay: Mapping[str, Mapping[str, Mapping[str, Any]]]):
        self.replay = replay

    def complete(self, request: ClientRequest) -> ClientReply:
        try:
            rec = self.replay[request.condition][request.query_id]
        except KeyError:
            raise TransportError(f"no recorded call for {request.query_id} ({request.condition})") from None
        if rec is None:
            return ClientReply(None, "no tool call")
        return ClientReply(ToolCall(rec["tool"], dict(rec.get("arguments", {})), request.condition), raw=rec)


_ALPHABET = string.ascii_letters + string.digits + "-_ "


@dataclass
class FuzzClient:
    """Adversarial client: every call carries at least one out-of-vocabulary identifier.

    Values are drawn from several generators (random strings, mutated members,
    case changes, generic names, padding) so that near-misses are exercised
    as well as garbage.
    """

    seed: int = 0
    name: str = "fuzz"
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._rng = random.Random(self.seed)

    def _mutate(self, members: list[str]) -> str:
        rng = self._rng
        m = rng.choice(members) if members else "X"
        kind = rng.randrange(8)
        if kind == 0:
            return "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(0, 16)))
        if kind == 1:
            return m.lower() if m.lower() != m else m.upper() + "x"
        if kind == 2:
            return m + rng.choice(["-1", "0", " ", "_", "-X"])
        if kind == 3:
            i = rng.randrange(len(m)) if m else 0
            return m[:i] + rng.choice(string.ascii_uppercase + string.digits) + m[i + 1:]
        if kind == 4:
            return rng.choice(["Line-", "Station-", "Cell-", "Bay-"]) + str(rng.randint(0, 99))
        if kind == 5:
            return " " + m
        if kind == 6:
            return m[:-1] if len(m) > 1 else m + m
        return "".join(rng.sample(m, len(m))) + "~" if m else "~"

    def complete(self, request: ClientRequest) -> ClientReply:
        rng = self._rng
        tools = [t["function"] for t in request.tools]
        candidates = [t for t in tools
                      if any("enum" in p or "pattern" in p for p in t["parameters"]["properties"].values())]
        fn = rng.choice(candidates)
        props = fn["parameters"]["properties"]
        ident = [n for n, p in props.items() if "enum" in p or "pattern" in p]
        args: dict[str, Any] = {}
        target = rng.choice(ident)
        for name in ident:
            if name != target and rng.random() < 0.5:
                if "enum" in props[name]:
                    args[name] = rng.choice(props[name]["enum"])
        members = list(props[target].get("enum", []))
        pattern = props[target].get("pattern")

        def in_vocabulary(v: str) -> bool:
            return v in members or (pattern is not None and re.fullmatch(pattern, v) is not None)

        value = self._mutate(members)
        while in_vocabulary(value):
            value = self._mutate(members)
        args[target] = value
        return ClientReply(ToolCall(fn["name"], args, request.condition))


class HttpClient:
    """OpenAI-compatible chat-completions client (temperature 0, single attempt).

    Configuration comes from arguments or the MESYNTH_LLM_ENDPOINT,
    MESYNTH_LLM_MODEL and MESYNTH_LLM_API_KEY environment variables.
    """

    name = "http"

    def __init__(self, endpoint: str | None = None, model: str | None = None, api_key: str | None = None,
                 timeout_s: float = 120.0, transport: httpx.BaseTransport | None = None):
        self.endpoint = (endpoint or os.environ.get("MESYNTH_LLM_ENDPOINT", "")).rstrip("/")
        self.model = model or os.environ.get("MESYNTH_LLM_MODEL", "")
        key = api_key if api_key is not None else os.environ.get("MESYNTH_LLM_API_KEY")
        if not self.endpoint or not self.model:
            raise ValueError("endpoint and model are required (MESYNTH_LLM_ENDPOINT / MESYNTH_LLM_MODEL)")
        headers = {"Authorization": f"Bearer {key}"} if key else {}
        self._http = httpx.Client(timeout=timeout_s, headers=headers, transport=transport)

    def complete(self, request: ClientRequest) -> ClientReply:
        body = {"model": self.model, "messages": list(request.messages), "tools": list(request.tools),
                "tool_choice": "auto", "temperature": 0}
        try:
            resp = self._http.post(f"{self.endpoint}/chat/completions", json=body)
            resp.raise_for_status()
            data = resp.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise TransportError(str(exc)) from exc
        try:
            message = data["choices"][0]["message"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed response: {exc}") from exc
        calls = message.get("tool_calls") or []
        if not calls:
            return ClientReply(None, message.get("content") or "", data)
        fn = calls[0]["function"]
        try:
            args = json.loads(fn.get("arguments") or "{}")
        except json.JSONDecodeError as exc:
            raise TransportError(f"tool arguments are not JSON: {exc}") from exc
        return ClientReply(ToolCall(fn["name"], args if isinstance(args, dict) else {}, request.condition),
                           message.get("content") or "", data)

    def close(self) -> None:
        self._http.close()
