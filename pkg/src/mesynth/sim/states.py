"""Lifecycle state machines for work orders, operations and NCRs."""

from __future__ import annotations

from typing import Any


class IllegalTransition(Exception):
    def __init__(self, kind: str, current: str, event: str):
        self.kind = kind
        self.current = current
        self.event = event
        super().__init__(f"{kind}: event {event!r} not allowed in state {current!r}")


# (current state, event) -> next state
WORK_ORDER_MACHINE = {
    ("Edit", "release"): "New",
    ("New", "first_operation_start"): "Active",
    ("Active", "last_operation_complete"): "Complete",
    ("Edit", "abort"): "Aborted",
    ("New", "abort"): "Aborted",
    ("Active", "abort"): "Aborted",
}

OPERATION_MACHINE = {
    ("New", "start"): "Active",
    ("Active", "complete"): "Complete",
    ("New", "abort"): "Aborted",
    ("Active", "abort"): "Aborted",
}

NCR_MACHINE = {
    ("New", "advance"): "InProcess",
    ("InProcess", "advance"): "PendingDisposition",
    ("PendingDisposition", "disposition"): "Closed",
}

MACHINES = {"WorkOrder": WORK_ORDER_MACHINE, "Operation": OPERATION_MACHINE, "NCR": NCR_MACHINE}


def next_state(kind: str, current: str, event: str) -> str:
    try:
        return MACHINES[kind][(current, event)]
    except KeyError:
        raise IllegalTransition(kind, current, event) from None


def transition(entity: Any, event: str, at: int | str | None = None) -> str:
    """Apply ``event`` to ``entity`` in place and return the new state.

    ``entity`` needs ``kind`` and ``state`` attributes; ``modified_on`` is set
    when ``at`` is given.
    """
    new = next_state(entity.kind, entity.state, event)
    entity.state = new
    if at is not None:
        entity.modified_on = at
    return new
