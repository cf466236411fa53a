"""Append-only event log: the service's single source of truth.

One JSON object per line; replaying the log from empty reconstructs the
exact in-memory state (checked by state-hash equality in the tests).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from ..errors import ParseError, ValidationError

EVENT_KINDS = (
    "UserAssigned",
    "WorldCreated",
    "GanimalDiscovered",
    "GanimalBred",
    "Fed",
    "Annotated",
    "Ticked",
    "Named",
)


@dataclass(frozen=True)
class Event:
    sequence_no: int
    timestamp: float
    kind: str
    payload: dict

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValidationError(f"unknown event kind {self.kind!r}")
        if self.sequence_no < 0:
            raise ValidationError("sequence_no must be >= 0")


def event_json(event: Event) -> str:
    return json.dumps(
        {
            "sequence_no": event.sequence_no,
            "timestamp": event.timestamp,
            "kind": event.kind,
            "payload": event.payload,
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def event_from_json(line: str) -> Event:
    try:
        raw = json.loads(line)
        return Event(
            sequence_no=raw["sequence_no"],
            timestamp=raw["timestamp"],
            kind=raw["kind"],
            payload=raw["payload"],
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad event line: {exc}") from exc


def read_events(path: str | Path) -> list[Event]:
    events: list[Event] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(event_from_json(line))
    for i, event in enumerate(events):
        if event.sequence_no != i:
            raise ParseError(f"event {i} has sequence_no {event.sequence_no}")
    return events


class EventLog:
    """In-memory event list, optionally mirrored to an append-only file."""

    def __init__(self, path: str | Path | None = None, start_sequence: int = 0):
        self.path = Path(path) if path is not None else None
        self.next_sequence = start_sequence
        self.events: list[Event] = []
        self._fh: IO[str] | None = None

    def append(self, kind: str, payload: dict, timestamp: float) -> Event:
        event = Event(
            sequence_no=self.next_sequence, timestamp=timestamp, kind=kind, payload=payload
        )
        line = event_json(event)  # serialize before mutating anything
        if self.path is not None:
            if self._fh is None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self._fh = open(self.path, "a", encoding="utf-8")
            self._fh.write(line + "\n")
            self._fh.flush()
        self.events.append(event)
        self.next_sequence += 1
        return event

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def iter_kind(events: Iterable[Event], kind: str) -> Iterable[Event]:
    return (e for e in events if e.kind == kind)
