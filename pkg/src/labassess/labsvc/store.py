"""Append-only event log: the service's single source of durable truth.

Every state change is one JSON line with a strictly increasing sequence
number. Replaying the log through the service reducers reconstructs the
exact same state, which is both the crash-recovery story and the audit
trail (overrides keep their history for free).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator


@dataclass(frozen=True)
class StoredEvent:
    sequence: int
    kind: str
    entity_kind: str
    entity_id: str
    payload: dict
    recorded_at: str  # ISO-8601

    def to_line(self) -> str:
        return json.dumps(
            {
                "sequence": self.sequence,
                "kind": self.kind,
                "entity_kind": self.entity_kind,
                "entity_id": self.entity_id,
                "payload": self.payload,
                "recorded_at": self.recorded_at,
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    @classmethod
    def from_line(cls, line: str) -> "StoredEvent":
        obj = json.loads(line)
        return cls(
            sequence=int(obj["sequence"]),
            kind=str(obj["kind"]),
            entity_kind=str(obj["entity_kind"]),
            entity_id=str(obj["entity_id"]),
            payload=obj["payload"],
            recorded_at=str(obj["recorded_at"]),
        )


class InMemoryEventLog:
    """Volatile log for tests and embedded use."""

    def __init__(self):
        self._events: list[StoredEvent] = []

    @property
    def next_sequence(self) -> int:
        return len(self._events) + 1

    def append(self, event: StoredEvent) -> None:
        if event.sequence != self.next_sequence:
            raise ValueError(f"expected sequence {self.next_sequence}, got {event.sequence}")
        self._events.append(event)

    def read_all(self) -> list[StoredEvent]:
        return list(self._events)

    def close(self) -> None:
        pass


class FileEventLog:
    """Durable single-writer log: one JSON line per event, fsynced."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._count = sum(1 for _ in self._iter_lines()) if self.path.exists() else 0
        self._handle = open(self.path, "a", encoding="utf-8")

    def _iter_lines(self) -> Iterator[str]:
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    yield line

    @property
    def next_sequence(self) -> int:
        return self._count + 1

    def append(self, event: StoredEvent) -> None:
        if event.sequence != self.next_sequence:
            raise ValueError(f"expected sequence {self.next_sequence}, got {event.sequence}")
        self._handle.write(event.to_line() + "\n")
        self._handle.flush()
        os.fsync(self._handle.fileno())
        self._count += 1

    def read_all(self) -> list[StoredEvent]:
        if not self.path.exists():
            return []
        return [StoredEvent.from_line(line) for line in self._iter_lines()]

    def close(self) -> None:
        self._handle.close()
