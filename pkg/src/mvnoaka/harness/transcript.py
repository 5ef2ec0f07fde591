"""Append-only run log.

Reason codes are kept here for analysis only; they never appear on the wire.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class Event:
    step: int
    time: int
    run: int
    sender: str
    receiver: str
    frame: bytes
    action: str
    outcome: str  # accept | abort | dropped | ignored
    reason: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["frame"] = self.frame.hex()
        return d


@dataclass
class Transcript:
    events: list[Event] = field(default_factory=list)
    checkpoints: list[tuple[int, str]] = field(default_factory=list)
    coverage: Counter = field(default_factory=Counter)
    results: list[dict] = field(default_factory=list)

    def append(self, event: Event) -> None:
        self.events.append(event)

    def checkpoint(self, run: int, name: str) -> None:
        self.checkpoints.append((run, name))

    def for_run(self, run: int) -> list[Event]:
        return [e for e in self.events if e.run == run]

    def wire_frames(self) -> list[bytes]:
        return [e.frame for e in self.events]

    def to_bytes(self) -> bytes:
        body = {
            "events": [e.to_dict() for e in self.events],
            "checkpoints": self.checkpoints,
            "results": self.results,
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":")).encode()

    def hexdump(self) -> str:
        lines = []
        for e in self.events:
            tag = f"{e.step:05d} t={e.time} run={e.run} {e.sender}->{e.receiver} [{e.action}] {e.outcome}"
            if e.reason:
                tag += f" ({e.reason})"
            lines.append(tag)
            for off in range(0, len(e.frame), 32):
                lines.append(f"  {off:04x}  {e.frame[off:off + 32].hex()}")
        return "\n".join(lines) + "\n"
