"""In-process network with a Dolev-Yao interposition layer.

Every envelope passes through the :class:`AdversaryScript` before delivery.
Rules are checked in order and the first match decides; unmatched traffic is
delivered untouched.  The adversary records every frame it sees, which is
what ``Replay`` indexes into.
"""

from __future__ import annotations

import socket
import struct
from collections.abc import Callable
from dataclasses import dataclass, field, replace

from ..wire import message_type


@dataclass
class LogicalClock:
    now: int = 1_700_000_000_000  # ms since epoch
    hop_ms: int = 5

    def tick(self, ms: int | None = None) -> int:
        self.now += self.hop_ms if ms is None else ms
        return self.now


@dataclass(frozen=True)
class Envelope:
    sender: str
    receiver: str
    data: bytes
    assoc: str | None = None  # transport association (e.g. which gNB link an NGAP message came in on)

    @property
    def type_tag(self) -> int | None:
        return message_type(self.data)


class LoopbackLink:
    """Carries frames across a connected local socket pair, 4-byte length prefix each.

    Only exists to push the wire encoding through a real byte stream; delivery
    order and content are unchanged, so transcripts match the in-memory path.
    """

    BUFFER = 1 << 20

    def __init__(self):
        self._tx, self._rx = socket.socketpair()
        for s in (self._tx, self._rx):
            s.setsockopt(socket.SOL_SOCKET, socket.SO_SNDBUF, self.BUFFER)
            s.setsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF, self.BUFFER)
        self.frames = 0

    def carry(self, data: bytes) -> bytes:
        self._tx.sendall(struct.pack(">I", len(data)) + data)
        (n,) = struct.unpack(">I", self._read(4))
        self.frames += 1
        return self._read(n)

    def _read(self, n: int) -> bytes:
        buf = bytearray()
        while len(buf) < n:
            chunk = self._rx.recv(n - len(buf))
            if not chunk:
                raise ConnectionError("loopback link closed")
            buf += chunk
        return bytes(buf)

    def close(self) -> None:
        self._tx.close()
        self._rx.close()


# adversary actions


@dataclass(frozen=True)
class Deliver:
    name = "deliver"


@dataclass(frozen=True)
class Drop:
    name = "drop"


@dataclass(frozen=True)
class Modify:
    """XOR ``mask`` into the byte at each ``offset`` (negative offsets count from the end)."""

    edits: tuple[tuple[int, int], ...]
    name = "modify"

    def apply(self, data: bytes) -> bytes:
        buf = bytearray(data)
        for off, mask in self.edits:
            if -len(buf) <= off < len(buf):
                buf[off] ^= mask
        return bytes(buf)


@dataclass(frozen=True)
class Replay:
    """Substitute a previously recorded frame for the current one."""

    index: int
    name = "replay"


@dataclass(frozen=True)
class Inject:
    data: bytes
    name = "inject"


@dataclass(frozen=True)
class Redirect:
    receiver: str
    name = "redirect"


Action = Deliver | Drop | Modify | Replay | Inject | Redirect


@dataclass(frozen=True)
class Match:
    sender: str | None = None
    receiver: str | None = None
    type_tag: int | None = None
    step: int | None = None
    predicate: Callable[[int, Envelope], bool] | None = None

    def __call__(self, step: int, env: Envelope) -> bool:
        return (
            (self.sender is None or self.sender == env.sender)
            and (self.receiver is None or self.receiver == env.receiver)
            and (self.type_tag is None or self.type_tag == env.type_tag)
            and (self.step is None or self.step == step)
            and (self.predicate is None or self.predicate(step, env))
        )


@dataclass
class Rule:
    match: Match
    action: Action
    once: bool = False
    fired: int = 0


@dataclass
class AdversaryScript:
    rules: list[Rule] = field(default_factory=list)
    recorded: list[Envelope] = field(default_factory=list)

    def add(self, match: Match, action: Action, once: bool = False) -> AdversaryScript:
        self.rules.append(Rule(match, action, once))
        return self

    def intercept(self, step: int, env: Envelope) -> tuple[str, Envelope | None]:
        """Return (action name, envelope to deliver or None when dropped)."""
        self.recorded.append(env)
        for rule in self.rules:
            if rule.once and rule.fired:
                continue
            if not rule.match(step, env):
                continue
            rule.fired += 1
            act = rule.action
            if isinstance(act, Drop):
                return act.name, None
            if isinstance(act, Modify):
                return act.name, replace(env, data=act.apply(env.data))
            if isinstance(act, Replay):
                return act.name, replace(env, data=self.recorded[act.index].data)
            if isinstance(act, Inject):
                return act.name, replace(env, data=act.data)
            if isinstance(act, Redirect):
                return act.name, replace(env, receiver=act.receiver)
            return act.name, env
        return Deliver.name, env
