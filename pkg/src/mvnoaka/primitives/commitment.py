"""Pedersen commitments ``c = m*G + r*H``.

``G`` is the public identity-tag base (so that committed identities can be
compared against published tags) and ``H`` is the ristretto255 generator.
Both are nothing-up-my-sleeve points with no known discrete-log relation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

from ..errors import InvalidOpening, UnsupportedSecurityLevel
from ..group import Point, base_mul

MESSAGE_BASE = Point.from_label(b"identity-tag/base")
BLINDING_BASE = Point.base()


@dataclass(frozen=True)
class CommitmentKey:
    generators: tuple[Point, ...]

    def __post_init__(self):
        if len(self.generators) < 2:
            raise ValueError("a commitment key needs at least two generators")

    @property
    def g(self) -> Point:
        return self.generators[0]

    @property
    def h(self) -> Point:
        return self.generators[1]

    def to_bytes(self) -> bytes:
        return bytes([len(self.generators)]) + b"".join(bytes(p) for p in self.generators)

    @cached_property
    def digest(self) -> bytes:
        return hashlib.sha256(b"mvnoaka/ck\x00" + self.to_bytes()).digest()


@dataclass(frozen=True)
class Commitment:
    value: Point

    def to_bytes(self) -> bytes:
        return bytes(self.value)

    @classmethod
    def from_bytes(cls, data: bytes) -> Commitment:
        return cls(Point(data))


def commit_keygen(security_level: int = 128) -> CommitmentKey:
    if security_level != 128:
        raise UnsupportedSecurityLevel(f"unsupported security level {security_level}")
    return CommitmentKey((MESSAGE_BASE, BLINDING_BASE))


def commit(ck: CommitmentKey, m: int, r: int) -> Commitment:
    blind = base_mul(r) if ck.h == BLINDING_BASE else ck.h * r
    return Commitment(ck.g * m + blind)


def decommit(ck: CommitmentKey, c: Commitment, m: int, r: int) -> int:
    """Return ``m`` if ``(m, r)`` opens ``c``; raise :class:`InvalidOpening` otherwise."""
    if commit(ck, m, r).value != c.value:
        raise InvalidOpening("commitment does not open to the given message")
    return m
