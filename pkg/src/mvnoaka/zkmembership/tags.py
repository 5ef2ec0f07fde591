"""Identity tags and versioned authorized lists.

A tag is ``x*G + D`` for identity scalar ``x``: ``G`` is the commitment
message base and ``D`` a fixed offset, both hashed to the group.  The map is
injective (``G`` has prime order) and one-way under discrete log.  The offset
keeps ``tag(0)`` away from the identity element.
"""

from __future__ import annotations

import hashlib
import struct
from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property

from ..group import Point, hash_to_scalar
from ..primitives.commitment import MESSAGE_BASE

TAG_OFFSET = Point.from_label(b"identity-tag/offset")


@dataclass(frozen=True)
class IdentityTag:
    point: Point

    def __bytes__(self) -> bytes:
        return bytes(self.point)

    @classmethod
    def from_bytes(cls, data: bytes) -> IdentityTag:
        return cls(Point(data))


def make_tag(identity: int) -> IdentityTag:
    return IdentityTag(MESSAGE_BASE * identity + TAG_OFFSET)


def identity_scalar(identity: bytes) -> int:
    """Fixed-length hash of a byte identity (e.g. a 16-byte UID) into the scalar field."""
    return hash_to_scalar(b"identity", identity)


def _leaf(tag: IdentityTag) -> bytes:
    return hashlib.sha256(b"\x00" + bytes(tag)).digest()


def merkle_root(tags: Iterable[IdentityTag]) -> bytes:
    level = [_leaf(t) for t in tags]
    if not level:
        return hashlib.sha256(b"\x02").digest()
    while len(level) > 1:
        nxt = [hashlib.sha256(b"\x01" + level[i] + level[i + 1]).digest() for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


@dataclass(frozen=True)
class AuthorizedList:
    """Immutable snapshot; mutations return a new list with a bumped version."""

    entries: tuple[IdentityTag, ...] = ()
    version: int = 0

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("duplicate tag in authorized list")
        if not 0 <= self.version < 2**32:
            raise ValueError("list version out of range")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, tag: object) -> bool:
        return tag in self._index

    @cached_property
    def _index(self) -> dict[IdentityTag, int]:
        return {t: i for i, t in enumerate(self.entries)}

    def index(self, tag: IdentityTag) -> int:
        return self._index[tag]

    def with_added(self, *tags: IdentityTag) -> AuthorizedList:
        dup = [t for t in tags if t in self._index]
        if dup or len(set(tags)) != len(tags):
            raise ValueError("tag already in authorized list")
        return AuthorizedList(self.entries + tuple(tags), self.version + len(tags))

    def without(self, tag: IdentityTag) -> AuthorizedList:
        if tag not in self._index:
            raise KeyError("tag not in authorized list")
        return AuthorizedList(tuple(t for t in self.entries if t != tag), self.version + 1)

    @cached_property
    def root(self) -> bytes:
        return merkle_root(self.entries)

    @cached_property
    def digest(self) -> bytes:
        return hashlib.sha256(
            b"mvnoaka/list\x00" + self.root + struct.pack(">II", self.version, len(self.entries))
        ).digest()
