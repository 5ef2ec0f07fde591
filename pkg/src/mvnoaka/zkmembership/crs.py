"""Common reference string for the membership proof.

The CRS carries one group element ``Y = td*H``.  Every membership proof is an
OR over "I know an opening of ``c`` to a listed tag" and "I know ``log_H Y``",
so the trapdoor holder can produce accepting proofs for any statement (the
simulator) while nobody else learns anything from ``Y``.

Byte format (golden-pinned)::

    format (1) || security level (2, BE) || label (32) || list binding (32) || Y (32)
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from functools import cached_property

from ..errors import UnsupportedSecurityLevel
from ..group import Point, base_mul, hash_to_scalar, random_scalar

CRS_FORMAT = 1
LIST_FORMAT_VERSION = 1
SUPPORTED_LEVELS = (128,)
CRS_BYTES = 1 + 2 + 32 + 32 + 32

_LABEL = hashlib.sha256(b"mvnoaka/membership/one-of-many/v1").digest()


def list_format_binding(version: int = LIST_FORMAT_VERSION) -> bytes:
    return hashlib.sha256(b"mvnoaka/list-format\x00" + struct.pack(">I", version)).digest()


@dataclass(frozen=True)
class Crs:
    security_level: int
    trapdoor_point: Point
    label: bytes = _LABEL
    list_binding: bytes = field(default_factory=list_format_binding)

    def to_bytes(self) -> bytes:
        return (
            bytes([CRS_FORMAT])
            + struct.pack(">H", self.security_level)
            + self.label
            + self.list_binding
            + bytes(self.trapdoor_point)
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> Crs:
        if len(data) != CRS_BYTES or data[0] != CRS_FORMAT:
            raise ValueError("malformed CRS encoding")
        (level,) = struct.unpack(">H", data[1:3])
        return cls(level, Point(data[67:99]), data[3:35], data[35:67])

    @cached_property
    def digest(self) -> bytes:
        return hashlib.sha256(b"mvnoaka/crs\x00" + self.to_bytes()).digest()


@dataclass(frozen=True)
class CrsTrapdoor:
    td: int = field(repr=False)

    def matches(self, crs: Crs) -> bool:
        return base_mul(self.td) == crs.trapdoor_point


def crs_gen(security_level: int = 128, seed: bytes | int | None = None) -> tuple[Crs, CrsTrapdoor]:
    """Deterministic when ``seed`` is given, otherwise the trapdoor comes from the OS CSPRNG."""
    if security_level not in SUPPORTED_LEVELS:
        raise UnsupportedSecurityLevel(f"unsupported security level {security_level}")
    if seed is None:
        td = random_scalar()
    else:
        if isinstance(seed, int):
            seed = str(seed).encode()
        td = hash_to_scalar(b"crs/trapdoor", struct.pack(">H", security_level), seed) or 1
    return Crs(security_level, base_mul(td)), CrsTrapdoor(td)
