"""Prime-order group arithmetic (ristretto255) and scalar helpers.

All protocol algebra (commitments, identity tags, chameleon hashing and the
sigma protocols) runs in this one group.  Points are immutable wrappers around
their canonical 32-byte encoding; scalars are plain Python ints reduced modulo
``ORDER``.  On the wire scalars are fixed-width big-endian.
"""

from __future__ import annotations

import hashlib
import random
import secrets
import struct

import rbcl

ORDER = 2**252 + 27742317777372353535851937790883648493
POINT_BYTES = 32
SCALAR_BYTES = 32

_IDENTITY_BYTES = bytes(32)


def _le(k: int) -> bytes:
    return (k % ORDER).to_bytes(32, "little")


class Point:
    """A ristretto255 group element."""

    __slots__ = ("_enc",)

    def __init__(self, encoding: bytes):
        encoding = bytes(encoding)
        if len(encoding) != POINT_BYTES:
            raise ValueError("point encoding must be 32 bytes")
        if encoding != _IDENTITY_BYTES and not rbcl.crypto_core_ristretto255_is_valid_point(encoding):
            raise ValueError("not a canonical ristretto255 encoding")
        self._enc = encoding

    @classmethod
    def _trusted(cls, encoding: bytes) -> Point:
        p = cls.__new__(cls)
        p._enc = encoding
        return p

    @classmethod
    def identity(cls) -> Point:
        return cls._trusted(_IDENTITY_BYTES)

    @classmethod
    def base(cls) -> Point:
        return base_mul(1)

    @classmethod
    def from_label(cls, label: bytes) -> Point:
        """Hash a label to a point with no known discrete log."""
        h = hashlib.sha512(b"mvnoaka/hash-to-group\x00" + label).digest()
        return cls._trusted(rbcl.crypto_core_ristretto255_from_hash(h))

    def is_identity(self) -> bool:
        return self._enc == _IDENTITY_BYTES

    def __bytes__(self) -> bytes:
        return self._enc

    def __add__(self, other: Point) -> Point:
        if self._enc == _IDENTITY_BYTES:
            return other
        if other._enc == _IDENTITY_BYTES:
            return self
        return Point._trusted(rbcl.crypto_core_ristretto255_add(self._enc, other._enc))

    def __sub__(self, other: Point) -> Point:
        if other._enc == _IDENTITY_BYTES:
            return self
        return Point._trusted(rbcl.crypto_core_ristretto255_sub(self._enc, other._enc))

    def __neg__(self) -> Point:
        return Point.identity() - self

    def __mul__(self, k: int) -> Point:
        k %= ORDER
        if k == 0 or self._enc == _IDENTITY_BYTES:
            return Point.identity()
        return Point._trusted(rbcl.crypto_scalarmult_ristretto255(_le(k), self._enc))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Point) and self._enc == other._enc

    def __hash__(self) -> int:
        return hash(self._enc)

    def __repr__(self) -> str:
        return f"Point({self._enc.hex()[:16]}...)"


def base_mul(k: int) -> Point:
    """``k`` times the standard ristretto255 generator (fast fixed-base path)."""
    k %= ORDER
    if k == 0:
        return Point.identity()
    return Point._trusted(rbcl.crypto_scalarmult_ristretto255_base(_le(k)))


def scalar_to_bytes(k: int) -> bytes:
    return (k % ORDER).to_bytes(SCALAR_BYTES, "big")


def scalar_from_bytes(data: bytes) -> int:
    """Decode a canonical big-endian scalar; non-reduced encodings are rejected."""
    if len(data) != SCALAR_BYTES:
        raise ValueError("scalar encoding must be 32 bytes")
    k = int.from_bytes(data, "big")
    if k >= ORDER:
        raise ValueError("non-canonical scalar")
    return k


def encode_parts(*parts: bytes) -> bytes:
    return b"".join(struct.pack(">I", len(p)) + p for p in parts)


def hash_bytes(label: bytes, *parts: bytes) -> bytes:
    """Domain-separated SHA-512 over length-prefixed parts."""
    return hashlib.sha512(encode_parts(b"mvnoaka/" + label, *parts)).digest()


def hash_to_scalar(label: bytes, *parts: bytes) -> int:
    return int.from_bytes(hash_bytes(label, *parts), "big") % ORDER


def system_rng() -> random.Random:
    return secrets.SystemRandom()


def make_rng(seed: int | bytes | None = None) -> random.Random:
    """A seeded (reproducible) generator, or the OS CSPRNG when ``seed`` is None."""
    if seed is None:
        return system_rng()
    return random.Random(seed)


def random_bytes(rng: random.Random | None, n: int) -> bytes:
    if rng is None:
        return secrets.token_bytes(n)
    return rng.randbytes(n)


def random_scalar(rng: random.Random | None = None) -> int:
    """Uniform non-zero scalar (64 bytes reduced, bias < 2^-250)."""
    while True:
        k = int.from_bytes(random_bytes(rng, 64), "big") % ORDER
        if k:
            return k
