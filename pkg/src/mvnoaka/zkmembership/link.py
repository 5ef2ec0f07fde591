"""Revocation link handles.

Revoking a user has to remove both its pid tag (AKA list) and the tag of
every UID the CN issued to it (handover list), but the CN never learns which
pid was behind a session.  The UE therefore attaches an escrowed handle to
each AKA request, openable only with a key that the MVNO releases per revoked
user:

    R = k*G,  V = k*W,  S = pid*V          (W = w*G is the MVNO revocation key)

plus a sigma proof that ``(R, V)`` is a DH pair under ``W`` and that ``S``
uses the same ``pid`` as the commitment ``c``.  On revocation the MVNO sends
``t = w*pid``; the CN finds the handles with ``t*R == S``.  Handles from other
users look like random DDH tuples, and fresh ``k`` keeps sessions unlinkable.

Handle bytes: ``R || V || S || e (16) || z_k || z_p || z_r`` (208 bytes).
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass, field

from ..group import ORDER, Point, base_mul, random_scalar, scalar_from_bytes, scalar_to_bytes
from ..primitives.commitment import BLINDING_BASE, MESSAGE_BASE, Commitment, CommitmentKey

HANDLE_BYTES = 3 * 32 + 16 + 3 * 32
_E_BYTES = 16
_DOMAIN = b"mvnoaka/revocation-link/v1"


@dataclass(frozen=True)
class RevocationKeyPair:
    secret: int = field(repr=False)
    public: Point


def revocation_keygen(rng: random.Random | None = None, g: Point | None = None) -> RevocationKeyPair:
    w = random_scalar(rng)
    return RevocationKeyPair(w, (g or MESSAGE_BASE) * w)


@dataclass(frozen=True)
class LinkHandle:
    r: Point
    v: Point
    s: Point
    e: int
    z_k: int
    z_p: int
    z_r: int

    def to_bytes(self) -> bytes:
        return (
            bytes(self.r)
            + bytes(self.v)
            + bytes(self.s)
            + self.e.to_bytes(_E_BYTES, "big")
            + scalar_to_bytes(self.z_k)
            + scalar_to_bytes(self.z_p)
            + scalar_to_bytes(self.z_r)
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> LinkHandle:
        if len(data) != HANDLE_BYTES:
            raise ValueError("link handle must be 208 bytes")
        pts = [Point(data[i : i + 32]) for i in (0, 32, 64)]
        e = int.from_bytes(data[96:112], "big")
        zs = [scalar_from_bytes(data[i : i + 32]) for i in (112, 144, 176)]
        return cls(*pts, e, *zs)

    @property
    def key(self) -> bytes:
        """Stable identifier of this handle (for CN bookkeeping)."""
        return bytes(self.r) + bytes(self.s)


def _h_mul(ck: CommitmentKey, k: int) -> Point:
    return base_mul(k) if ck.h == BLINDING_BASE else ck.h * k


def _challenge(ck, w_pub, c, r, v, s, firsts, context) -> int:
    h = hashlib.sha512()
    for part in (_DOMAIN, ck.digest, bytes(w_pub), bytes(c.value), bytes(r), bytes(v), bytes(s), context):
        h.update(struct.pack(">I", len(part)) + part)
    for a in firsts:
        h.update(bytes(a))
    return int.from_bytes(h.digest()[:_E_BYTES], "big")


def make_link_handle(
    ck: CommitmentKey,
    revocation_key: Point,
    pid: int,
    r_open: int,
    c: Commitment,
    context: bytes = b"",
    rng: random.Random | None = None,
) -> LinkHandle:
    g = ck.g
    k = random_scalar(rng)
    r, v = g * k, revocation_key * k
    s = v * pid
    a_k, a_p, a_r = random_scalar(rng), random_scalar(rng), random_scalar(rng)
    firsts = (g * a_k, revocation_key * a_k, g * a_p + _h_mul(ck, a_r), v * a_p)
    e = _challenge(ck, revocation_key, c, r, v, s, firsts, context)
    return LinkHandle(r, v, s, e, (a_k + e * k) % ORDER, (a_p + e * pid) % ORDER, (a_r + e * r_open) % ORDER)


def verify_link_handle(
    ck: CommitmentKey, revocation_key: Point, c: Commitment, handle: LinkHandle, context: bytes = b""
) -> bool:
    if handle.r.is_identity() or handle.v.is_identity() or handle.e >> (8 * _E_BYTES):
        return False
    g, e = ck.g, handle.e
    firsts = (
        g * handle.z_k - handle.r * e,
        revocation_key * handle.z_k - handle.v * e,
        g * handle.z_p + _h_mul(ck, handle.z_r) - c.value * e,
        handle.v * handle.z_p - handle.s * e,
    )
    return _challenge(ck, revocation_key, c, handle.r, handle.v, handle.s, firsts, context) == e


def revocation_token(keys: RevocationKeyPair, pid: int) -> int:
    return keys.secret * pid % ORDER


def handle_matches(handle: LinkHandle, token: int) -> bool:
    return handle.r * token == handle.s
