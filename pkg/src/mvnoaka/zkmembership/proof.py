"""One-out-of-many membership proof, made non-interactive with Fiat-Shamir.

Statement: ``c`` opens to some ``x`` with ``tag(x)`` in the list.  With
``P_j = c + D - T_j`` for each listed tag ``T_j = x_j*G + D`` the member knows
``r`` such that ``P_j = r*H`` at its own index, and for every other index
``log_H P_j`` is unknown (it would give a relation between ``G`` and ``H``).
Branch 0 is ``P_0 = Y`` from the CRS, whose log (to the standard base) is
the trapdoor.  The proof is
a CDS OR-composition of Schnorr proofs over the ``n + 1`` branches with
128-bit challenges that must sum to the Fiat-Shamir challenge mod 2^128.

Byte format::

    format (1) || list version (4, BE)
    || u16 len || challenge_0 .. challenge_n   (16 bytes each)
    || u16 len || response_0 .. response_n     (32 bytes each)
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass

from ..errors import NotInList, TrapdoorMismatch
from ..group import ORDER, Point, base_mul, random_bytes, random_scalar, scalar_from_bytes, scalar_to_bytes
from ..primitives.commitment import BLINDING_BASE, Commitment, CommitmentKey, commit_keygen
from .crs import Crs, CrsTrapdoor
from .tags import TAG_OFFSET, AuthorizedList, make_tag

PROOF_FORMAT = 1
CHALLENGE_BYTES = 16
CHALLENGE_MOD = 1 << (8 * CHALLENGE_BYTES)
# largest list whose proof still fits a 2-byte wire length prefix
MAX_LIST_SIZE = (0xFFFF - 9) // (CHALLENGE_BYTES + 32) - 1

_DOMAIN = b"mvnoaka/membership/fs/v1"


def proof_length(n: int) -> int:
    return 9 + (n + 1) * (CHALLENGE_BYTES + 32)


@dataclass(frozen=True)
class MembershipProof:
    list_version: int
    challenges: tuple[int, ...]
    responses: tuple[int, ...]

    def to_bytes(self) -> bytes:
        ch = b"".join(e.to_bytes(CHALLENGE_BYTES, "big") for e in self.challenges)
        rs = b"".join(scalar_to_bytes(z) for z in self.responses)
        return (
            struct.pack(">BI", PROOF_FORMAT, self.list_version)
            + struct.pack(">H", len(ch))
            + ch
            + struct.pack(">H", len(rs))
            + rs
        )

    @property
    def proof_bytes(self) -> bytes:
        return self.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> MembershipProof:
        if len(data) < 7:
            raise ValueError("truncated proof")
        fmt, version = struct.unpack(">BI", data[:5])
        if fmt != PROOF_FORMAT:
            raise ValueError(f"unknown proof format {fmt}")
        (clen,) = struct.unpack(">H", data[5:7])
        ch = data[7 : 7 + clen]
        rest = data[7 + clen :]
        if len(ch) != clen or clen % CHALLENGE_BYTES or len(rest) < 2:
            raise ValueError("malformed challenge block")
        (rlen,) = struct.unpack(">H", rest[:2])
        rs = rest[2:]
        if len(rs) != rlen or rlen % 32:
            raise ValueError("malformed response block")
        if clen // CHALLENGE_BYTES != rlen // 32:
            raise ValueError("challenge/response count mismatch")
        challenges = tuple(int.from_bytes(ch[i : i + CHALLENGE_BYTES], "big") for i in range(0, clen, CHALLENGE_BYTES))
        responses = tuple(scalar_from_bytes(rs[i : i + 32]) for i in range(0, rlen, 32))
        return cls(version, challenges, responses)


def _h_mul(ck: CommitmentKey, k: int) -> Point:
    return base_mul(k) if ck.h == BLINDING_BASE else ck.h * k


def _base_mul_for(ck: CommitmentKey, branch: int, k: int) -> Point:
    # the trapdoor branch is always over the standard generator (Y = td*B)
    return base_mul(k) if branch == 0 else _h_mul(ck, k)


def _branch_points(crs: Crs, c: Commitment, lst: AuthorizedList) -> list[Point]:
    shifted = c.value + TAG_OFFSET
    return [crs.trapdoor_point] + [shifted - t.point for t in lst.entries]


def _fs_challenge(
    crs: Crs, ck: CommitmentKey, c: Commitment, lst: AuthorizedList, context: bytes, firsts: list[Point]
) -> int:
    h = hashlib.sha512()
    for part in (_DOMAIN, crs.digest, ck.digest, bytes(c.value), lst.digest, context):
        h.update(struct.pack(">I", len(part)) + part)
    h.update(struct.pack(">I", len(firsts)))
    for a in firsts:
        h.update(bytes(a))
    return int.from_bytes(h.digest()[:CHALLENGE_BYTES], "big")


def _prove_branch(
    crs: Crs,
    ck: CommitmentKey,
    c: Commitment,
    lst: AuthorizedList,
    branch: int,
    witness: int,
    context: bytes = b"",
    rng: random.Random | None = None,
) -> MembershipProof:
    """OR-prover that claims ``witness = log_H P_branch`` without checking it."""
    points = _branch_points(crs, c, lst)
    m = len(points)
    challenges = [0] * m
    responses = [0] * m
    firsts: list[Point] = [Point.identity()] * m
    for j in range(m):
        if j == branch:
            continue
        challenges[j] = int.from_bytes(random_bytes(rng, CHALLENGE_BYTES), "big")
        responses[j] = random_scalar(rng)
        firsts[j] = _base_mul_for(ck, j, responses[j]) - points[j] * challenges[j]
    a = random_scalar(rng)
    firsts[branch] = _base_mul_for(ck, branch, a)
    e = _fs_challenge(crs, ck, c, lst, context, firsts)
    challenges[branch] = (e - sum(challenges)) % CHALLENGE_MOD
    responses[branch] = (a + challenges[branch] * witness) % ORDER
    return MembershipProof(lst.version, tuple(challenges), tuple(responses))


def prove_membership(
    crs: Crs,
    ck: CommitmentKey,
    identity: int,
    r: int,
    lst: AuthorizedList,
    context: bytes = b"",
    rng: random.Random | None = None,
) -> MembershipProof:
    """Prove that ``commit(ck, identity, r)`` opens to a listed identity.

    ``context`` is hashed into the challenge; the protocol binds the session's
    ephemeral keys through it.
    """
    tag = make_tag(identity)
    if tag not in lst:
        raise NotInList("identity tag is not in the authorized list")
    if len(lst) > MAX_LIST_SIZE:
        raise ValueError(f"list larger than {MAX_LIST_SIZE} entries")
    c = Commitment(ck.g * identity + _h_mul(ck, r))
    return _prove_branch(crs, ck, c, lst, lst.index(tag) + 1, r, context, rng)


def simulate_proof(
    crs: Crs,
    td: CrsTrapdoor,
    c: Commitment,
    lst: AuthorizedList,
    context: bytes = b"",
    rng: random.Random | None = None,
    ck: CommitmentKey | None = None,
) -> MembershipProof:
    """Accepting proof for any commitment, produced with the CRS trapdoor."""
    if not td.matches(crs):
        raise TrapdoorMismatch("trapdoor does not match CRS")
    return _prove_branch(crs, ck or commit_keygen(crs.security_level), c, lst, 0, td.td, context, rng)


def verify_membership(
    crs: Crs,
    ck: CommitmentKey,
    c: Commitment,
    lst: AuthorizedList,
    proof: MembershipProof,
    context: bytes = b"",
) -> bool:
    if proof.list_version != lst.version:
        return False
    m = len(lst) + 1
    if len(proof.challenges) != m or len(proof.responses) != m:
        return False
    if any(not 0 <= e < CHALLENGE_MOD for e in proof.challenges):
        return False
    points = _branch_points(crs, c, lst)
    firsts = [_base_mul_for(ck, j, z) - p * e for j, (p, e, z) in enumerate(zip(points, proof.challenges, proof.responses))]
    return sum(proof.challenges) % CHALLENGE_MOD == _fs_challenge(crs, ck, c, lst, context, firsts)
