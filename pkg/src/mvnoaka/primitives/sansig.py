"""Sanitizable signatures from chameleon hashes and Ed25519.

The signer hashes fixed blocks with SHA-512 and admissible blocks with the
sanitizer's chameleon hash, then signs the digests together with the
sanitizer key and the admissible-index set.  The sanitizer rewrites an
admissible block by finding a chameleon-hash collision, leaving the signer's
signature untouched.

Signature encoding::

    n_blocks (1) || adm bitmask (ceil(n/8)) || ed25519 sig (64) || (rho||s) per admissible block
"""

from __future__ import annotations

import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from ..errors import SanitizationError
from ..group import Point, encode_parts, hash_bytes, scalar_to_bytes
from . import signature
from .chameleon import (
    RANDOMNESS_BYTES,
    ChameleonKeyPair,
    ChameleonRandomness,
    ch_collision,
    ch_hash,
    ch_keygen,
    ch_random,
)
from .signature import SIGNATURE_BYTES, SigKeyPair

MAX_BLOCKS = 255


@dataclass(frozen=True)
class AdmPolicy:
    modifiable: frozenset[int]

    @classmethod
    def of(cls, *indices: int) -> AdmPolicy:
        return cls(frozenset(indices))

    def admits(self, new_blocks: Sequence[bytes], old_blocks: Sequence[bytes]) -> bool:
        """ADM(m*, m): m* differs from m only at modifiable indices."""
        if len(new_blocks) != len(old_blocks):
            return False
        return all(a == b or i in self.modifiable for i, (a, b) in enumerate(zip(new_blocks, old_blocks)))

    def mask(self, n_blocks: int) -> bytes:
        bits = 0
        for i in self.modifiable:
            bits |= 1 << i
        return bits.to_bytes((n_blocks + 7) // 8, "little")

    @classmethod
    def from_mask(cls, mask: bytes, n_blocks: int) -> AdmPolicy:
        bits = int.from_bytes(mask, "little")
        if bits >> n_blocks:
            raise ValueError("admissible mask names blocks beyond n_blocks")
        return cls(frozenset(i for i in range(n_blocks) if bits >> i & 1))


@dataclass(frozen=True)
class SanSigKeys:
    """Signer pair (pk_sig, sk_sig) plus sanitizer pair (pk_san, sk_san)."""

    signer: SigKeyPair
    sanitizer: ChameleonKeyPair


@dataclass(frozen=True)
class SanSigSignature:
    n_blocks: int
    adm: AdmPolicy
    base_signature: bytes
    randomness: tuple[ChameleonRandomness, ...]  # one per admissible block, ascending index

    def to_bytes(self) -> bytes:
        return (
            bytes([self.n_blocks])
            + self.adm.mask(self.n_blocks)
            + self.base_signature
            + b"".join(r.to_bytes() for r in self.randomness)
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> SanSigSignature:
        if not data:
            raise ValueError("empty signature")
        n = data[0]
        mlen = (n + 7) // 8
        if len(data) < 1 + mlen:
            raise ValueError("truncated admissible mask")
        adm = AdmPolicy.from_mask(data[1 : 1 + mlen], n)
        rest = data[1 + mlen :]
        k = len(adm.modifiable)
        if len(rest) != SIGNATURE_BYTES + k * RANDOMNESS_BYTES:
            raise ValueError("signature length does not match admissible set")
        rands = tuple(
            ChameleonRandomness.from_bytes(rest[SIGNATURE_BYTES + i * RANDOMNESS_BYTES :][:RANDOMNESS_BYTES])
            for i in range(k)
        )
        return cls(n, adm, rest[:SIGNATURE_BYTES], rands)


def sansig_signer_keygen(rng: random.Random | None = None) -> SigKeyPair:
    return signature.sig_keygen(rng)


def sansig_sanitizer_keygen(rng: random.Random | None = None) -> ChameleonKeyPair:
    return ch_keygen(rng)


def _fixed_digest(blocks: Sequence[bytes], adm: AdmPolicy) -> bytes:
    parts = []
    for i, b in enumerate(blocks):
        if i not in adm.modifiable:
            parts += [i.to_bytes(1, "big"), b]
    return hash_bytes(b"sansig/fixed", len(blocks).to_bytes(1, "big"), *parts)


def _block_input(fixed: bytes, index: int, block: bytes) -> bytes:
    return encode_parts(b"sansig/block", fixed, index.to_bytes(1, "big"), block)


def _signed_payload(pk_san: Point, n: int, adm: AdmPolicy, fixed: bytes, ch_values: Sequence[int]) -> bytes:
    return encode_parts(
        b"mvnoaka/sansig/v1",
        bytes(pk_san),
        bytes([n]),
        adm.mask(n),
        fixed,
        *(scalar_to_bytes(v) for v in ch_values),
    )


def _check_policy(n: int, adm: AdmPolicy) -> None:
    if not 0 < n <= MAX_BLOCKS:
        raise ValueError(f"message must have 1..{MAX_BLOCKS} blocks")
    if any(not 0 <= i < n for i in adm.modifiable):
        raise ValueError("admissible index out of range")


def sansig_sign(
    blocks: Sequence[bytes],
    sk_sig: SigKeyPair | bytes,
    pk_san: Point,
    adm: AdmPolicy,
    rng: random.Random | None = None,
) -> SanSigSignature:
    n = len(blocks)
    _check_policy(n, adm)
    signing_key = sk_sig.signing_key if isinstance(sk_sig, SigKeyPair) else sk_sig
    fixed = _fixed_digest(blocks, adm)
    order = sorted(adm.modifiable)
    rands = tuple(ch_random(rng) for _ in order)
    values = [ch_hash(pk_san, _block_input(fixed, i, blocks[i]), r) for i, r in zip(order, rands)]
    base = signature.sign(signing_key, _signed_payload(pk_san, n, adm, fixed, values))
    return SanSigSignature(n, adm, base, rands)


def sansig_verify(blocks: Sequence[bytes], sig: SanSigSignature, pk_sig: bytes, pk_san: Point) -> bool:
    n = len(blocks)
    if sig.n_blocks != n or len(sig.randomness) != len(sig.adm.modifiable):
        return False
    try:
        _check_policy(n, sig.adm)
    except ValueError:
        return False
    fixed = _fixed_digest(blocks, sig.adm)
    order = sorted(sig.adm.modifiable)
    values = [ch_hash(pk_san, _block_input(fixed, i, blocks[i]), r) for i, r in zip(order, sig.randomness)]
    return signature.verify(pk_sig, _signed_payload(pk_san, n, sig.adm, fixed, values), sig.base_signature)


def sansig_sanit(
    blocks: Sequence[bytes],
    mods: Mapping[int, bytes],
    sig: SanSigSignature,
    pk_sig: bytes,
    sk_san: ChameleonKeyPair,
    rng: random.Random | None = None,
) -> tuple[list[bytes], SanSigSignature]:
    """Apply ``mods`` (index -> replacement block) and adapt the signature."""
    illegal = set(mods) - sig.adm.modifiable
    if illegal:
        raise SanitizationError(f"blocks {sorted(illegal)} are not admissible")
    if not sansig_verify(blocks, sig, pk_sig, sk_san.hash_key):
        raise SanitizationError("input signature does not verify")
    fixed = _fixed_digest(blocks, sig.adm)
    new_blocks = list(blocks)
    rands = list(sig.randomness)
    for slot, i in enumerate(sorted(sig.adm.modifiable)):
        if i not in mods:
            continue
        rands[slot] = ch_collision(
            sk_san, _block_input(fixed, i, blocks[i]), rands[slot], _block_input(fixed, i, mods[i]), rng
        )
        new_blocks[i] = mods[i]
    return new_blocks, SanSigSignature(sig.n_blocks, sig.adm, sig.base_signature, tuple(rands))
