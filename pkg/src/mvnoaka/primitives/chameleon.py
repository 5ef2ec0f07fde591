"""Key-exposure-free chameleon hash over ristretto255.

    CH(m; rho, s) = rho - F(e*Y + s*B)   with  e = Hs(m || rho),  Y = x*B

``F`` hashes a point encoding to a scalar.  The trapdoor holder finds a
collision for a new message by picking fresh ``k`` and setting
``rho' = C + F(k*B)``, ``s' = k - Hs(m' || rho') * x``.  Each collision is a
Schnorr-like response under fresh ``k``, so publishing many collisions for
the same hash value does not reveal ``x``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..group import ORDER, Point, base_mul, hash_to_scalar, random_scalar, scalar_from_bytes, scalar_to_bytes

RANDOMNESS_BYTES = 64


@dataclass(frozen=True)
class ChameleonKeyPair:
    trapdoor: int = field(repr=False)
    hash_key: Point


@dataclass(frozen=True)
class ChameleonRandomness:
    rho: int
    s: int

    def to_bytes(self) -> bytes:
        return scalar_to_bytes(self.rho) + scalar_to_bytes(self.s)

    @classmethod
    def from_bytes(cls, data: bytes) -> ChameleonRandomness:
        if len(data) != RANDOMNESS_BYTES:
            raise ValueError("chameleon randomness must be 64 bytes")
        return cls(scalar_from_bytes(data[:32]), scalar_from_bytes(data[32:]))


def ch_keygen(rng: random.Random | None = None) -> ChameleonKeyPair:
    x = random_scalar(rng)
    return ChameleonKeyPair(trapdoor=x, hash_key=base_mul(x))


def _e(message: bytes, rho: int) -> int:
    return hash_to_scalar(b"ch/e", message, scalar_to_bytes(rho))


def _f(p: Point) -> int:
    return hash_to_scalar(b"ch/f", bytes(p))


def ch_hash(hash_key: Point, message: bytes, rand: ChameleonRandomness) -> int:
    return (rand.rho - _f(hash_key * _e(message, rand.rho) + base_mul(rand.s))) % ORDER


def ch_random(rng: random.Random | None = None) -> ChameleonRandomness:
    return ChameleonRandomness(random_scalar(rng), random_scalar(rng))


def ch_collision(
    keys: ChameleonKeyPair,
    message: bytes,
    rand: ChameleonRandomness,
    new_message: bytes,
    rng: random.Random | None = None,
) -> ChameleonRandomness:
    """Randomness under which ``new_message`` hashes to ``CH(message; rand)``."""
    target = ch_hash(keys.hash_key, message, rand)
    k = random_scalar(rng)
    rho = (target + _f(base_mul(k))) % ORDER
    s = (k - _e(new_message, rho) * keys.trapdoor) % ORDER
    return ChameleonRandomness(rho, s)
