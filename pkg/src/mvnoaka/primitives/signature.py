"""Ed25519 signatures (64-byte signatures, 32-byte keys)."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from ..group import random_bytes

SIGNATURE_BYTES = 64
VERIFY_KEY_BYTES = 32


@dataclass(frozen=True)
class SigKeyPair:
    signing_key: bytes = field(repr=False)
    verify_key: bytes

    def sign(self, message: bytes) -> bytes:
        return sign(self.signing_key, message)


def sig_keygen(rng: random.Random | None = None) -> SigKeyPair:
    seed = random_bytes(rng, 32)
    sk = Ed25519PrivateKey.from_private_bytes(seed)
    pk = sk.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return SigKeyPair(signing_key=seed, verify_key=pk)


def sign(signing_key: bytes, message: bytes) -> bytes:
    return Ed25519PrivateKey.from_private_bytes(signing_key).sign(message)


def verify(verify_key: bytes, message: bytes, signature: bytes) -> bool:
    """True iff ``signature`` is valid; malformed keys or signatures are rejections."""
    if len(verify_key) != VERIFY_KEY_BYTES or len(signature) != SIGNATURE_BYTES:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(verify_key).verify(signature, message)
    except (InvalidSignature, ValueError):
        return False
    return True
