"""Hybrid public-key encryption: X25519 key encapsulation + ChaCha20-Poly1305.

Ciphertext layout: ``ephemeral_public (32) || aead_ciphertext (len(m) + 16)``.
Every encryption uses a fresh ephemeral key, so the derived AEAD key is
single-use and the nonce is fixed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from ..errors import DecryptionError
from ..group import random_bytes

ENC_KEY_BYTES = 32
OVERHEAD = 32 + 16
_NONCE = bytes(12)
_INFO = b"mvnoaka/pke/v1"


@dataclass(frozen=True)
class EncKeyPair:
    dec_key: bytes = field(repr=False)
    enc_key: bytes


def _public(sk: X25519PrivateKey) -> bytes:
    return sk.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def pke_keygen(rng: random.Random | None = None) -> EncKeyPair:
    sk = X25519PrivateKey.from_private_bytes(random_bytes(rng, 32))
    return EncKeyPair(dec_key=sk.private_bytes_raw(), enc_key=_public(sk))


def _aead_key(shared: bytes, epk: bytes, pk: bytes) -> bytes:
    return HKDF(algorithm=hashes.SHA256(), length=32, salt=None, info=_INFO + epk + pk).derive(shared)


def pke_encrypt(enc_key: bytes, plaintext: bytes, rng: random.Random | None = None) -> bytes:
    if len(enc_key) != ENC_KEY_BYTES:
        raise ValueError("encryption key must be 32 bytes")
    esk = X25519PrivateKey.from_private_bytes(random_bytes(rng, 32))
    epk = _public(esk)
    try:
        shared = esk.exchange(X25519PublicKey.from_public_bytes(enc_key))
    except ValueError as exc:  # low-order recipient key
        raise ValueError("invalid encryption key") from exc
    key = _aead_key(shared, epk, enc_key)
    return epk + ChaCha20Poly1305(key).encrypt(_NONCE, plaintext, epk + enc_key)


def pke_decrypt(dec_key: bytes, ciphertext: bytes) -> bytes:
    if len(ciphertext) < OVERHEAD:
        raise DecryptionError("ciphertext too short")
    sk = X25519PrivateKey.from_private_bytes(dec_key)
    pk = _public(sk)
    epk, body = ciphertext[:32], ciphertext[32:]
    try:
        shared = sk.exchange(X25519PublicKey.from_public_bytes(epk))
        return ChaCha20Poly1305(_aead_key(shared, epk, pk)).decrypt(_NONCE, body, epk + pk)
    except (InvalidTag, ValueError) as exc:
        raise DecryptionError("authentication failed") from exc
