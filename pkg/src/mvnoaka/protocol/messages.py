"""Protocol message values.

Each message is a frozen dataclass with a one-byte ``TYPE_TAG`` and an ordered
field list.  ``fields()`` / ``from_fields()`` convert to and from the raw byte
strings the wire layer length-prefixes; parsing a field that is not a valid
point, scalar or signature raises ``ValueError``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import ClassVar

from ..primitives.commitment import Commitment
from ..primitives.pke import OVERHEAD
from ..primitives.sansig import AdmPolicy, SanSigSignature
from ..zkmembership.link import LinkHandle
from ..zkmembership.proof import MembershipProof

TIMESTAMP_BYTES = 8
UID_BYTES = 16
CERT_ADM = AdmPolicy.of(2)


def ts_bytes(ms: int) -> bytes:
    return struct.pack(">Q", ms)


def ts_from(data: bytes) -> int:
    if len(data) != TIMESTAMP_BYTES:
        raise ValueError("timestamp must be 8 bytes")
    return struct.unpack(">Q", data)[0]


def _ciphertext(data: bytes, optional: bool = False) -> bytes:
    if len(data) < OVERHEAD and not (optional and not data):
        raise ValueError(f"ciphertext shorter than {OVERHEAD} bytes")
    return data


def _fixed(data: bytes, n: int, what: str) -> bytes:
    if len(data) != n:
        raise ValueError(f"{what} must be {n} bytes")
    return data


@dataclass(frozen=True)
class GnbCertificate:
    """C_fix = (location, EXP); C_mod = id_gNB || tau; plus the sanitizable signature."""

    location: bytes
    exp: int
    gnb_id: bytes
    tau: int
    sansig: SanSigSignature

    @staticmethod
    def make_blocks(location: bytes, exp: int, gnb_id: bytes, tau: int) -> list[bytes]:
        return [location, ts_bytes(exp), gnb_id + ts_bytes(tau)]

    def blocks(self) -> list[bytes]:
        return self.make_blocks(self.location, self.exp, self.gnb_id, self.tau)


class Message:
    TYPE_TAG: ClassVar[int]
    NAME: ClassVar[str]
    FIELD_NAMES: ClassVar[tuple[str, ...]]

    def fields(self) -> list[bytes]:
        raise NotImplementedError

    @classmethod
    def from_fields(cls, raw: list[bytes]) -> Message:
        raise NotImplementedError


@dataclass(frozen=True)
class _CertMessage(Message):
    certificate: GnbCertificate

    FIELD_NAMES: ClassVar[tuple[str, ...]] = ("location", "exp", "gnb_id", "tau", "sansig")

    def fields(self) -> list[bytes]:
        c = self.certificate
        return [c.location, ts_bytes(c.exp), c.gnb_id, ts_bytes(c.tau), c.sansig.to_bytes()]

    @classmethod
    def from_fields(cls, raw):
        location, exp, gnb_id, tau, sig = raw
        return cls(GnbCertificate(location, ts_from(exp), gnb_id, ts_from(tau), SanSigSignature.from_bytes(sig)))


@dataclass(frozen=True)
class AkaM1(_CertMessage):
    TYPE_TAG: ClassVar[int] = 0x01
    NAME: ClassVar[str] = "M1"


@dataclass(frozen=True)
class HoM1(_CertMessage):
    TYPE_TAG: ClassVar[int] = 0x11
    NAME: ClassVar[str] = "HO-M1"


@dataclass(frozen=True)
class _ProofMessage(Message):
    proof: MembershipProof
    commitment: Commitment
    pk_u: bytes
    spk_u: bytes
    link: LinkHandle
    tau: int
    sig: bytes

    FIELD_NAMES: ClassVar[tuple[str, ...]] = ("proof", "commitment", "pk_u", "spk_u", "link", "tau", "sig")

    def fields(self) -> list[bytes]:
        return [
            self.proof.to_bytes(),
            self.commitment.to_bytes(),
            self.pk_u,
            self.spk_u,
            self.link.to_bytes(),
            ts_bytes(self.tau),
            self.sig,
        ]

    @classmethod
    def from_fields(cls, raw):
        proof, c, pk, spk, link, tau, sig = raw
        return cls(
            MembershipProof.from_bytes(proof),
            Commitment.from_bytes(c),
            _fixed(pk, 32, "PK_u"),
            _fixed(spk, 32, "spk_u"),
            LinkHandle.from_bytes(link),
            ts_from(tau),
            _fixed(sig, 64, "signature"),
        )


@dataclass(frozen=True)
class AkaM2(_ProofMessage):
    """UE -> gNB: (pi, c, PK_u, spk_u, link, tau_2, sigma) with sigma under the ephemeral spk_u."""

    TYPE_TAG: ClassVar[int] = 0x02
    NAME: ClassVar[str] = "M2"


@dataclass(frozen=True)
class AkaM3(_ProofMessage):
    """gNB -> CN: the M2 content re-timestamped and signed by the gNB."""

    TYPE_TAG: ClassVar[int] = 0x03
    NAME: ClassVar[str] = "M3"


@dataclass(frozen=True)
class AkaM4(Message):
    """CN -> gNB -> UE.  ``ct_gnb`` is empty unless session keys are enabled; the gNB strips it."""

    ct_ue: bytes
    ct_gnb: bytes = b""

    TYPE_TAG: ClassVar[int] = 0x04
    NAME: ClassVar[str] = "M4"
    FIELD_NAMES: ClassVar[tuple[str, ...]] = ("ct_ue", "ct_gnb")

    def fields(self) -> list[bytes]:
        return [self.ct_ue, self.ct_gnb]

    @classmethod
    def from_fields(cls, raw):
        ct_ue, ct_gnb = raw
        return cls(_ciphertext(ct_ue), _ciphertext(ct_gnb, optional=True))


@dataclass(frozen=True)
class HoM2(Message):
    proof: MembershipProof
    commitment: Commitment
    pk_u: bytes
    spk_u: bytes
    sig: bytes
    tau: int

    TYPE_TAG: ClassVar[int] = 0x12
    NAME: ClassVar[str] = "HO-M2"
    FIELD_NAMES: ClassVar[tuple[str, ...]] = ("proof", "commitment", "pk_u", "spk_u", "sig", "tau")

    def fields(self) -> list[bytes]:
        return [self.proof.to_bytes(), self.commitment.to_bytes(), self.pk_u, self.spk_u, self.sig, ts_bytes(self.tau)]

    @classmethod
    def from_fields(cls, raw):
        proof, c, pk, spk, sig, tau = raw
        return cls(
            MembershipProof.from_bytes(proof),
            Commitment.from_bytes(c),
            _fixed(pk, 32, "PK_u"),
            _fixed(spk, 32, "spk_u"),
            _fixed(sig, 64, "signature"),
            ts_from(tau),
        )


@dataclass(frozen=True)
class HoM3(Message):
    ciphertext: bytes

    TYPE_TAG: ClassVar[int] = 0x13
    NAME: ClassVar[str] = "HO-M3"
    FIELD_NAMES: ClassVar[tuple[str, ...]] = ("ciphertext",)

    def fields(self) -> list[bytes]:
        return [self.ciphertext]

    @classmethod
    def from_fields(cls, raw):
        return cls(_ciphertext(raw[0]))


@dataclass(frozen=True)
class Abort(Message):
    """The single rejection signal; carries nothing about the failure cause."""

    TYPE_TAG: ClassVar[int] = 0xFF
    NAME: ClassVar[str] = "ABORT"
    FIELD_NAMES: ClassVar[tuple[str, ...]] = ()

    def fields(self) -> list[bytes]:
        return []

    @classmethod
    def from_fields(cls, raw):
        return cls()


MESSAGE_TYPES: dict[int, type[Message]] = {
    m.TYPE_TAG: m for m in (AkaM1, AkaM2, AkaM3, AkaM4, HoM1, HoM2, HoM3, Abort)
}


@dataclass(frozen=True)
class UidRecord:
    uid: bytes
    sig: bytes
    issued_at: int

    @staticmethod
    def signed_bytes(uid: bytes, issued_at: int) -> bytes:
        return uid + ts_bytes(issued_at)

    def to_bytes(self) -> bytes:
        return self.sig + self.uid + ts_bytes(self.issued_at)

    @classmethod
    def from_bytes(cls, data: bytes) -> UidRecord:
        if len(data) != 64 + UID_BYTES + TIMESTAMP_BYTES:
            raise ValueError("malformed UID record")
        return cls(data[64:80], data[:64], ts_from(data[80:]))
