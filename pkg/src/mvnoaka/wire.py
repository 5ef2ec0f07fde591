"""Canonical byte encoding of protocol messages and their 5G container framing.

Message layout::

    type_tag (1) || { field_len (2, BE) || field } * k

The field count is fixed per type.  Decoding is strict: unknown tags, short
input, lengths running past the end, trailing bytes and fields that do not
parse (non-canonical points or scalars, wrong fixed sizes) are all rejected,
so every accepted byte string re-encodes to itself.

A frame prefixes one container byte naming the 5G message that carries the
payload.  Each message type rides in exactly one container.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from enum import IntEnum

from .errors import BadTag, LengthOverflow, Malformed, Truncated
from .protocol.messages import MESSAGE_TYPES, Abort, AkaM1, AkaM2, AkaM3, AkaM4, HoM1, HoM2, HoM3, Message

MAX_FIELD = 0xFFFF


class Container(IntEnum):
    SIB1 = 0x01
    RRC_SETUP_COMPLETE = 0x02
    INITIAL_UE_MESSAGE = 0x03
    AUTHENTICATION_REQUEST = 0x04
    RRC_REESTABLISHMENT_COMPLETE = 0x05
    DL_INFORMATION_TRANSFER = 0x06
    AUTHENTICATION_REJECT = 0x07


CONTAINER_FOR: dict[type[Message], Container] = {
    AkaM1: Container.SIB1,
    AkaM2: Container.RRC_SETUP_COMPLETE,
    AkaM3: Container.INITIAL_UE_MESSAGE,
    AkaM4: Container.AUTHENTICATION_REQUEST,
    HoM1: Container.SIB1,
    HoM2: Container.RRC_REESTABLISHMENT_COMPLETE,
    HoM3: Container.DL_INFORMATION_TRANSFER,
    Abort: Container.AUTHENTICATION_REJECT,
}


def encode(msg: Message) -> bytes:
    out = [bytes([msg.TYPE_TAG])]
    for f in msg.fields():
        if len(f) > MAX_FIELD:
            raise LengthOverflow(f"{msg.NAME} field of {len(f)} bytes exceeds 2-byte length")
        out.append(struct.pack(">H", len(f)) + f)
    return b"".join(out)


def split_fields(data: bytes) -> tuple[type[Message], list[bytes]]:
    """Parse the tag/length structure without interpreting field contents."""
    if not data:
        raise Truncated("empty input")
    cls = MESSAGE_TYPES.get(data[0])
    if cls is None:
        raise BadTag(f"unknown message tag 0x{data[0]:02x}")
    pos, raw = 1, []
    for _ in cls.FIELD_NAMES:
        if pos + 2 > len(data):
            raise Truncated(f"{cls.NAME}: input ends inside a length prefix")
        (n,) = struct.unpack_from(">H", data, pos)
        pos += 2
        if pos + n > len(data):
            raise LengthOverflow(f"{cls.NAME}: field length {n} runs past the input")
        raw.append(data[pos : pos + n])
        pos += n
    if pos != len(data):
        raise Malformed(f"{cls.NAME}: {len(data) - pos} trailing bytes")
    return cls, raw


def decode(data: bytes) -> Message:
    cls, raw = split_fields(bytes(data))
    try:
        return cls.from_fields(raw)
    except (ValueError, struct.error) as exc:
        raise Malformed(f"{cls.NAME}: {exc}") from exc


@dataclass(frozen=True)
class Frame:
    container: Container
    message: Message

    @classmethod
    def wrap(cls, msg: Message) -> Frame:
        return cls(CONTAINER_FOR[type(msg)], msg)


def encode_frame(frame: Frame | Message) -> bytes:
    if isinstance(frame, Message):
        frame = Frame.wrap(frame)
    if CONTAINER_FOR[type(frame.message)] != frame.container:
        raise ValueError(f"{frame.message.NAME} does not ride in {frame.container.name}")
    return bytes([frame.container]) + encode(frame.message)


def decode_frame(data: bytes) -> Frame:
    if not data:
        raise Truncated("empty frame")
    try:
        container = Container(data[0])
    except ValueError:
        raise BadTag(f"unknown container tag 0x{data[0]:02x}") from None
    msg = decode(data[1:])
    if CONTAINER_FOR[type(msg)] != container:
        raise Malformed(f"{msg.NAME} inside {container.name}")
    return Frame(container, msg)


ABORT_FRAME = encode_frame(Abort())


def message_type(frame_bytes: bytes) -> int | None:
    """Type tag of a framed message, or None if too short to tell."""
    return frame_bytes[1] if len(frame_bytes) >= 2 else None


# size reporting


@dataclass(frozen=True)
class SizeReport:
    msg: str
    total: int
    fields: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"msg": self.msg, "total": self.total, "fields": self.fields})

    def components(self) -> dict[str, int]:
        """Regroup fields into certificate / proof / public key / timestamp / signature / other."""
        f = dict(self.fields)
        cert_msg = self.msg in ("M1", "HO-M1")
        groups = {
            "certificate": sum(f.pop(k) for k in ("location", "exp", "gnb_id", "tau")) if cert_msg else 0,
            "signature": f.pop("sansig", 0) + f.pop("sig", 0),
            "proof": f.pop("proof", 0),
            "public_key": f.pop("pk_u", 0) + f.pop("spk_u", 0),
            "timestamp": f.pop("tau", 0),
            "ciphertext": f.pop("ct_ue", 0) + f.pop("ct_gnb", 0) + f.pop("ciphertext", 0),
        }
        groups = {k: v for k, v in groups.items() if v}
        groups["other"] = sum(f.values())
        return groups


def measure(msg: Message, framed: bool = True) -> SizeReport:
    """Encoded size with a per-field breakdown; the breakdown sums to the total."""
    raw = msg.fields()
    fields = dict(zip(msg.FIELD_NAMES, map(len, raw)))
    fields["type_tag"] = 1
    fields["length_prefixes"] = 2 * len(raw)
    if framed:
        fields["container_tag"] = 1
    total = len(encode_frame(msg)) if framed else len(encode(msg))
    assert sum(fields.values()) == total
    return SizeReport(msg.NAME, total, fields)
