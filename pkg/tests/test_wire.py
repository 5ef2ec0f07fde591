import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mvnoaka.errors import BadTag, DecodeError, LengthOverflow, Malformed, Truncated
from mvnoaka.harness.scenario import ScenarioConfig, World
from mvnoaka.protocol import Abort, AkaM4, HoM3
from mvnoaka.wire import (
    ABORT_FRAME,
    CONTAINER_FOR,
    Container,
    Frame,
    decode,
    decode_frame,
    encode,
    encode_frame,
    measure,
    message_type,
)
from mvnoaka.zkmembership import proof_length


def golden_frames(golden) -> list[bytes]:
    return [bytes.fromhex(h) for h in golden["frames_seed11"].values()]


def test_golden_frames_roundtrip(golden):
    frames = golden_frames(golden)
    assert {f[1] for f in frames} >= {0x01, 0x02, 0x03, 0x04, 0x11, 0x12, 0x13}
    for f in frames:
        assert encode_frame(decode_frame(f)) == f


def test_golden_frames_reproduced(golden):
    w = World(ScenarioConfig(seed=11, n_ues=1, n_gnbs=2, list_size=2))
    w.run_plan(("aka", "sync", "ho"))
    now = {f"{i:02d}:{e.sender}>{e.receiver}": e.frame.hex() for i, e in enumerate(w.transcript.events)}
    assert now == golden["frames_seed11"]


def test_containers():
    assert ABORT_FRAME == b"\x07\xff"
    assert decode_frame(ABORT_FRAME).message == Abort()
    assert len(set(CONTAINER_FOR.values())) == 7
    assert {c.value for c in Container} == set(range(1, 8))
    with pytest.raises(ValueError):
        encode_frame(Frame(Container.SIB1, Abort()))


@pytest.mark.parametrize(
    "data, err",
    [
        (b"", Truncated),
        (b"\x07", Truncated),
        (b"\x09\xff", BadTag),
        (b"\x07\x77", BadTag),
        (b"\x07\xff\x00", Malformed),
        (b"\x06\x13", Truncated),
        (b"\x06\x13\x00", Truncated),
        (b"\x06\x13\x00\x05ab", LengthOverflow),
        (b"\x06\x13\x00\x00", Malformed),  # ciphertext too short to parse
        (b"\x01\xff", Malformed),  # abort inside SIB1
    ],
)
def test_decode_errors(data, err):
    with pytest.raises(err):
        decode_frame(data)


def test_encode_rejects_oversized_field():
    with pytest.raises(LengthOverflow):
        encode(HoM3(bytes(70000)))


def test_message_type():
    assert message_type(ABORT_FRAME) == 0xFF
    assert message_type(b"\x01") is None


def test_random_bytes_never_crash():
    rng = random.Random(0)
    ok = 0
    for _ in range(100_000):
        data = rng.randbytes(rng.randrange(0, 64))
        try:
            f = decode_frame(data)
        except DecodeError:
            continue
        ok += 1
        assert encode_frame(f) == data
    assert ok >= 0


@given(st.binary(max_size=400))
def test_fuzz_decode(data):
    try:
        f = decode_frame(data)
    except DecodeError:
        return
    assert encode_frame(f) == data


@given(st.data())
def test_mutated_frames(golden, data):
    frames = golden_frames(golden)
    f = bytearray(data.draw(st.sampled_from(frames)))
    for _ in range(data.draw(st.integers(min_value=1, max_value=4))):
        kind = data.draw(st.sampled_from(["flip", "cut", "insert"]))
        pos = data.draw(st.integers(min_value=0, max_value=max(len(f) - 1, 0)))
        if kind == "flip" and f:
            f[pos] ^= data.draw(st.integers(min_value=1, max_value=255))
        elif kind == "cut":
            del f[pos:]
        else:
            f[pos:pos] = data.draw(st.binary(min_size=1, max_size=4))
    try:
        parsed = decode_frame(bytes(f))
    except DecodeError:
        return
    assert encode_frame(parsed) == bytes(f)


def test_measure_sums_and_json(golden):
    for f in golden_frames(golden):
        msg = decode_frame(f).message
        rep = measure(msg)
        assert rep.total == len(f) == sum(rep.fields.values())
        assert sum(rep.components().values()) == rep.total
        assert json.loads(rep.to_json())["total"] == rep.total
        assert measure(msg, framed=False).total == len(f) - 1


def test_m4_size(golden):
    m4 = next(decode_frame(f).message for f in golden_frames(golden) if f[1] == 0x04)
    assert isinstance(m4, AkaM4)
    rep = measure(m4)
    # 16-byte UID + 8-byte timestamp + 64-byte CN signature, under PKE overhead
    assert rep.fields["ct_ue"] == 16 + 8 + 64 + 48
    assert rep.total == 142


def test_sizes_grow_with_list():
    sizes = {}
    for n in (1, 2, 4, 16, 64, 256, 1024):
        w = World(ScenarioConfig(seed=n, n_ues=1, n_gnbs=1, list_size=n))
        w.run_aka(0, 0)
        m2 = next(e.frame for e in w.transcript.events if e.frame[1:2] == b"\x02")
        m3 = next(e.frame for e in w.transcript.events if e.frame[1:2] == b"\x03")
        assert len(m3) == len(m2)
        sizes[n] = len(m2)
        assert len(m2) - proof_length(n) == sizes[1] - proof_length(1)
    values = [sizes[n] for n in sorted(sizes)]
    assert values == sorted(values) and len(set(values)) == len(values)
