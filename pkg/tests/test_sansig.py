import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mvnoaka.errors import SanitizationError
from mvnoaka.group import ORDER, base_mul
from mvnoaka.primitives import (
    AdmPolicy,
    SanSigSignature,
    ch_collision,
    ch_hash,
    ch_keygen,
    ch_random,
    sansig_sanit,
    sansig_sanitizer_keygen,
    sansig_sign,
    sansig_signer_keygen,
    sansig_verify,
)
from mvnoaka.primitives.chameleon import ChameleonRandomness, _e, _f

RNG = random.Random(11)
SIGNER = sansig_signer_keygen(RNG)
SAN = sansig_sanitizer_keygen(RNG)
OTHER_SAN = sansig_sanitizer_keygen(RNG)
BLOCKS = [b"location", b"expiry", b"gnb-id", b"extra"]
ADM = AdmPolicy.of(1, 3)


def signed(blocks=BLOCKS, adm=ADM, seed=0):
    return sansig_sign(blocks, SIGNER, SAN.hash_key, adm, random.Random(seed))


# chameleon hash


def test_ch_matches_definition():
    """Oracle: recompute rho - F(e*Y + s*B) from the group operations directly."""
    r = ch_random(random.Random(1))
    e = _e(b"msg", r.rho)
    expected = (r.rho - _f(SAN.hash_key * e + base_mul(r.s))) % ORDER
    assert ch_hash(SAN.hash_key, b"msg", r) == expected


@given(st.binary(max_size=64), st.binary(max_size=64), st.integers(min_value=0, max_value=2**32))
def test_ch_collision(m1, m2, seed):
    rng = random.Random(seed)
    r = ch_random(rng)
    r2 = ch_collision(SAN, m1, r, m2, rng)
    assert ch_hash(SAN.hash_key, m2, r2) == ch_hash(SAN.hash_key, m1, r)


def test_ch_collisions_are_fresh():
    r = ch_random(random.Random(2))
    cols = {ch_collision(SAN, b"a", r, b"b", random.Random(i)) for i in range(20)}
    assert len(cols) == 20


def test_ch_wrong_trapdoor_no_collision():
    r = ch_random(random.Random(3))
    r2 = ch_collision(OTHER_SAN, b"a", r, b"b", random.Random(4))
    assert ch_hash(SAN.hash_key, b"b", r2) != ch_hash(SAN.hash_key, b"a", r)


def test_ch_randomness_encoding():
    r = ch_random(random.Random(5))
    assert ChameleonRandomness.from_bytes(r.to_bytes()) == r
    with pytest.raises(ValueError):
        ChameleonRandomness.from_bytes(bytes(63))


# sanitizable signatures


def test_sign_verify():
    assert sansig_verify(BLOCKS, signed(), SIGNER.verify_key, SAN.hash_key)


@pytest.mark.parametrize("index", [0, 2])
def test_fixed_block_change_rejected(index):
    bad = list(BLOCKS)
    bad[index] = b"tampered"
    assert not sansig_verify(bad, signed(), SIGNER.verify_key, SAN.hash_key)


@pytest.mark.parametrize("index", range(4))
def test_unsanitized_edit_rejected(index):
    """Even admissible blocks need the sanitizer's trapdoor."""
    bad = list(BLOCKS)
    bad[index] = BLOCKS[index] + b"!"
    assert not sansig_verify(bad, signed(), SIGNER.verify_key, SAN.hash_key)


def test_sanitize_admissible():
    new, sig = sansig_sanit(BLOCKS, {1: b"later", 3: b"more"}, signed(), SIGNER.verify_key, SAN, random.Random(1))
    assert new == [b"location", b"later", b"gnb-id", b"more"]
    assert sansig_verify(new, sig, SIGNER.verify_key, SAN.hash_key)
    assert ADM.admits(new, BLOCKS)


def test_sanitize_fixed_block_refused():
    with pytest.raises(SanitizationError):
        sansig_sanit(BLOCKS, {0: b"elsewhere"}, signed(), SIGNER.verify_key, SAN)


def test_sanitize_invalid_input_refused():
    bad = list(BLOCKS)
    bad[0] = b"x"
    with pytest.raises(SanitizationError):
        sansig_sanit(bad, {1: b"y"}, signed(), SIGNER.verify_key, SAN)


def test_two_sanitizations_differ():
    sig = signed()
    a = sansig_sanit(BLOCKS, {1: b"t"}, sig, SIGNER.verify_key, SAN, random.Random(1))[1]
    b = sansig_sanit(BLOCKS, {1: b"t"}, sig, SIGNER.verify_key, SAN, random.Random(2))[1]
    assert a.to_bytes() != b.to_bytes()
    assert a.base_signature == b.base_signature == sig.base_signature


def test_fixed_blocks_immutable_after_sanitizing():
    new, sig = sansig_sanit(BLOCKS, {1: b"t"}, signed(), SIGNER.verify_key, SAN, random.Random(1))
    new[2] = b"other"
    assert not sansig_verify(new, sig, SIGNER.verify_key, SAN.hash_key)


def test_wrong_keys_rejected():
    sig = signed()
    assert not sansig_verify(BLOCKS, sig, SIGNER.verify_key, OTHER_SAN.hash_key)
    assert not sansig_verify(BLOCKS, sig, sansig_signer_keygen(random.Random(0)).verify_key, SAN.hash_key)
    with pytest.raises(SanitizationError):
        sansig_sanit(BLOCKS, {1: b"t"}, sig, SIGNER.verify_key, OTHER_SAN)


def test_policy_is_signed():
    """Widening the admissible mask after signing breaks the signature."""
    sig = signed()
    widened = SanSigSignature(sig.n_blocks, AdmPolicy.of(0, 1, 3), sig.base_signature, (sig.randomness[0],) + sig.randomness)
    assert not sansig_verify(BLOCKS, widened, SIGNER.verify_key, SAN.hash_key)


def test_encoding_roundtrip_and_length():
    sig = signed()
    enc = sig.to_bytes()
    assert len(enc) == 1 + 1 + 64 + 2 * 64
    assert SanSigSignature.from_bytes(enc) == sig
    for bad in (b"", enc[:1], enc[:-1], enc + b"\x00", bytes([4, 0xF0]) + enc[2:]):
        with pytest.raises(ValueError):
            SanSigSignature.from_bytes(bad)


def test_block_count_bounds():
    with pytest.raises(ValueError):
        sansig_sign([], SIGNER, SAN.hash_key, AdmPolicy.of())
    with pytest.raises(ValueError):
        sansig_sign([b"a"], SIGNER, SAN.hash_key, AdmPolicy.of(1))


@st.composite
def messages_and_edits(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    blocks = draw(st.lists(st.binary(max_size=24), min_size=n, max_size=n))
    adm = draw(st.frozensets(st.integers(min_value=0, max_value=n - 1)))
    edited = draw(st.sets(st.sampled_from(sorted(adm)))) if adm else set()
    mods = {i: draw(st.binary(max_size=24)) for i in edited}
    return blocks, AdmPolicy(adm), mods


@given(messages_and_edits(), st.integers(min_value=0, max_value=2**32))
def test_sanitizability_property(case, seed):
    blocks, adm, mods = case
    rng = random.Random(seed)
    sig = sansig_sign(blocks, SIGNER, SAN.hash_key, adm, rng)
    new, sig2 = sansig_sanit(blocks, mods, sig, SIGNER.verify_key, SAN, rng)
    assert adm.admits(new, blocks)
    assert sansig_verify(new, sig2, SIGNER.verify_key, SAN.hash_key)
    assert SanSigSignature.from_bytes(sig2.to_bytes()) == sig2


@given(messages_and_edits(), st.data())
def test_immutability_property(case, data):
    blocks, adm, _ = case
    fixed = [i for i in range(len(blocks)) if i not in adm.modifiable]
    if not fixed:
        return
    i = data.draw(st.sampled_from(fixed))
    sig = sansig_sign(blocks, SIGNER, SAN.hash_key, adm, random.Random(0))
    bad = list(blocks)
    bad[i] = blocks[i] + b"\x00"
    assert not sansig_verify(bad, sig, SIGNER.verify_key, SAN.hash_key)


def unforgeability_trials(attempts: int = 10_000, seed: int = 12) -> int:
    """Signing oracle on 100 messages, then forgery attempts on a fresh one.

    Attempts recycle oracle signatures (with their chameleon randomness
    shuffled or re-paired), splice randomness between signatures, and try
    random bytes.  Returns the number of accepted forgeries.
    """
    rng = random.Random(seed)
    oracle = []
    for i in range(100):
        blocks = [b"loc-%d" % i, b"exp-%d" % i, b"id-%d" % i]
        oracle.append((blocks, sansig_sign(blocks, SIGNER, SAN.hash_key, AdmPolicy.of(1), rng)))
    target = [b"loc-fresh", b"exp-fresh", b"id-fresh"]
    accepted = 0
    for k in range(attempts):
        _, sig = oracle[rng.randrange(100)]
        _, other = oracle[rng.randrange(100)]
        mode = k % 4
        if mode == 0:
            cand = sig
        elif mode == 1:
            cand = SanSigSignature(3, sig.adm, sig.base_signature, other.randomness)
        elif mode == 2:
            cand = SanSigSignature(3, sig.adm, sig.base_signature, (ch_random(rng),))
        else:
            cand = SanSigSignature(3, sig.adm, rng.randbytes(64), (ch_random(rng),))
        accepted += sansig_verify(target, cand, SIGNER.verify_key, SAN.hash_key)
    return accepted


def test_unforgeability_proxy():
    assert unforgeability_trials(2000) == 0
