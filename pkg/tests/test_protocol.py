import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvnoaka.errors import (
    AckMismatch,
    BadCertificate,
    BadProof,
    BadSignature,
    DecryptFail,
    DoubleSetup,
    DuplicateGnb,
    DuplicateMessage,
    DuplicateUser,
    ExpiredCertificate,
    ExpiredExp,
    NotInList,
    NotProvisioned,
    NoUid,
    StaleTimestamp,
    UnexpectedMessage,
    UnknownTag,
    UnknownUser,
    VersionRegression,
)
from mvnoaka.harness.scenario import ScenarioConfig, World
from mvnoaka.primitives import pke_encrypt, sansig_verify, sig_keygen, verify
from mvnoaka.protocol import (
    AkaM3,
    AkaM4,
    HoM3,
    MnoState,
    cn_apply_revocation,
    cn_process_m3_make_m4,
    cn_sync_handover_list,
    exchange_params,
    gnb_forward_m4,
    gnb_make_ho_m1,
    gnb_make_m1,
    gnb_process_m2_make_m3,
    ho_gnb_process_m2_make_m3,
    ho_ue_make_m2,
    ho_ue_process_m3,
    make_ue,
    mno_register_gnb,
    mno_setup_cn,
    mvno_credential,
    mvno_register_user,
    mvno_setup,
    push_aka_list,
    revoke_user,
    ue_prepare_handover,
    ue_prepare_session,
    ue_process_m1_make_m2,
    ue_process_m4,
    ue_refresh_lists,
)
from mvnoaka.protocol.aka import m2_payload, session_context
from mvnoaka.protocol.handover import ACK
from mvnoaka.protocol.messages import UidRecord
from mvnoaka.protocol.revocation import RevocationNotice
from mvnoaka.protocol.state import SeenCache
from mvnoaka.zkmembership import (
    AuthorizedList,
    identity_scalar,
    make_link_handle,
    make_tag,
    verify_membership,
)


@pytest.fixture
def w():
    return World(ScenarioConfig(seed=21, n_ues=2, n_gnbs=2, list_size=4))


def aka(w, ue="ue-0", gnb="gnb-0"):
    """Run AKA by direct calls (no adversary, no framing); return the messages."""
    u, g = w.ues[ue], w.gnbs[gnb]
    m1 = gnb_make_m1(g, w.advance(5))
    m2 = ue_process_m1_make_m2(u, m1, w.advance(5), g.gnb_id)
    m3 = gnb_process_m2_make_m3(g, m2, w.advance(5))
    m4 = cn_process_m3_make_m4(w.cn, m3, w.advance(5), g.gnb_id)
    m4u = gnb_forward_m4(g, m4)
    rec = ue_process_m4(u, m4u, w.advance(5))
    return m1, m2, m3, m4, rec


def ho(w, ue="ue-0", gnb="gnb-1"):
    u, g = w.ues[ue], w.gnbs[gnb]
    ue_refresh_lists(u, None, g.ho_list)
    m1 = gnb_make_ho_m1(g, w.advance(5))
    m2 = ho_ue_make_m2(u, m1, w.advance(5), g.gnb_id)
    m3 = ho_gnb_process_m2_make_m3(g, m2, w.advance(5))
    return m1, m2, m3, ho_ue_process_m3(u, m3)


# setup and registration


def test_setup_errors(w):
    with pytest.raises(DoubleSetup):
        mno_setup_cn(w.mno)
    with pytest.raises(DuplicateGnb):
        mno_register_gnb(w.mno, "gnb-000", "x", w.now + 10, w.now)
    with pytest.raises(ExpiredExp):
        mno_register_gnb(w.mno, "gnb-new", "x", w.now, w.now)
    fresh = MnoState(rng=random.Random(0))
    with pytest.raises(NotProvisioned):
        mno_register_gnb(fresh, "g", "x", w.now + 10, w.now)
    with pytest.raises(NotProvisioned):
        exchange_params(w.mvno, fresh)


def test_mvno_setup_deterministic():
    a, b = mvno_setup(5), mvno_setup(5)
    assert a.crs == b.crs and a.revocation.public == b.revocation.public
    assert mvno_setup(6).crs != a.crs
    assert len(a.aka_list) == 0 and a.aka_list.version == 0


def test_register_users(w):
    before = w.mvno.aka_list
    cred = mvno_register_user(w.mvno, "alice")
    assert w.mvno.aka_list.version == before.version + 1
    assert len(w.mvno.aka_list) == len(before) + 1
    assert make_tag(cred.pid) in w.mvno.aka_list
    assert mvno_credential(w.mvno, "alice").pid == cred.pid
    with pytest.raises(DuplicateUser):
        mvno_register_user(w.mvno, "alice")


def test_exchange_consistency(w):
    assert w.cn.crs == w.mvno.crs and w.cn.ck == w.mvno.ck
    assert w.cn.aka_list == w.mvno.aka_list
    assert w.cn.revocation_key == w.mvno.revocation.public
    assert w.mvno.cn_public == w.cn.public
    assert set(w.mvno.gnb_keys) == {g.gnb_id for g in w.gnbs.values()}


def test_version_regressions(w):
    with pytest.raises(VersionRegression):
        push_aka_list(w.cn, AuthorizedList())
    with pytest.raises(VersionRegression):
        ue_refresh_lists(w.ues["ue-0"], AuthorizedList())
    w.sync_handover_lists()
    with pytest.raises(VersionRegression):
        cn_sync_handover_list(dataclasses.replace(w.cn, ho_list=AuthorizedList()), w.gnbs["gnb-0"])


def test_seen_cache_ttl():
    cache = SeenCache(capacity=2, ttl_ms=10)
    cache.add(b"a", 0)
    assert cache.seen(b"a", 10)
    assert not cache.seen(b"a", 11)
    for k in (b"x", b"y", b"z"):
        cache.add(k, 20)
    assert len(cache) == 2 and not cache.seen(b"x", 20)


# M1


def test_m1_only_mutable_part_changes(w):
    g = w.gnbs["gnb-0"]
    a, b = gnb_make_m1(g, w.now), gnb_make_m1(g, w.now + 1)
    ca, cb = a.certificate, b.certificate
    assert (ca.location, ca.exp, ca.gnb_id) == (cb.location, cb.exp, cb.gnb_id)
    assert ca.tau != cb.tau
    assert ca.sansig.base_signature == cb.sansig.base_signature
    assert ca.sansig.randomness != cb.sansig.randomness
    for c in (ca, cb):
        assert sansig_verify(c.blocks(), c.sansig, w.cn.public.pk_sig_cn, g.sanitizer.hash_key)


def test_m1_checks(w):
    u, g0, g1 = w.ues["ue-0"], w.gnbs["gnb-0"], w.gnbs["gnb-1"]
    m1 = gnb_make_m1(g0, w.now)
    with pytest.raises(BadCertificate):
        ue_process_m1_make_m2(u, m1, w.now, g1.gnb_id)  # not the selected cell
    with pytest.raises(StaleTimestamp):
        ue_process_m1_make_m2(u, gnb_make_m1(g0, w.now), w.now + 5001, g0.gnb_id)
    ue_process_m1_make_m2(u, m1, w.now, g0.gnb_id)
    with pytest.raises(DuplicateMessage):
        ue_process_m1_make_m2(u, m1, w.now, g0.gnb_id)


def test_m1_from_foreign_network(w):
    other = World(ScenarioConfig(seed=99, n_ues=1, n_gnbs=1, list_size=1))
    rogue = other.gnbs["gnb-0"]  # same gnb_id, different MNO keys
    with pytest.raises(BadCertificate):
        ue_process_m1_make_m2(w.ues["ue-0"], gnb_make_m1(rogue, w.now), w.now, None)


def test_m1_expired(w):
    g = mno_register_gnb(w.mno, "gnb-short", "loc", w.now + 10, w.now)
    exchange_params(w.mvno, w.mno)
    u = make_ue(mvno_credential(w.mvno, "ue-0"), w.rng)
    m1 = gnb_make_m1(g, w.now + 5)
    with pytest.raises(ExpiredCertificate):
        ue_process_m1_make_m2(u, m1, w.now + 20, g.gnb_id)
    with pytest.raises(ExpiredCertificate):
        gnb_make_m1(g, w.now + 10)


# AKA


def test_aka_happy_path(w):
    m1, m2, m3, m4, rec = aka(w)
    ctx = session_context(m2.pk_u, m2.spk_u)
    assert verify_membership(w.cn.crs, w.cn.ck, m2.commitment, w.cn.aka_list, m2.proof, ctx)
    assert verify(w.cn.public.spk_cn, UidRecord.signed_bytes(rec.uid, rec.issued_at), rec.sig)
    assert make_tag(identity_scalar(rec.uid)) in w.cn.ho_list
    assert len(w.cn.links) == 1
    assert w.ues["ue-0"].pending is None
    assert m3.proof == m2.proof and m3.commitment == m2.commitment


def test_offline_preparation_is_used(w):
    u = w.ues["ue-0"]
    s = ue_prepare_session(u)
    g = w.gnbs["gnb-0"]
    m2 = ue_process_m1_make_m2(u, gnb_make_m1(g, w.now), w.now, g.gnb_id)
    assert m2.commitment == s.commitment and "aka" not in u.prepared


def test_uids_unique(w):
    uids = {aka(w, ue)[4].uid for ue in ("ue-0", "ue-1", "ue-0", "ue-1")}
    assert len(uids) == 4


def test_gnb_rejections(w):
    u, g = w.ues["ue-0"], w.gnbs["gnb-0"]
    m2 = ue_process_m1_make_m2(u, gnb_make_m1(g, w.now), w.now, g.gnb_id)
    other_c = ue_prepare_session(w.ues["ue-1"]).commitment
    with pytest.raises(BadSignature):
        gnb_process_m2_make_m3(g, dataclasses.replace(m2, commitment=other_c), w.now)
    with pytest.raises(StaleTimestamp):
        gnb_process_m2_make_m3(g, m2, w.now + 5001)
    gnb_process_m2_make_m3(g, m2, w.now + 10)
    with pytest.raises(DuplicateMessage):
        gnb_process_m2_make_m3(g, m2, w.now + 20)


def _m3(w, ue="ue-0", gnb="gnb-0"):
    u, g = w.ues[ue], w.gnbs[gnb]
    m2 = ue_process_m1_make_m2(u, gnb_make_m1(g, w.now), w.now, g.gnb_id)
    return gnb_process_m2_make_m3(g, m2, w.now), g


def test_cn_rejections(w):
    m3, g = _m3(w)
    with pytest.raises(BadSignature):
        cn_process_m3_make_m4(w.cn, m3, w.now, w.gnbs["gnb-1"].gnb_id)  # wrong association
    with pytest.raises(BadSignature):
        cn_process_m3_make_m4(w.cn, m3, w.now, b"unknown")
    with pytest.raises(StaleTimestamp):
        cn_process_m3_make_m4(w.cn, m3, w.now + 5001, g.gnb_id)
    cn_process_m3_make_m4(w.cn, m3, w.now, g.gnb_id)
    with pytest.raises(DuplicateMessage):
        cn_process_m3_make_m4(w.cn, m3, w.now, g.gnb_id)


def _resign(g, m3, **changes):
    m3 = dataclasses.replace(m3, **changes)
    payload = m2_payload(b"aka/m3", m3.proof.to_bytes(), m3.commitment.to_bytes(), m3.pk_u, m3.spk_u, m3.link.to_bytes(), m3.tau)
    return dataclasses.replace(m3, sig=g.sign_pair.sign(payload))


def test_cn_checks_link_and_context(w):
    m3, g = _m3(w)
    u = w.ues["ue-0"]
    # link handle escrowing a different pid (what a UE hiding from revocation would send)
    bad_link = make_link_handle(w.cn.ck, w.cn.revocation_key, u.pid + 1, 1, m3.commitment, session_context(m3.pk_u, m3.spk_u))
    with pytest.raises(BadProof):
        cn_process_m3_make_m4(w.cn, _resign(g, m3, link=bad_link), w.now, g.gnb_id)
    # swapping in someone else's ephemeral key breaks the proof context
    with pytest.raises(BadProof):
        cn_process_m3_make_m4(w.cn, _resign(g, m3, pk_u=bytes(31) + b"\x09"), w.now, g.gnb_id)


def test_cn_rejects_stale_list(w):
    m3, g = _m3(w)
    push_aka_list(w.cn, mvno_register_user(w.mvno, "newcomer").aka_list)
    with pytest.raises(BadProof):
        cn_process_m3_make_m4(w.cn, m3, w.now, g.gnb_id)


def test_m4_misdelivery_and_tampering(w):
    m3, g = _m3(w)
    m4 = gnb_forward_m4(g, cn_process_m3_make_m4(w.cn, m3, w.now, g.gnb_id))
    other = w.ues["ue-1"]
    _m3(w, "ue-1")
    with pytest.raises(DecryptFail):
        ue_process_m4(other, m4, w.now)
    flipped = bytearray(m4.ct_ue)
    flipped[-1] ^= 1
    with pytest.raises(DecryptFail):
        ue_process_m4(w.ues["ue-0"], AkaM4(bytes(flipped)), w.now)
    with pytest.raises(UnexpectedMessage):
        ue_process_m4(make_ue(mvno_credential(w.mvno, "ue-0")), m4, w.now)


def test_m4_bad_record(w):
    m3, g = _m3(w)
    u = w.ues["ue-0"]
    forger = sig_keygen(random.Random(0))
    uid = b"u" * 16
    rec = UidRecord(uid, forger.sign(UidRecord.signed_bytes(uid, w.now)), w.now)
    with pytest.raises(BadSignature):
        ue_process_m4(u, AkaM4(pke_encrypt(m3.pk_u, rec.to_bytes())), w.now)
    old = UidRecord(uid, w.cn.sign_pair.sign(UidRecord.signed_bytes(uid, w.now - 6000)), w.now - 6000)
    with pytest.raises(StaleTimestamp):
        ue_process_m4(u, AkaM4(pke_encrypt(m3.pk_u, old.to_bytes())), w.now)
    with pytest.raises(DecryptFail):
        ue_process_m4(u, AkaM4(pke_encrypt(m3.pk_u, rec.to_bytes() + b"x")), w.now)


def test_not_in_list_checked_before_sending(w):
    u = w.ues["ue-0"]
    ue_refresh_lists(u, w.mvno.aka_list.without(make_tag(u.pid)))
    with pytest.raises(NotInList):
        ue_prepare_session(u)
    g = w.gnbs["gnb-0"]
    with pytest.raises(NotInList):
        ue_process_m1_make_m2(u, gnb_make_m1(g, w.now), w.now, g.gnb_id)


def test_session_keys():
    w = World(ScenarioConfig(seed=3, n_ues=1, n_gnbs=1, list_size=2, session_keys=True))
    m1, m2, m3, m4, rec = aka(w)
    assert m4.ct_gnb
    k = w.gnbs["gnb-0"].session_keys[m2.commitment.to_bytes()]
    assert len(k) == 32 and w.ues["ue-0"].session_key == k
    with pytest.raises(DecryptFail):
        gnb_forward_m4(w.gnbs["gnb-0"], AkaM4(m4.ct_ue, m4.ct_ue))


# handover


def test_handover(w):
    aka(w)
    w.sync_handover_lists()
    assert ho(w)[3] is True
    assert ho(w, gnb="gnb-0")[3] is True


def test_handover_preconditions(w):
    u, g = w.ues["ue-0"], w.gnbs["gnb-1"]
    with pytest.raises(NoUid):
        ue_prepare_handover(u)
    with pytest.raises(NoUid):
        ho_ue_make_m2(u, gnb_make_ho_m1(g, w.now), w.now, g.gnb_id)
    aka(w)
    with pytest.raises(NotInList):
        ho_ue_make_m2(u, gnb_make_ho_m1(g, w.now), w.now, g.gnb_id)  # UE has no handover list yet


def test_handover_before_sync_rejected(w):
    aka(w)
    g = w.gnbs["gnb-1"]
    u = w.ues["ue-0"]
    ue_refresh_lists(u, None, w.cn.ho_list)
    m2 = ho_ue_make_m2(u, gnb_make_ho_m1(g, w.now), w.now, g.gnb_id)
    with pytest.raises(BadProof):
        ho_gnb_process_m2_make_m3(g, m2, w.now)


def test_handover_gnb_rejections(w):
    aka(w)
    w.sync_handover_lists()
    u, g = w.ues["ue-0"], w.gnbs["gnb-1"]
    ue_refresh_lists(u, None, g.ho_list)
    m2 = ho_ue_make_m2(u, gnb_make_ho_m1(g, w.now), w.now, g.gnb_id)
    with pytest.raises(BadSignature):
        ho_gnb_process_m2_make_m3(g, dataclasses.replace(m2, tau=m2.tau + 1), w.now)
    with pytest.raises(StaleTimestamp):
        ho_gnb_process_m2_make_m3(g, m2, w.now - 5001)
    m3 = ho_gnb_process_m2_make_m3(g, m2, w.now)
    with pytest.raises(DuplicateMessage):
        ho_gnb_process_m2_make_m3(g, m2, w.now)
    with pytest.raises(DecryptFail):
        ho_ue_process_m3(u, HoM3(m3.ciphertext[:-1]))
    with pytest.raises(AckMismatch):
        ho_ue_process_m3(u, HoM3(pke_encrypt(m2.pk_u, ACK + bytes(64))))
    assert ho_ue_process_m3(u, m3)
    with pytest.raises(UnexpectedMessage):
        ho_ue_process_m3(u, m3)


def test_ack_from_other_session_rejected(w):
    aka(w)
    aka(w, "ue-1")
    w.sync_handover_lists()
    a, b, g = w.ues["ue-0"], w.ues["ue-1"], w.gnbs["gnb-1"]
    for u in (a, b):
        ue_refresh_lists(u, None, g.ho_list)
    m2a = ho_ue_make_m2(a, gnb_make_ho_m1(g, w.now), w.now, g.gnb_id)
    ho_ue_make_m2(b, gnb_make_ho_m1(g, w.now + 1), w.now + 1, g.gnb_id)
    m3a = ho_gnb_process_m2_make_m3(g, m2a, w.now + 2)
    with pytest.raises(DecryptFail):
        ho_ue_process_m3(b, m3a)
    # same key, other session's signature echoed
    with pytest.raises(AckMismatch):
        ho_ue_process_m3(a, HoM3(pke_encrypt(m2a.pk_u, ACK + b.pending.sent_sig)))


# revocation


def test_revocation_removes_all_linked_uids(w):
    uid_a1 = aka(w)[4].uid
    uid_a2 = aka(w)[4].uid
    uid_b = aka(w, "ue-1")[4].uid
    notice = revoke_user(w.mvno, "ue-0")
    removed = cn_apply_revocation(w.cn, notice)
    assert set(removed) == {make_tag(identity_scalar(uid_a1)), make_tag(identity_scalar(uid_a2))}
    assert make_tag(identity_scalar(uid_b)) in w.cn.ho_list
    assert notice.tag not in w.cn.aka_list
    with pytest.raises(UnknownUser):
        revoke_user(w.mvno, "ue-0")
    with pytest.raises(UnknownTag):
        cn_apply_revocation(w.cn, notice)


def test_revoked_user_rejected_everywhere(w):
    aka(w)
    w.sync_handover_lists()
    u = w.ues["ue-0"]
    ue_refresh_lists(u, None, w.cn.ho_list)
    cn_apply_revocation(w.cn, revoke_user(w.mvno, "ue-0"))
    w.sync_handover_lists()
    # UE keeps its stale lists: the CN and the target gNB reject it
    m3, g = _m3(w)
    with pytest.raises(BadProof):
        cn_process_m3_make_m4(w.cn, m3, w.now, g.gnb_id)
    g1 = w.gnbs["gnb-1"]
    m2 = ho_ue_make_m2(u, gnb_make_ho_m1(g1, w.now), w.now, g1.gnb_id)
    with pytest.raises(BadProof):
        ho_gnb_process_m2_make_m3(g1, m2, w.now)


def test_reregistration_gets_fresh_pid(w):
    old = w.ues["ue-0"].pid
    cn_apply_revocation(w.cn, revoke_user(w.mvno, "ue-0"))
    w.reregister(0)
    assert w.ues["ue-0"].pid != old
    assert make_tag(old) not in w.mvno.aka_list
    assert w.run_aka(0, 0).accepted


def test_unknown_tag_notice(w):
    with pytest.raises(UnknownTag):
        cn_apply_revocation(w.cn, RevocationNotice(make_tag(5), 1))


# properties over whole runs


@settings(max_examples=6)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=1, max_value=3))
def test_honest_runs_reach_every_checkpoint(seed, n_ues):
    w = World(ScenarioConfig(seed=seed, n_ues=n_ues, n_gnbs=2, list_size=n_ues + 2))
    results = w.run_plan(("aka", "sync", "ho"))
    assert all(r.accepted for r in results)
    for run in range(1, n_ues + 1):
        for cp in ("sansig-verified", "proof-verified", "uid-received"):
            assert (run, cp) in w.transcript.checkpoints
    for run in range(n_ues + 1, 2 * n_ues + 1):
        for cp in ("sansig-verified", "ho-proof-verified", "ho-confirmed"):
            assert (run, cp) in w.transcript.checkpoints
    blob = b"".join(e.frame for e in w.transcript.events)
    assert not any(s in blob for s in w.secrets())


@settings(max_examples=6)
@given(st.integers(min_value=0, max_value=2**32))
def test_fresh_values_per_run(seed):
    """Commitments, ephemeral keys and link handles never repeat across runs of one UE."""
    w = World(ScenarioConfig(seed=seed, n_ues=1, n_gnbs=1, list_size=3))
    seen = set()
    for _ in range(3):
        _, m2, *_ = aka(w)
        for v in (m2.commitment.to_bytes(), m2.pk_u, m2.spk_u, m2.link.to_bytes(), m2.sig):
            assert v not in seen
            seen.add(v)
