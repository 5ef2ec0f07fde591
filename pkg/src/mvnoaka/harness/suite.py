"""The scripted scenario suite.

Each scenario returns the :class:`World` it ran in so callers can scan the
transcripts (identity leakage, abort opacity) and merge coverage counters.
Together the scenarios hit every protocol operation and every error code.
"""

from __future__ import annotations

import dataclasses
from collections import Counter
from collections.abc import Callable

from ..errors import DecodeError, ProtocolError, RegistrationError
from ..group import random_bytes
from ..primitives.pke import pke_encrypt
from ..protocol import (
    exchange_params,
    mno_register_gnb,
    mno_setup_cn,
    mvno_register_user,
    push_aka_list,
    cn_apply_revocation,
    cn_sync_handover_list,
    revoke_user,
    ue_refresh_lists,
)
from ..protocol.handover import ACK
from ..protocol.revocation import RevocationNotice
from ..protocol.state import MnoState
from ..wire import ABORT_FRAME, encode_frame
from ..protocol.messages import HoM3
from ..zkmembership.tags import AuthorizedList, make_tag
from .network import AdversaryScript, Drop, Match, Modify, Redirect, Replay
from .scenario import ScenarioConfig, World

OPERATIONS = (
    "mno_setup_cn",
    "mno_register_gnb",
    "mvno_setup",
    "mvno_register_user",
    "exchange_params",
    "gnb_make_m1",
    "ue_prepare_session",
    "ue_process_m1_make_m2",
    "gnb_process_m2_make_m3",
    "cn_process_m3_make_m4",
    "gnb_forward_m4",
    "ue_process_m4",
    "cn_sync_handover_list",
    "gnb_make_ho_m1",
    "ue_prepare_handover",
    "ho_ue_make_m2",
    "ho_gnb_process_m2_make_m3",
    "ho_ue_process_m3",
    "revoke_user",
    "cn_apply_revocation",
)

ERROR_CODES = (
    "stale-timestamp",
    "bad-certificate",
    "expired-certificate",
    "not-in-list",
    "bad-signature",
    "bad-proof",
    "duplicate",
    "decrypt-fail",
    "ack-mismatch",
    "no-uid",
    "aborted",
    "unexpected-message",
    "double-setup",
    "duplicate-gnb",
    "expired-exp",
    "duplicate-user",
    "unknown-user",
    "unknown-tag",
    "version-regression",
    "not-provisioned",
    "truncated",
    "bad-tag",
    "length-overflow",
    "malformed",
)


def _expect_error(w: World, name: str, fn: Callable, *args) -> str:
    try:
        w._op(name, fn, *args)
    except (ProtocolError, RegistrationError, DecodeError) as exc:
        return exc.code
    raise AssertionError(f"{name} did not fail")


def honest(seed: int, session_keys: bool = False) -> World:
    w = World(ScenarioConfig(seed=seed, n_ues=3, n_gnbs=3, list_size=8, session_keys=session_keys))
    w.run_plan(("aka", "sync", "ho"))
    # a second handover, to yet another cell, without touching the CN
    w.run_plan(("ho",))
    return w


def revocation(seed: int) -> World:
    w = World(ScenarioConfig(seed=seed, n_ues=2, n_gnbs=2, list_size=6))
    w.run_plan(("aka", "sync"))
    # revoked UE that keeps its stale lists: the network rejects it
    w.revoke(0, refresh_ues=False)
    w.run_aka(0, 0)
    w.run_ho(0, 1, refresh=False)
    # after refreshing, the UE itself refuses (its tag is gone)
    for state in w.ues.values():
        ue_refresh_lists(state, w.mvno.aka_list, w.cn.ho_list)
    w.run_aka(0, 0)
    w.run_ho(0, 1)
    # control: an unrevoked subscriber is unaffected
    w.run_aka(1, 1)
    w.sync_handover_lists()
    w.run_ho(1, 0)
    _expect_error(w, "revoke_user", revoke_user, w.mvno, "ue-0")
    stale_notice = RevocationNotice(make_tag(12345), 1)
    _expect_error(w, "cn_apply_revocation", cn_apply_revocation, w.cn, stale_notice)
    w.reregister(0)
    w.run_aka(0, 0)
    return w


def replay_and_stale(seed: int) -> World:
    w = World(ScenarioConfig(seed=seed, n_ues=2, n_gnbs=2, list_size=4))
    start = len(w.transcript.events)
    w.run_aka(0, 0)
    w.sync_handover_lists()
    w.run_ho(0, 1)
    recorded = w.transcript.events[start:]
    for e in recorded:
        w.inject("adversary", e.receiver, e.frame, "gnb-0/9999" if e.receiver == "cn" else None)
    w.advance(w.config.skew_ms + 500)
    for e in recorded:
        w.inject("adversary", e.receiver, e.frame, "gnb-0/9998" if e.receiver == "cn" else None)
    return w


def tampering(seed: int) -> World:
    """Active interference on every hop: byte flips, drops, redirects, injected garbage."""
    adv = AdversaryScript()
    w = World(ScenarioConfig(seed=seed, n_ues=2, n_gnbs=2, list_size=4, adversary=adv))
    # M2 signature flip -> gNB bad-signature -> abort to the UE
    adv.add(Match(sender="ue-0", type_tag=0x02), Modify(((-5, 0x01),)), once=True)
    w.run_aka(0, 0)
    # M4 ciphertext flip on the radio leg -> UE decrypt-fail
    adv.add(Match(sender="gnb-0", receiver="ue-0", type_tag=0x04), Modify(((-3, 0x80),)), once=True)
    w.run_aka(0, 0)
    # M4 for ue-1 redirected to ue-0, which has no run in progress
    adv.add(Match(sender="gnb-0", receiver="ue-1", type_tag=0x04), Redirect("ue-0"), once=True)
    w.run_aka(1, 0)
    # M3 dropped: nothing reaches the CN
    adv.add(Match(receiver="cn"), Drop(), once=True)
    w.run_aka(0, 0)
    w.run_aka(0, 0)
    w.run_aka(1, 1)
    w.sync_handover_lists()
    # HO-M1 replaced by the other cell's recorded broadcast -> bad-certificate
    idx = next(i for i, e in enumerate(adv.recorded) if e.sender == "gnb-1" and e.type_tag == 0x01)
    adv.add(Match(sender="gnb-0", type_tag=0x11), Replay(idx), once=True)
    w.run_ho(0, 0)
    # HO-M2 proof byte flip -> gNB bad-signature (the signature covers the proof)
    adv.add(Match(sender="ue-0", type_tag=0x12), Modify(((20, 0x01),)), once=True)
    w.run_ho(0, 1)
    w.run_ho(1, 0)
    # garbage at the gNB and CN
    for frame in (b"", b"\x02", b"\x09\x02", b"\x02\x02\x00", b"\x02\x02\xff\xff", b"\x02\x02\x00\x01aa", ABORT_FRAME + b"x"):
        w.inject("adversary", "gnb-0", frame)
        w.inject("adversary", "cn", frame, "gnb-0/0")
    # valid messages at the wrong entity
    frames = {e.frame[1]: e.frame for e in w.transcript.events if len(e.frame) > 1}
    w.inject("adversary", "cn", frames[0x01], "gnb-0/0")
    w.inject("adversary", "gnb-1", frames[0x01])
    w.inject("adversary", "ue-1", frames[0x04])
    w.inject("adversary", "ue-1", frames[0x13])
    # forged acknowledgement for a pending handover -> ack-mismatch
    adv.add(Match(sender="gnb-1", type_tag=0x13), Drop(), once=True)
    w.run_ho(0, 1)
    pending = w.ues["ue-0"].pending
    assert pending is not None and pending.kind == "ho"
    forged = encode_frame(HoM3(pke_encrypt(pending.enc_pair.enc_key, ACK + random_bytes(w.rng, 64), w.rng)))
    w.inject("gnb-1", "ue-0", forged)
    return w


def lifecycle_errors(seed: int) -> World:
    """Registration-level misuse and the remaining local error paths."""
    w = World(ScenarioConfig(seed=seed, n_ues=2, n_gnbs=1, list_size=3))
    _expect_error(w, "mno_setup_cn", mno_setup_cn, w.mno)
    _expect_error(w, "mno_register_gnb", mno_register_gnb, w.mno, "gnb-000", "x", w.now + 10**6, w.now)
    _expect_error(w, "mno_register_gnb", mno_register_gnb, w.mno, "gnb-new", "x", w.now - 1, w.now)
    _expect_error(w, "mno_register_gnb", mno_register_gnb, MnoState(rng=w.rng), "gnb-x", "x", w.now + 1, w.now)
    _expect_error(w, "exchange_params", exchange_params, w.mvno, MnoState(rng=w.rng))
    _expect_error(w, "mvno_register_user", mvno_register_user, w.mvno, "ue-0")
    _expect_error(w, "push_aka_list", push_aka_list, w.cn, AuthorizedList())
    g = w.gnbs["gnb-0"]
    w.sync_handover_lists()
    older = dataclasses.replace(w.cn, ho_list=AuthorizedList())
    _expect_error(w, "cn_sync_handover_list", cn_sync_handover_list, older, g)
    # handover without a UID
    w.run_ho(0, 0)
    # short-lived cell: expired certificate
    short = w._op("mno_register_gnb", mno_register_gnb, w.mno, "gnb-short", "y", w.now + 50, w.now)
    w.gnbs["gnb-short"] = short
    w.mno.cn.gnb_keys[short.gnb_id] = short.public
    w.advance(100)
    w.run_aka(1, "gnb-short")
    return w


SCENARIOS: dict[str, Callable[[int], World]] = {
    "honest": honest,
    "honest-session-keys": lambda seed: honest(seed, session_keys=True),
    "revocation": revocation,
    "replay": replay_and_stale,
    "tampering": tampering,
    "lifecycle-errors": lifecycle_errors,
}


def scenario_suite(seed: int = 0) -> dict[str, World]:
    return {name: fn(seed) for name, fn in SCENARIOS.items()}


def merged_coverage(worlds: dict[str, World]) -> Counter:
    total: Counter = Counter()
    for w in worlds.values():
        total.update(w.transcript.coverage)
    return total


__all__ = ["ERROR_CODES", "OPERATIONS", "SCENARIOS", "merged_coverage", "scenario_suite"]
