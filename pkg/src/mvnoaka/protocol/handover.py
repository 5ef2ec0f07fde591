"""Handover (HO-M1..HO-M3): the target gNB checks the UE's UID tag against
its handover-list snapshot without contacting the CN."""

from __future__ import annotations

from ..errors import (
    AckMismatch,
    BadProof,
    BadSignature,
    DecryptFail,
    DecryptionError,
    DuplicateMessage,
    NoUid,
    NotInList,
    UnexpectedMessage,
    VersionRegression,
)
from ..group import encode_parts
from ..primitives.pke import pke_decrypt, pke_encrypt
from ..primitives.signature import verify
from ..zkmembership.proof import verify_membership
from ..zkmembership.tags import identity_scalar, make_tag
from .aka import _new_session, check_certificate, check_fresh, sanitized_certificate, session_context, take_session
from .messages import HoM1, HoM2, HoM3, ts_bytes
from .state import CnState, GnbState, Session, UeState

ACK = b"ACK"


def ho_payload(proof: bytes, c: bytes, pk_u: bytes, spk_u: bytes, tau: int) -> bytes:
    return encode_parts(b"ho/m2", proof, c, pk_u, spk_u, ts_bytes(tau))


def cn_sync_handover_list(cn: CnState, gnb: GnbState) -> None:
    """Push the CN's handover list (and proof parameters) to a gNB."""
    if gnb.ho_list is not None and cn.ho_list.version < gnb.ho_list.version:
        raise VersionRegression("handover list went backwards")
    gnb.crs, gnb.ck, gnb.ho_list = cn.crs, cn.ck, cn.ho_list


def gnb_make_ho_m1(gnb: GnbState, now: int) -> HoM1:
    return HoM1(sanitized_certificate(gnb, now))


def _uid_tag(ue: UeState):
    return make_tag(identity_scalar(ue.uid_record.uid))


def ue_prepare_handover(ue: UeState) -> Session:
    if ue.uid_record is None:
        raise NoUid("no UID record; run AKA first")
    if ue.ho_list is None or _uid_tag(ue) not in ue.ho_list:
        raise NotInList("UID is not on the handover list")
    s = _new_session(ue, "ho")
    ue.prepared["ho"] = s
    return s


def ho_ue_make_m2(ue: UeState, ho_m1: HoM1, now: int, cell_id: bytes | None = None) -> HoM2:
    if ue.uid_record is None:
        raise NoUid("no UID record; run AKA first")
    check_certificate(ue, ho_m1, now, cell_id)
    if ue.ho_list is None or _uid_tag(ue) not in ue.ho_list:
        raise NotInList("UID is not on the handover list")
    s = take_session(ue, "ho")
    proof, c, pk, spk = s.proof.to_bytes(), s.commitment.to_bytes(), s.enc_pair.enc_key, s.sig_pair.verify_key
    sig = s.sig_pair.sign(ho_payload(proof, c, pk, spk, now))
    s.sent_sig = sig
    ue.pending = s
    return HoM2(s.proof, s.commitment, pk, spk, sig, now)


def ho_gnb_process_m2_make_m3(gnb: GnbState, m2: HoM2, now: int) -> HoM3:
    check_fresh(m2.tau, now, gnb.skew_ms)
    c = m2.commitment.to_bytes()
    if not verify(m2.spk_u, ho_payload(m2.proof.to_bytes(), c, m2.pk_u, m2.spk_u, m2.tau), m2.sig):
        raise BadSignature("HO-M2 signature")
    if gnb.seen.seen(b"ho" + c, now):
        raise DuplicateMessage("commitment already seen")
    ctx = session_context(m2.pk_u, m2.spk_u)
    if gnb.ho_list is None or not verify_membership(gnb.crs, gnb.ck, m2.commitment, gnb.ho_list, m2.proof, ctx):
        raise BadProof("handover membership proof")
    gnb.seen.add(b"ho" + c, now)
    return HoM3(pke_encrypt(m2.pk_u, ACK + m2.sig, gnb.rng))


def ho_ue_process_m3(ue: UeState, m3: HoM3) -> bool:
    s = ue.pending
    if s is None or s.kind != "ho":
        raise UnexpectedMessage("no handover in progress")
    try:
        pt = pke_decrypt(s.enc_pair.dec_key, m3.ciphertext)
    except DecryptionError as exc:
        raise DecryptFail("HO-M3") from exc
    if pt != ACK + s.sent_sig:
        raise AckMismatch("acknowledgement does not echo our signature")
    ue.pending = None
    return True
