"""Initial authentication (M1-M4).

Every check that fails raises a :class:`~mvnoaka.errors.ProtocolError`
subclass.  The reason code stays local; the harness turns CN/gNB failures
into the single abort frame.
"""

from __future__ import annotations

from ..errors import (
    BadCertificate,
    BadProof,
    BadSignature,
    DecryptFail,
    DecryptionError,
    DuplicateMessage,
    ExpiredCertificate,
    NotInList,
    StaleTimestamp,
    UnexpectedMessage,
)
from ..group import encode_parts, random_bytes, random_scalar
from ..primitives.commitment import commit
from ..primitives.pke import pke_decrypt, pke_encrypt, pke_keygen
from ..primitives.sansig import sansig_sanit, sansig_verify
from ..primitives.signature import sig_keygen, sign, verify
from ..zkmembership.link import make_link_handle, verify_link_handle
from ..zkmembership.proof import prove_membership, verify_membership
from ..zkmembership.tags import identity_scalar, make_tag
from .messages import UID_BYTES, AkaM1, AkaM2, AkaM3, AkaM4, GnbCertificate, HoM1, UidRecord, ts_bytes
from .state import CnState, GnbState, Session, UeState

SESSION_KEY_BYTES = 32


def check_fresh(tau: int, now: int, skew_ms: int) -> None:
    if abs(now - tau) > skew_ms:
        raise StaleTimestamp(f"timestamp off by {now - tau} ms")


def session_context(pk_u: bytes, spk_u: bytes) -> bytes:
    """Proof context binding the ephemeral keys to the anonymous credential."""
    return encode_parts(b"session", pk_u, spk_u)


def m2_payload(label: bytes, proof: bytes, c: bytes, pk_u: bytes, spk_u: bytes, link: bytes, tau: int) -> bytes:
    return encode_parts(label, proof, c, pk_u, spk_u, link, ts_bytes(tau))


# gNB broadcast


def sanitized_certificate(gnb: GnbState, now: int) -> GnbCertificate:
    cert = gnb.certificate
    if cert.exp <= now:
        raise ExpiredCertificate("gNB certificate expired")
    blocks, sig = sansig_sanit(
        cert.blocks(), {2: gnb.gnb_id + ts_bytes(now)}, cert.sansig, gnb.pk_sig_cn, gnb.sanitizer, gnb.rng
    )
    return GnbCertificate(cert.location, cert.exp, gnb.gnb_id, now, sig)


def gnb_make_m1(gnb: GnbState, now: int) -> AkaM1:
    return AkaM1(sanitized_certificate(gnb, now))


# UE side


def check_certificate(ue: UeState, m1: AkaM1 | HoM1, now: int, cell_id: bytes | None) -> None:
    cert = m1.certificate
    key = cert.sansig.to_bytes()
    if ue.seen_m1.seen(key, now):
        raise DuplicateMessage("broadcast already processed")
    check_fresh(cert.tau, now, ue.skew_ms)
    if cell_id is not None and cert.gnb_id != cell_id:
        raise BadCertificate("id_gNB differs from the selected cell")
    pk_san = ue.gnb_keys.get(cert.gnb_id)
    if pk_san is None or ue.cn_public is None:
        raise BadCertificate("no pinned sanitizer key for this gNB")
    if cert.exp <= now:
        raise ExpiredCertificate("gNB certificate expired")
    if not sansig_verify(cert.blocks(), cert.sansig, ue.cn_public.pk_sig_cn, pk_san):
        raise BadCertificate("certificate signature does not verify")
    ue.seen_m1.add(key, now)


def _new_session(ue: UeState, kind: str) -> Session:
    enc_pair, sig_pair = pke_keygen(ue.rng), sig_keygen(ue.rng)
    ctx = session_context(enc_pair.enc_key, sig_pair.verify_key)
    r = random_scalar(ue.rng)
    if kind == "aka":
        x, lst = ue.pid, ue.aka_list
    else:
        x, lst = identity_scalar(ue.uid_record.uid), ue.ho_list
    c = commit(ue.ck, x, r)
    proof = prove_membership(ue.crs, ue.ck, x, r, lst, ctx, ue.rng)
    link = make_link_handle(ue.ck, ue.revocation_key, x, r, c, ctx, ue.rng) if kind == "aka" else None
    return Session(kind, enc_pair, sig_pair, r, c, proof, lst.digest, link)


def ue_prepare_session(ue: UeState) -> Session:
    """Offline part of M2: ephemerals, commitment, proof and link handle.

    Only depends on the published list, so it can run before any gNB is heard.
    """
    if make_tag(ue.pid) not in ue.aka_list:
        raise NotInList("pid is not on the published list")
    s = _new_session(ue, "aka")
    ue.prepared["aka"] = s
    return s


def take_session(ue: UeState, kind: str) -> Session:
    s = ue.prepared.pop(kind, None)
    current = ue.aka_list if kind == "aka" else ue.ho_list
    if s is None or s.list_digest != current.digest:
        s = _new_session(ue, kind)
    return s


def ue_process_m1_make_m2(ue: UeState, m1: AkaM1, now: int, cell_id: bytes | None = None) -> AkaM2:
    check_certificate(ue, m1, now, cell_id)
    if make_tag(ue.pid) not in ue.aka_list:
        raise NotInList("pid is not on the published list")
    s = take_session(ue, "aka")
    c, pk, spk, link = s.commitment.to_bytes(), s.enc_pair.enc_key, s.sig_pair.verify_key, s.link.to_bytes()
    sig = s.sig_pair.sign(m2_payload(b"aka/m2", s.proof.to_bytes(), c, pk, spk, link, now))
    s.sent_sig = sig
    ue.pending = s
    return AkaM2(s.proof, s.commitment, pk, spk, s.link, now, sig)


# gNB relay


def gnb_process_m2_make_m3(gnb: GnbState, m2: AkaM2, now: int) -> AkaM3:
    check_fresh(m2.tau, now, gnb.skew_ms)
    proof, c, link = m2.proof.to_bytes(), m2.commitment.to_bytes(), m2.link.to_bytes()
    if not verify(m2.spk_u, m2_payload(b"aka/m2", proof, c, m2.pk_u, m2.spk_u, link, m2.tau), m2.sig):
        raise BadSignature("M2 signature")
    if gnb.seen.seen(b"m2" + c, now):
        raise DuplicateMessage("commitment already seen")
    sig = gnb.sign_pair.sign(m2_payload(b"aka/m3", proof, c, m2.pk_u, m2.spk_u, link, now))
    gnb.seen.add(b"m2" + c, now)
    return AkaM3(m2.proof, m2.commitment, m2.pk_u, m2.spk_u, m2.link, now, sig)


def gnb_forward_m4(gnb: GnbState, m4: AkaM4) -> AkaM4:
    """Strip (and keep) the gNB's session-key share before forwarding to the UE."""
    if not m4.ct_gnb:
        return m4
    try:
        pt = pke_decrypt(gnb.enc_pair.dec_key, m4.ct_gnb)
    except DecryptionError as exc:
        raise DecryptFail("gNB session-key share") from exc
    gnb.session_keys[pt[:32]] = pt[32:]
    return AkaM4(m4.ct_ue)


# CN


def cn_issue_uid(cn: CnState) -> bytes:
    """Fresh UID, unique in the store, with its tag appended to the handover list."""
    while True:
        uid = random_bytes(cn.rng, UID_BYTES)
        if uid not in cn.uid_store:
            break
    cn.uid_store.add(uid)
    cn.ho_list = cn.ho_list.with_added(make_tag(identity_scalar(uid)))
    return uid


def cn_process_m3_make_m4(cn: CnState, m3: AkaM3, now: int, gnb_id: bytes) -> AkaM4:
    """``gnb_id`` is the transport association the M3 arrived on."""
    check_fresh(m3.tau, now, cn.skew_ms)
    gnb = cn.gnb_keys.get(gnb_id)
    proof, c, link = m3.proof.to_bytes(), m3.commitment.to_bytes(), m3.link.to_bytes()
    if gnb is None or not verify(gnb.spk, m2_payload(b"aka/m3", proof, c, m3.pk_u, m3.spk_u, link, m3.tau), m3.sig):
        raise BadSignature("M3 signature")
    if cn.seen.seen(b"m3" + c, now):
        raise DuplicateMessage("commitment already seen")
    if cn.crs is None or cn.aka_list is None:
        raise BadProof("no parameters from the MVNO")
    ctx = session_context(m3.pk_u, m3.spk_u)
    if not verify_link_handle(cn.ck, cn.revocation_key, m3.commitment, m3.link, ctx):
        raise BadProof("link handle")
    if not verify_membership(cn.crs, cn.ck, m3.commitment, cn.aka_list, m3.proof, ctx):
        raise BadProof("membership proof")
    cn.seen.add(b"m3" + c, now)

    uid = cn_issue_uid(cn)
    cn.links.append((m3.link, cn.ho_list.entries[-1]))
    record = UidRecord(uid, cn.sign_pair.sign(UidRecord.signed_bytes(uid, now)), now)
    payload = record.to_bytes()
    ct_gnb = b""
    if cn.session_keys:
        key = random_bytes(cn.rng, SESSION_KEY_BYTES)
        payload += key
        ct_gnb = pke_encrypt(gnb.enc_key, c + key, cn.rng)
    return AkaM4(pke_encrypt(m3.pk_u, payload, cn.rng), ct_gnb)


def ue_process_m4(ue: UeState, m4: AkaM4, now: int) -> UidRecord:
    s = ue.pending
    if s is None or s.kind != "aka":
        raise UnexpectedMessage("no AKA run in progress")
    try:
        pt = pke_decrypt(s.enc_pair.dec_key, m4.ct_ue)
        record = UidRecord.from_bytes(pt[:88])
    except (DecryptionError, ValueError) as exc:
        raise DecryptFail("M4") from exc
    if len(pt) not in (88, 88 + SESSION_KEY_BYTES):
        raise DecryptFail("M4 payload length")
    check_fresh(record.issued_at, now, ue.skew_ms)
    if not verify(ue.cn_public.spk_cn, UidRecord.signed_bytes(record.uid, record.issued_at), record.sig):
        raise BadSignature("UID record signature")
    ue.uid_record = record
    ue.session_key = pt[88:] or None
    ue.pending = None
    return record


__all__ = [
    "check_certificate",
    "check_fresh",
    "cn_issue_uid",
    "cn_process_m3_make_m4",
    "gnb_forward_m4",
    "gnb_make_m1",
    "gnb_process_m2_make_m3",
    "sanitized_certificate",
    "session_context",
    "ue_prepare_session",
    "ue_process_m1_make_m2",
    "ue_process_m4",
]
