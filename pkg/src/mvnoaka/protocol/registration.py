"""Setup and registration: MNO keys for the CN, gNB enrolment, MVNO setup,
subscriber registration and the MVNO/MNO parameter exchange."""

from __future__ import annotations

import hashlib
import random

from ..errors import DoubleSetup, DuplicateGnb, DuplicateUser, ExpiredExp, NotProvisioned, VersionRegression
from ..group import make_rng, random_scalar
from ..primitives.commitment import commit_keygen
from ..primitives.pke import pke_keygen
from ..primitives.sansig import sansig_sanitizer_keygen, sansig_sign, sansig_signer_keygen
from ..primitives.signature import sig_keygen
from ..zkmembership.crs import crs_gen
from ..zkmembership.link import revocation_keygen
from ..zkmembership.tags import AuthorizedList, make_tag
from .messages import CERT_ADM, GnbCertificate
from .state import (
    DEFAULT_SKEW_MS,
    CnState,
    GnbState,
    MnoState,
    MvnoState,
    SeenCache,
    UeState,
    UserCredential,
)


def mno_setup_cn(mno: MnoState, skew_ms: int = DEFAULT_SKEW_MS, session_keys: bool = False) -> CnState:
    """Generate the CN signing pair and SanSig signer pair."""
    if mno.cn is not None:
        raise DoubleSetup("CN keys already generated")
    mno.cn = CnState(
        sign_pair=sig_keygen(mno.rng),
        sansig_signer=sansig_signer_keygen(mno.rng),
        rng=mno.rng,
        skew_ms=skew_ms,
        session_keys=session_keys,
        seen=SeenCache(ttl_ms=2 * skew_ms),
    )
    return mno.cn


def mno_register_gnb(mno: MnoState, gnb_id: bytes | str, location: bytes | str, exp: int, now: int) -> GnbState:
    """Enrol a base station and sign its certificate with C_mod = id_gNB || now."""
    if mno.cn is None:
        raise NotProvisioned("CN keys must exist before gNB registration")
    gnb_id = gnb_id.encode() if isinstance(gnb_id, str) else gnb_id
    location = location.encode() if isinstance(location, str) else location
    if gnb_id in mno.gnb_registry:
        raise DuplicateGnb(gnb_id.decode(errors="replace"))
    if exp <= now:
        raise ExpiredExp("certificate expiry is not in the future")
    sanitizer = sansig_sanitizer_keygen(mno.rng)
    blocks = GnbCertificate.make_blocks(location, exp, gnb_id, now)
    sig = sansig_sign(blocks, mno.cn.sansig_signer, sanitizer.hash_key, CERT_ADM, mno.rng)
    gnb = GnbState(
        gnb_id=gnb_id,
        sanitizer=sanitizer,
        sign_pair=sig_keygen(mno.rng),
        enc_pair=pke_keygen(mno.rng),
        certificate=GnbCertificate(location, exp, gnb_id, now, sig),
        pk_sig_cn=mno.cn.sansig_signer.verify_key,
        rng=mno.rng,
        skew_ms=mno.cn.skew_ms,
        seen=SeenCache(ttl_ms=2 * mno.cn.skew_ms),
    )
    mno.gnb_registry[gnb_id] = gnb.public
    mno.cn.gnb_keys[gnb_id] = gnb.public
    return gnb


def _crs_seed(seed: int | bytes) -> bytes:
    raw = seed if isinstance(seed, bytes) else str(seed).encode()
    return hashlib.sha256(b"mvnoaka/mvno-crs\x00" + raw).digest()


def mvno_setup(seed: int | bytes | None = None, rng: random.Random | None = None) -> MvnoState:
    """CRS with trapdoor, commitment key, revocation key and an empty list (version 0)."""
    if rng is None:
        rng = make_rng(seed)
    crs, td = crs_gen(128, None if seed is None else _crs_seed(seed))
    return MvnoState(crs=crs, td=td, ck=commit_keygen(128), revocation=revocation_keygen(rng), rng=rng)


def _credential(mvno: MvnoState, pid: int) -> UserCredential:
    return UserCredential(
        pid=pid,
        crs=mvno.crs,
        ck=mvno.ck,
        revocation_key=mvno.revocation.public,
        aka_list=mvno.aka_list,
        cn_public=mvno.cn_public,
        gnb_keys={gid: g.pk_san for gid, g in mvno.gnb_keys.items()},
    )


def mvno_register_user(mvno: MvnoState, real_identity: str) -> UserCredential:
    """Sample a fresh pid and publish its tag."""
    if real_identity in mvno.user_directory:
        raise DuplicateUser(real_identity)
    while True:
        pid = random_scalar(mvno.rng)
        tag = make_tag(pid)
        if tag not in mvno.aka_list:
            break
    mvno.aka_list = mvno.aka_list.with_added(tag)
    mvno.user_directory[real_identity] = pid
    return _credential(mvno, pid)


def mvno_register_users(mvno: MvnoState, real_identities: list[str]) -> None:
    """Bulk registration (one list publication for the whole batch)."""
    tags = []
    for ident in real_identities:
        if ident in mvno.user_directory:
            raise DuplicateUser(ident)
        pid = random_scalar(mvno.rng)
        mvno.user_directory[ident] = pid
        tags.append(make_tag(pid))
    mvno.aka_list = mvno.aka_list.with_added(*tags)


def mvno_credential(mvno: MvnoState, real_identity: str) -> UserCredential:
    """Re-issue the credential of a registered user with current lists and keys."""
    return _credential(mvno, mvno.user_directory[real_identity])


def push_aka_list(cn: CnState, lst: AuthorizedList) -> None:
    if cn.aka_list is not None and lst.version < cn.aka_list.version:
        raise VersionRegression(f"list version {lst.version} < {cn.aka_list.version}")
    cn.aka_list = lst


def exchange_params(mvno: MvnoState, mno: MnoState) -> None:
    """MVNO -> CN: crs, ck, revocation key, list.  MNO -> MVNO: CN and gNB public keys."""
    cn = mno.cn
    if cn is None:
        raise NotProvisioned("CN keys must exist before the parameter exchange")
    push_aka_list(cn, mvno.aka_list)
    cn.crs, cn.ck, cn.revocation_key = mvno.crs, mvno.ck, mvno.revocation.public
    mvno.cn_public = cn.public
    mvno.gnb_keys = dict(mno.gnb_registry)


def make_ue(cred: UserCredential, rng: random.Random | None = None, skew_ms: int = DEFAULT_SKEW_MS) -> UeState:
    return UeState(
        pid=cred.pid,
        crs=cred.crs,
        ck=cred.ck,
        revocation_key=cred.revocation_key,
        aka_list=cred.aka_list,
        cn_public=cred.cn_public,
        gnb_keys=dict(cred.gnb_keys),
        rng=rng,
        skew_ms=skew_ms,
        seen_m1=SeenCache(ttl_ms=2 * skew_ms),
    )


def ue_refresh_lists(ue: UeState, aka_list: AuthorizedList | None = None, ho_list: AuthorizedList | None = None) -> None:
    """Adopt newer published lists; prepared proofs against older ones are dropped."""
    if aka_list is not None:
        if aka_list.version < ue.aka_list.version:
            raise VersionRegression("AKA list went backwards")
        ue.aka_list = aka_list
    if ho_list is not None:
        if ue.ho_list is not None and ho_list.version < ue.ho_list.version:
            raise VersionRegression("handover list went backwards")
        ue.ho_list = ho_list
