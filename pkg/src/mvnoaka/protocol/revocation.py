"""Revocation: the MVNO withdraws a pid tag and releases the token that lets
the CN find (and withdraw) the UID tags issued to that pid."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import UnknownTag, UnknownUser
from ..zkmembership.link import handle_matches, revocation_token
from ..zkmembership.tags import IdentityTag, make_tag
from .state import CnState, MvnoState


@dataclass(frozen=True)
class RevocationNotice:
    tag: IdentityTag
    token: int = field(repr=False)


def revoke_user(mvno: MvnoState, real_identity: str) -> RevocationNotice:
    pid = mvno.user_directory.pop(real_identity, None)
    if pid is None:
        raise UnknownUser(real_identity)
    tag = make_tag(pid)
    mvno.aka_list = mvno.aka_list.without(tag)
    return RevocationNotice(tag, revocation_token(mvno.revocation, pid))


def cn_apply_revocation(cn: CnState, notice: RevocationNotice) -> list[IdentityTag]:
    """Remove the pid tag and every linked UID tag; returns the UID tags removed."""
    if cn.aka_list is None or notice.tag not in cn.aka_list:
        raise UnknownTag("tag not in the CN's AKA list")
    cn.aka_list = cn.aka_list.without(notice.tag)
    removed, kept = [], []
    for handle, uid_tag in cn.links:
        (removed if handle_matches(handle, notice.token) else kept).append((handle, uid_tag))
    cn.links = kept
    for _, uid_tag in removed:
        if uid_tag in cn.ho_list:
            cn.ho_list = cn.ho_list.without(uid_tag)
    return [t for _, t in removed]
