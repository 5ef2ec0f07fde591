from .crs import Crs, CrsTrapdoor, crs_gen, list_format_binding
from .link import (
    LinkHandle,
    RevocationKeyPair,
    handle_matches,
    make_link_handle,
    revocation_keygen,
    revocation_token,
    verify_link_handle,
)
from .proof import MAX_LIST_SIZE, MembershipProof, proof_length, prove_membership, simulate_proof, verify_membership
from .tags import TAG_OFFSET, AuthorizedList, IdentityTag, identity_scalar, make_tag

__all__ = [
    "AuthorizedList",
    "Crs",
    "CrsTrapdoor",
    "IdentityTag",
    "LinkHandle",
    "MAX_LIST_SIZE",
    "MembershipProof",
    "RevocationKeyPair",
    "TAG_OFFSET",
    "crs_gen",
    "handle_matches",
    "identity_scalar",
    "list_format_binding",
    "make_link_handle",
    "make_tag",
    "proof_length",
    "prove_membership",
    "revocation_keygen",
    "revocation_token",
    "simulate_proof",
    "verify_link_handle",
    "verify_membership",
]
