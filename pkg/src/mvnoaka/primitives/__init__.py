from .chameleon import ChameleonKeyPair, ChameleonRandomness, ch_collision, ch_hash, ch_keygen, ch_random
from .commitment import (
    BLINDING_BASE,
    MESSAGE_BASE,
    Commitment,
    CommitmentKey,
    commit,
    commit_keygen,
    decommit,
)
from .pke import EncKeyPair, pke_decrypt, pke_encrypt, pke_keygen
from .sansig import (
    AdmPolicy,
    SanSigKeys,
    SanSigSignature,
    sansig_sanit,
    sansig_sanitizer_keygen,
    sansig_sign,
    sansig_signer_keygen,
    sansig_verify,
)
from .signature import SigKeyPair, sig_keygen, sign, verify

__all__ = [
    "AdmPolicy",
    "BLINDING_BASE",
    "ChameleonKeyPair",
    "ChameleonRandomness",
    "Commitment",
    "CommitmentKey",
    "EncKeyPair",
    "MESSAGE_BASE",
    "SanSigKeys",
    "SanSigSignature",
    "SigKeyPair",
    "ch_collision",
    "ch_hash",
    "ch_keygen",
    "ch_random",
    "commit",
    "commit_keygen",
    "decommit",
    "pke_decrypt",
    "pke_encrypt",
    "pke_keygen",
    "sansig_sanit",
    "sansig_sanitizer_keygen",
    "sansig_sign",
    "sansig_signer_keygen",
    "sansig_verify",
    "sig_keygen",
    "sign",
    "verify",
]
