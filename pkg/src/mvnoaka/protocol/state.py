"""Entity states for MNO, CN, gNB, MVNO and UE.

States are plain mutable dataclasses with a single writer: each protocol
operation takes one state, reads the others only through their public parts,
and returns the outgoing message.
"""

from __future__ import annotations

import random
from collections import OrderedDict
from dataclasses import dataclass, field

from ..group import Point
from ..primitives.chameleon import ChameleonKeyPair
from ..primitives.commitment import Commitment, CommitmentKey
from ..primitives.pke import EncKeyPair
from ..primitives.signature import SigKeyPair
from ..zkmembership.crs import Crs, CrsTrapdoor
from ..zkmembership.link import LinkHandle, RevocationKeyPair
from ..zkmembership.proof import MembershipProof
from ..zkmembership.tags import AuthorizedList, IdentityTag
from .messages import GnbCertificate, UidRecord

DEFAULT_SKEW_MS = 5000


class SeenCache:
    """Bounded LRU of recently accepted message keys.

    Entries older than ``ttl_ms`` are dropped lazily; anything that old is
    already rejected by the timestamp check.
    """

    def __init__(self, capacity: int = 4096, ttl_ms: int = 2 * DEFAULT_SKEW_MS):
        self.capacity = capacity
        self.ttl_ms = ttl_ms
        self._entries: OrderedDict[bytes, int] = OrderedDict()

    def _expire(self, now: int) -> None:
        while self._entries:
            key, t = next(iter(self._entries.items()))
            if now - t <= self.ttl_ms:
                break
            del self._entries[key]

    def seen(self, key: bytes, now: int) -> bool:
        self._expire(now)
        return key in self._entries

    def add(self, key: bytes, now: int) -> None:
        self._entries[key] = now
        self._entries.move_to_end(key)
        while len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def __len__(self) -> int:
        return len(self._entries)


@dataclass(frozen=True)
class CnPublicKeys:
    spk_cn: bytes  # verifies UID records
    pk_sig_cn: bytes  # SanSig signer key rooting every gNB certificate


@dataclass(frozen=True)
class GnbPublic:
    gnb_id: bytes
    spk: bytes
    pk_san: Point
    enc_key: bytes


@dataclass
class CnState:
    sign_pair: SigKeyPair
    sansig_signer: SigKeyPair
    rng: random.Random | None = None
    skew_ms: int = DEFAULT_SKEW_MS
    session_keys: bool = False
    crs: Crs | None = None
    ck: CommitmentKey | None = None
    revocation_key: Point | None = None
    aka_list: AuthorizedList | None = None
    ho_list: AuthorizedList = field(default_factory=AuthorizedList)
    uid_store: set[bytes] = field(default_factory=set)
    # (escrowed handle, uid tag) per issued UID; tag-level only, never identities
    links: list[tuple[LinkHandle, IdentityTag]] = field(default_factory=list)
    gnb_keys: dict[bytes, GnbPublic] = field(default_factory=dict)
    seen: SeenCache = field(default_factory=SeenCache)

    @property
    def public(self) -> CnPublicKeys:
        return CnPublicKeys(self.sign_pair.verify_key, self.sansig_signer.verify_key)


@dataclass
class MnoState:
    rng: random.Random | None = None
    cn: CnState | None = None
    gnb_registry: dict[bytes, GnbPublic] = field(default_factory=dict)


@dataclass
class GnbState:
    gnb_id: bytes
    sanitizer: ChameleonKeyPair
    sign_pair: SigKeyPair
    enc_pair: EncKeyPair
    certificate: GnbCertificate
    pk_sig_cn: bytes
    rng: random.Random | None = None
    skew_ms: int = DEFAULT_SKEW_MS
    crs: Crs | None = None
    ck: CommitmentKey | None = None
    ho_list: AuthorizedList | None = None
    seen: SeenCache = field(default_factory=SeenCache)
    session_keys: dict[bytes, bytes] = field(default_factory=dict)  # commitment -> K

    @property
    def public(self) -> GnbPublic:
        return GnbPublic(self.gnb_id, self.sign_pair.verify_key, self.sanitizer.hash_key, self.enc_pair.enc_key)


@dataclass
class MvnoState:
    crs: Crs
    td: CrsTrapdoor
    ck: CommitmentKey
    revocation: RevocationKeyPair
    rng: random.Random | None = None
    user_directory: dict[str, int] = field(default_factory=dict)
    aka_list: AuthorizedList = field(default_factory=AuthorizedList)
    cn_public: CnPublicKeys | None = None
    gnb_keys: dict[bytes, GnbPublic] = field(default_factory=dict)


@dataclass(frozen=True)
class UserCredential:
    """What the MVNO hands a subscriber over the provisioning channel."""

    pid: int = field(repr=False)
    crs: Crs
    ck: CommitmentKey
    revocation_key: Point
    aka_list: AuthorizedList
    cn_public: CnPublicKeys | None
    gnb_keys: dict[bytes, Point]


@dataclass
class Session:
    """Per-run ephemerals; dropped once the run completes."""

    kind: str
    enc_pair: EncKeyPair
    sig_pair: SigKeyPair
    r: int = field(repr=False)
    commitment: Commitment
    proof: MembershipProof
    list_digest: bytes
    link: LinkHandle | None = None
    sent_sig: bytes | None = None


@dataclass
class UeState:
    pid: int = field(repr=False)
    crs: Crs
    ck: CommitmentKey
    revocation_key: Point
    aka_list: AuthorizedList
    cn_public: CnPublicKeys | None
    gnb_keys: dict[bytes, Point]
    rng: random.Random | None = None
    skew_ms: int = DEFAULT_SKEW_MS
    ho_list: AuthorizedList | None = None
    uid_record: UidRecord | None = None
    session_key: bytes | None = None
    prepared: dict[str, Session] = field(default_factory=dict)
    pending: Session | None = None
    seen_m1: SeenCache = field(default_factory=SeenCache)
