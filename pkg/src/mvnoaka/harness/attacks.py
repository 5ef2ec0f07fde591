"""Scripted Dolev-Yao attacks: message replay and fake base stations."""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field

from ..group import random_bytes, random_scalar, scalar_to_bytes
from ..primitives.chameleon import ch_collision, ch_keygen
from ..primitives.sansig import SanSigSignature, _block_input, _fixed_digest, sansig_sanit, sansig_sign
from ..primitives.signature import sig_keygen
from ..protocol.aka import sanitized_certificate
from ..protocol.messages import CERT_ADM, AkaM1, GnbCertificate, ts_bytes
from ..wire import encode_frame
from .scenario import ScenarioConfig, World

REPLAYABLE = ("M1", "M2", "M3", "HO-M2")


@dataclass(frozen=True)
class ReplayCase:
    message: str
    window: str  # inside | outside
    accepted: bool
    reason: str


@dataclass
class ReplayVerdict:
    cases: list[ReplayCase] = field(default_factory=list)

    @property
    def accepted(self) -> int:
        return sum(c.accepted for c in self.cases)

    @property
    def rejected(self) -> int:
        return len(self.cases) - self.accepted

    def to_dict(self) -> dict:
        return {"accepted": self.accepted, "rejected": self.rejected, "cases": [dataclasses.asdict(c) for c in self.cases]}


def _replay_world(config: ScenarioConfig) -> World:
    return World(dataclasses.replace(config, n_ues=max(2, config.n_ues), n_gnbs=max(2, config.n_gnbs),
                                     list_size=max(config.list_size, 2), adversary=None))


def attack_replay(config: ScenarioConfig) -> ReplayVerdict:
    """Record one honest AKA + HO, then replay M1/M2/M3/HO-M2 inside and outside the window."""
    w = _replay_world(config)
    start = len(w.transcript.events)
    w.run_aka(0, 0)
    w.sync_handover_lists()
    w.run_ho(0, 1)
    ev = w.transcript.events[start:]

    def pick(sender: str, receiver: str, type_tag: int):
        return next(e for e in ev if e.sender == sender and e.receiver == receiver and e.frame[1] == type_tag)

    recorded = {
        "M1": pick("gnb-0", "ue-0", 0x01),
        "M2": pick("ue-0", "gnb-0", 0x02),
        "M3": pick("gnb-0", "cn", 0x03),
        "HO-M2": pick("ue-0", "gnb-1", 0x12),
    }
    verdict = ReplayVerdict()

    def replay(name: str, window: str, receiver_override: str | None = None) -> None:
        e = recorded[name]
        assoc = "gnb-0/replay" if name == "M3" else None
        out = w.inject("adversary", receiver_override or e.receiver, e.frame, assoc)
        first = out[0]
        verdict.cases.append(ReplayCase(name, window, first.outcome == "accept", first.reason))

    for name in REPLAYABLE:
        replay(name, "inside")
    w.advance(w.config.skew_ms + 1000)
    for name in REPLAYABLE:
        # the broadcast goes to a UE that has never heard it
        replay(name, "outside", "ue-1" if name == "M1" else None)
    return verdict


@dataclass
class FakeGnbVerdict:
    fabricated: int = 0
    fabricated_accepts: int = 0
    forgeries: int = 0
    forgery_accepts: int = 0
    stale_replays: int = 0
    stale_accepts: int = 0
    reasons: dict[str, int] = field(default_factory=dict)

    @property
    def accepts(self) -> int:
        return self.fabricated_accepts + self.forgery_accepts + self.stale_accepts

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["accepts"] = self.accepts
        return d


def _random_sansig(rng: random.Random) -> bytes:
    """A structurally valid signature with random content."""
    return bytes([3]) + CERT_ADM.mask(3) + random_bytes(rng, 64) + scalar_to_bytes(random_scalar(rng)) + scalar_to_bytes(random_scalar(rng))


def attack_fake_gnb(config: ScenarioConfig, forgeries: int = 1000, fabrications: int = 30) -> FakeGnbVerdict:
    """Fabricated certificates, random signature forgeries and stale genuine broadcasts against one UE."""
    w = World(dataclasses.replace(config, adversary=None))
    rng = random.Random(config.seed ^ 0x5EED)
    verdict = FakeGnbVerdict()
    genuine = w.gnbs["gnb-0"]
    w.camped["ue-0"] = "gnb-0"

    def try_frame(frame: bytes, kind: str) -> None:
        first = w.inject("adversary", "ue-0", frame)[0]
        ok = first.outcome == "accept"
        verdict.reasons[first.reason or "accept"] = verdict.reasons.get(first.reason or "accept", 0) + 1
        if kind == "fabricated":
            verdict.fabricated += 1
            verdict.fabricated_accepts += ok
        elif kind == "forgery":
            verdict.forgeries += 1
            verdict.forgery_accepts += ok
        else:
            verdict.stale_replays += 1
            verdict.stale_accepts += ok

    cert = genuine.certificate
    for i in range(fabrications):
        now = w.now
        san = ch_keygen(rng)
        if i % 3 == 0:
            # own signer and own sanitizer, claiming the genuine cell id
            signer = sig_keygen(rng)
            blocks = GnbCertificate.make_blocks(cert.location, cert.exp, genuine.gnb_id, now)
            sig = sansig_sign(blocks, signer, san.hash_key, CERT_ADM, rng)
        elif i % 3 == 1:
            # genuine signer's certificate re-signed for a sanitizer key the adversary holds
            signer = sig_keygen(rng)
            blocks = GnbCertificate.make_blocks(b"fake-location", cert.exp, genuine.gnb_id, now)
            sig = sansig_sign(blocks, signer, san.hash_key, CERT_ADM, rng)
            sig = sansig_sanit(blocks, {2: genuine.gnb_id + blocks[2][-8:]}, sig, signer.verify_key, san, rng)[1]
        else:
            # genuine certificate, re-timestamped with a collision under the adversary's own trapdoor
            fixed = _fixed_digest(cert.blocks(), cert.sansig.adm)
            rand = ch_collision(
                san,
                _block_input(fixed, 2, cert.blocks()[2]),
                cert.sansig.randomness[0],
                _block_input(fixed, 2, genuine.gnb_id + ts_bytes(now)),
                rng,
            )
            sig = dataclasses.replace(cert.sansig, randomness=(rand,))
        fake = GnbCertificate(cert.location if i % 3 != 1 else b"fake-location", cert.exp, genuine.gnb_id, now, sig)
        try_frame(encode_frame(AkaM1(fake)), "fabricated")

    for _ in range(forgeries):
        now = w.now
        sig = SanSigSignature.from_bytes(_random_sansig(rng))
        fake = GnbCertificate(cert.location, cert.exp, genuine.gnb_id, now, sig)
        try_frame(encode_frame(AkaM1(fake)), "forgery")

    # genuine broadcasts, replayed once they are stale
    stale = [encode_frame(AkaM1(_sanitize(w, genuine))) for _ in range(5)]
    w.advance(w.config.skew_ms + 1)
    for frame in stale:
        try_frame(frame, "stale")
    return verdict


def _sanitize(w: World, gnb) -> GnbCertificate:
    cert = sanitized_certificate(gnb, w.now)
    w.advance(1)
    return cert
