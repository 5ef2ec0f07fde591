"""Deterministic multi-entity scenarios.

A :class:`World` owns every entity, a logical clock and the adversary.
Entities talk only through framed bytes; each delivery becomes one transcript
event.  Failures at the gNB or CN are answered with the single abort frame and
the reason code is kept in the transcript only.
"""

from __future__ import annotations

import random
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass, field, replace

from ..errors import Aborted, DecodeError, ProtocolError, RegistrationError, UnexpectedMessage
from ..group import scalar_to_bytes
from ..protocol import (
    Abort,
    AkaM1,
    AkaM2,
    AkaM3,
    AkaM4,
    HoM1,
    HoM2,
    HoM3,
    MnoState,
    cn_apply_revocation,
    cn_issue_uid,
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
    mvno_register_users,
    mvno_setup,
    revoke_user,
    ue_prepare_handover,
    ue_prepare_session,
    ue_process_m1_make_m2,
    ue_process_m4,
    ue_refresh_lists,
)
from ..protocol.state import DEFAULT_SKEW_MS, GnbState, UeState
from ..wire import ABORT_FRAME, decode_frame, encode_frame
from ..zkmembership.proof import MAX_LIST_SIZE
from ..zkmembership.tags import identity_scalar, make_tag
from .network import AdversaryScript, Envelope, LogicalClock, LoopbackLink
from .transcript import Event, Transcript

CERT_LIFETIME_MS = 365 * 24 * 3600 * 1000
TRANSPORTS = ("memory", "socket")


class ConfigInvalid(ValueError):
    pass


@dataclass
class ScenarioConfig:
    seed: int = 0
    n_ues: int = 1
    n_gnbs: int = 2
    list_size: int = 16
    skew_ms: int = DEFAULT_SKEW_MS
    session_keys: bool = False
    adversary: AdversaryScript | None = None
    hop_ms: int = 5
    transport: str = "memory"  # or "socket": frames cross a loopback socket pair
    # tokens: aka[:i], ho[:i], sync, revoke:i
    plan: tuple[str, ...] = ("aka", "sync", "ho")

    def validate(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid("seed must be an unsigned 64-bit integer")
        if self.n_ues < 1 or self.n_gnbs < 1:
            raise ConfigInvalid("need at least one UE and one gNB")
        if not self.n_ues <= self.list_size <= MAX_LIST_SIZE:
            raise ConfigInvalid(f"list_size must be in [n_ues, {MAX_LIST_SIZE}]")
        if self.transport not in TRANSPORTS:
            raise ConfigInvalid(f"transport must be one of {', '.join(TRANSPORTS)}")
        if self.skew_ms < 0 or self.hop_ms < 0:
            raise ConfigInvalid("skew_ms and hop_ms must be non-negative")
        for tok in self.plan:
            head, _, arg = tok.partition(":")
            if head not in ("aka", "ho", "sync", "revoke") or (arg and not arg.isdigit()):
                raise ConfigInvalid(f"bad plan step {tok!r}")
            if arg and int(arg) >= self.n_ues:
                raise ConfigInvalid(f"plan step {tok!r} names a UE that does not exist")
            if head == "revoke" and not arg:
                raise ConfigInvalid("revoke needs a UE index")


@dataclass
class RunResult:
    run: int
    kind: str
    ue: str
    gnb: str
    accepted: bool
    reasons: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"run": self.run, "kind": self.kind, "ue": self.ue, "gnb": self.gnb, "accepted": self.accepted}


class World:
    def __init__(self, config: ScenarioConfig):
        config.validate()
        self.config = config
        self.rng = random.Random(config.seed)
        self.clock = LogicalClock(hop_ms=config.hop_ms)
        self.adversary = config.adversary or AdversaryScript()
        self.transcript = Transcript()
        self.step = 0
        self.run_id = 0
        self._queue: deque[Envelope] = deque()
        self._assoc_seq = 0
        self._assoc: dict[str, str] = {}  # gNB side: association -> UE entity
        self.camped: dict[str, str] = {}
        self._handlers: dict[str, Callable] = {}
        self.link = LoopbackLink() if config.transport == "socket" else None

        now = self.clock.now
        self.mno = MnoState(rng=self.rng)
        self.cn = self._op("mno_setup_cn", mno_setup_cn, self.mno, config.skew_ms, config.session_keys)
        self.gnbs: dict[str, GnbState] = {}
        for i in range(config.n_gnbs):
            self.gnbs[f"gnb-{i}"] = self._op(
                "mno_register_gnb", mno_register_gnb, self.mno, f"gnb-{i:03d}", f"cell-{i:03d}", now + CERT_LIFETIME_MS, now
            )
        self.gnb_by_id = {g.gnb_id: name for name, g in self.gnbs.items()}

        self.mvno = self._op("mvno_setup", mvno_setup, config.seed, self.rng)
        self.ue_names = [f"ue-{i}" for i in range(config.n_ues)]
        fillers = [f"filler-{i}" for i in range(config.list_size - config.n_ues)]
        everyone = self.ue_names + fillers
        self.rng.shuffle(everyone)
        self._op("mvno_register_users", mvno_register_users, self.mvno, everyone)
        self._op("exchange_params", exchange_params, self.mvno, self.mno)
        self.ues: dict[str, UeState] = {
            name: make_ue(mvno_credential(self.mvno, name), self.rng, config.skew_ms) for name in self.ue_names
        }
        # handover list starts with UIDs of other subscribers so its size matches list_size once all UEs ran AKA
        for _ in range(config.list_size - config.n_ues):
            cn_issue_uid(self.cn)
        self.revoked: set[str] = set()

    # bookkeeping

    def _op(self, name: str, fn: Callable, *args):
        try:
            out = fn(*args)
        except (ProtocolError, RegistrationError, DecodeError) as exc:
            self.transcript.coverage["error:" + exc.code] += 1
            raise
        self.transcript.coverage[name] += 1
        return out

    def advance(self, ms: int) -> int:
        return self.clock.tick(ms)

    @property
    def now(self) -> int:
        return self.clock.now

    def secrets(self) -> list[bytes]:
        """Byte encodings of every identity and identity tag (for leakage scans)."""
        out = []
        for ue in self.ues.values():
            for x in (ue.pid,) + ((identity_scalar(ue.uid_record.uid),) if ue.uid_record else ()):
                out += [scalar_to_bytes(x), scalar_to_bytes(x)[::-1], bytes(make_tag(x))]
            if ue.uid_record:
                out.append(ue.uid_record.uid)
        return out

    # network

    def send(self, env: Envelope) -> None:
        self._queue.append(env)
        self._pump()

    def inject(self, sender: str, receiver: str, data: bytes, assoc: str | None = None) -> list[Event]:
        """Deliver adversary traffic outside any protocol run (logged under run 0)."""
        start, run = len(self.transcript.events), self.run_id
        self.run_id = 0
        try:
            self.send(Envelope(sender, receiver, data, assoc))
        finally:
            self.run_id = run
        return self.transcript.events[start:]

    def _pump(self) -> None:
        while self._queue:
            env = self._queue.popleft()
            self.step += 1
            t = self.clock.tick()
            action, delivered = self.adversary.intercept(self.step, env)
            if delivered is None:
                self.transcript.append(Event(self.step, t, self.run_id, env.sender, env.receiver, env.data, action, "dropped"))
                continue
            if self.link is not None:
                delivered = replace(delivered, data=self.link.carry(delivered.data))
            outcome, reason, out = self._deliver(delivered, t)
            self.transcript.append(
                Event(self.step, t, self.run_id, delivered.sender, delivered.receiver, delivered.data, action, outcome, reason)
            )
            self._queue.extend(out)

    def _deliver(self, env: Envelope, now: int) -> tuple[str, str, list[Envelope]]:
        receiver = env.receiver
        if receiver in self.ues:
            handler = self._ue_handle
        elif receiver in self.gnbs:
            handler = self._gnb_handle
        elif receiver == "cn":
            handler = self._cn_handle
        else:
            return "ignored", "no-such-entity", []
        try:
            msg = self._op("decode", lambda d: decode_frame(d).message, env.data)
            out = handler(env, msg, now)
            return "accept", "", out
        except (ProtocolError, DecodeError) as exc:
            if receiver in self.ues or env.data == ABORT_FRAME:
                return "abort", exc.code, []
            # single abort signal, whatever went wrong
            back = env.sender
            if receiver in self.gnbs and env.sender == "cn":
                back = self._assoc.get(env.assoc or "", env.sender)
            return "abort", exc.code, [Envelope(receiver, back, ABORT_FRAME, env.assoc)]

    def _ue_handle(self, env: Envelope, msg, now: int) -> list[Envelope]:
        name = env.receiver
        ue = self.ues[name]
        cell = self.camped.get(name)
        cell_id = self.gnbs[cell].gnb_id if cell else None
        if isinstance(msg, AkaM1):
            m2 = self._op("ue_process_m1_make_m2", ue_process_m1_make_m2, ue, msg, now, cell_id)
            self.transcript.checkpoint(self.run_id, "sansig-verified")
            return [Envelope(name, cell or env.sender, encode_frame(m2))]
        if isinstance(msg, HoM1):
            m2 = self._op("ho_ue_make_m2", ho_ue_make_m2, ue, msg, now, cell_id)
            self.transcript.checkpoint(self.run_id, "sansig-verified")
            return [Envelope(name, cell or env.sender, encode_frame(m2))]
        if isinstance(msg, AkaM4):
            self._op("ue_process_m4", ue_process_m4, ue, msg, now)
            self.transcript.checkpoint(self.run_id, "uid-received")
            return []
        if isinstance(msg, HoM3):
            self._op("ho_ue_process_m3", ho_ue_process_m3, ue, msg)
            self.transcript.checkpoint(self.run_id, "ho-confirmed")
            return []
        if isinstance(msg, Abort):
            ue.pending = None
            self.transcript.coverage["error:" + Aborted.code] += 1
            raise Aborted("network rejected the run")
        self.transcript.coverage["error:" + UnexpectedMessage.code] += 1
        raise UnexpectedMessage(f"UE got {msg.NAME}")

    def _gnb_handle(self, env: Envelope, msg, now: int) -> list[Envelope]:
        name = env.receiver
        gnb = self.gnbs[name]
        if isinstance(msg, AkaM2):
            m3 = self._op("gnb_process_m2_make_m3", gnb_process_m2_make_m3, gnb, msg, now)
            self._assoc_seq += 1
            assoc = f"{name}/{self._assoc_seq}"
            self._assoc[assoc] = env.sender
            return [Envelope(name, "cn", encode_frame(m3), assoc)]
        if isinstance(msg, HoM2):
            m3 = self._op("ho_gnb_process_m2_make_m3", ho_gnb_process_m2_make_m3, gnb, msg, now)
            self.transcript.checkpoint(self.run_id, "ho-proof-verified")
            return [Envelope(name, env.sender, encode_frame(m3))]
        if env.sender == "cn" and isinstance(msg, (AkaM4, Abort)):
            ue = self._assoc.pop(env.assoc or "", None)
            if ue is None:
                raise UnexpectedMessage("no RAN association for this CN message")
            if isinstance(msg, Abort):
                return [Envelope(name, ue, ABORT_FRAME)]
            m4 = self._op("gnb_forward_m4", gnb_forward_m4, gnb, msg)
            return [Envelope(name, ue, encode_frame(m4))]
        self.transcript.coverage["error:" + UnexpectedMessage.code] += 1
        raise UnexpectedMessage(f"gNB got {msg.NAME}")

    def _cn_handle(self, env: Envelope, msg, now: int) -> list[Envelope]:
        if isinstance(msg, AkaM3):
            gnb_name = (env.assoc or "").split("/")[0]
            gnb_id = self.gnbs[gnb_name].gnb_id if gnb_name in self.gnbs else b""
            m4 = self._op("cn_process_m3_make_m4", cn_process_m3_make_m4, self.cn, msg, now, gnb_id)
            self.transcript.checkpoint(self.run_id, "proof-verified")
            return [Envelope("cn", gnb_name or env.sender, encode_frame(m4), env.assoc)]
        self.transcript.coverage["error:" + UnexpectedMessage.code] += 1
        raise UnexpectedMessage(f"CN got {msg.NAME}")

    # flows

    def _local(self, sender: str, reason: str) -> None:
        self.step += 1
        self.transcript.append(Event(self.step, self.now, self.run_id, sender, "-", b"", "local", "abort", reason))

    def _finish(self, kind: str, ue: str, gnb: str, start: int, done: bool) -> RunResult:
        events = self.transcript.events[start:]
        reasons = [e.reason for e in events if e.outcome == "abort"]
        accepted = done and not reasons
        res = RunResult(self.run_id, kind, ue, gnb, accepted, reasons)
        self.transcript.results.append(res.to_dict())
        return res

    def run_aka(self, ue: str | int = 0, gnb: str | int = 0, prepare: bool = True) -> RunResult:
        ue, gnb = self._name(ue, "ue"), self._name(gnb, "gnb")
        self.run_id += 1
        start = len(self.transcript.events)
        state = self.ues[ue]
        before = state.uid_record
        self.camped[ue] = gnb
        if prepare:
            try:
                self._op("ue_prepare_session", ue_prepare_session, state)
            except ProtocolError:
                pass  # surfaces again when M1 is processed
        try:
            m1 = self._op("gnb_make_m1", gnb_make_m1, self.gnbs[gnb], self.now)
        except ProtocolError as exc:
            self._local(gnb, exc.code)
            return self._finish("aka", ue, gnb, start, False)
        self.send(Envelope(gnb, ue, encode_frame(m1)))
        done = state.uid_record is not None and state.uid_record is not before
        return self._finish("aka", ue, gnb, start, done)

    def run_ho(self, ue: str | int = 0, gnb: str | int = 1, prepare: bool = True, refresh: bool = True) -> RunResult:
        ue, gnb = self._name(ue, "ue"), self._name(gnb, "gnb")
        self.run_id += 1
        start = len(self.transcript.events)
        state, target = self.ues[ue], self.gnbs[gnb]
        self.camped[ue] = gnb
        if refresh and target.ho_list is not None:
            self._op("ue_refresh_lists", ue_refresh_lists, state, None, target.ho_list)
        if prepare and state.uid_record is not None:
            try:
                self._op("ue_prepare_handover", ue_prepare_handover, state)
            except ProtocolError:
                pass
        confirmed = self.transcript.checkpoints.count((self.run_id, "ho-confirmed"))
        try:
            m1 = self._op("gnb_make_ho_m1", gnb_make_ho_m1, target, self.now)
        except ProtocolError as exc:
            self._local(gnb, exc.code)
            return self._finish("ho", ue, gnb, start, False)
        self.send(Envelope(gnb, ue, encode_frame(m1)))
        done = self.transcript.checkpoints.count((self.run_id, "ho-confirmed")) > confirmed
        return self._finish("ho", ue, gnb, start, done)

    def sync_handover_lists(self) -> None:
        for gnb in self.gnbs.values():
            self._op("cn_sync_handover_list", cn_sync_handover_list, self.cn, gnb)

    def revoke(self, ue: str | int, refresh_ues: bool = True) -> None:
        """Revoke at the MVNO, apply at the CN, push lists to gNBs and UEs."""
        ue = self._name(ue, "ue")
        notice = self._op("revoke_user", revoke_user, self.mvno, ue)
        self._op("cn_apply_revocation", cn_apply_revocation, self.cn, notice)
        self.sync_handover_lists()
        self.revoked.add(ue)
        if refresh_ues:
            for state in self.ues.values():
                ue_refresh_lists(state, self.mvno.aka_list, self.cn.ho_list)

    def reregister(self, ue: str | int) -> None:
        """Register a (previously revoked) subscriber again; it gets a fresh pid."""
        ue = self._name(ue, "ue")
        self._op("mvno_register_user", mvno_register_user, self.mvno, ue)
        self._op("exchange_params", exchange_params, self.mvno, self.mno)
        self.ues[ue] = make_ue(mvno_credential(self.mvno, ue), self.rng, self.config.skew_ms)
        for state in self.ues.values():
            ue_refresh_lists(state, self.mvno.aka_list)
        self.revoked.discard(ue)

    def _name(self, x: str | int, kind: str) -> str:
        return f"{kind}-{x}" if isinstance(x, int) else x

    def run_plan(self, plan: tuple[str, ...]) -> list[RunResult]:
        results = []
        n_g = len(self.gnbs)
        for tok in plan:
            head, _, arg = tok.partition(":")
            targets = [int(arg)] if arg else range(len(self.ues))
            if head == "aka":
                results += [self.run_aka(i, i % n_g) for i in targets]
            elif head == "ho":
                results += [self.run_ho(i, (i + 1) % n_g) for i in targets]
            elif head == "sync":
                self.sync_handover_lists()
            elif head == "revoke":
                self.revoke(int(arg))
        return results


def run_scenario(config: ScenarioConfig) -> Transcript:
    world = World(config)
    world.run_plan(config.plan)
    return world.transcript
