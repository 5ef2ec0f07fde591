"""Unlinkability experiment.

Two subscribers are registered.  Each trial flips a fair coin, runs AKA (or
handover) for the chosen UE and hands the adversary every frame of the run.
Two fixed distinguishers try to recover the coin:

* matcher: looks up every variable field of the UE's message in all earlier
  sessions; a hit names the UE that sent the matching field.  Misses abstain,
  so with fresh fields the matcher's advantage is exactly zero.
* classifier: logistic regression over the raw bytes of the run's frames,
  trained on the first half of the trials and scored on the second half.

Advantage is ``|accuracy - 0.5|``.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field

import numpy as np
from sklearn.linear_model import LogisticRegression

from ..wire import decode_frame
from .scenario import ScenarioConfig, World

VARIABLE_FIELDS = {
    0x02: ("proof", "commitment", "pk_u", "spk_u", "link", "tau", "sig"),
    0x12: ("proof", "commitment", "pk_u", "spk_u", "sig", "tau"),
}


@dataclass
class LinkabilityReport:
    kind: str
    trials: int
    matcher_advantage: float
    repeated_fields: int
    classifier_advantage: float
    classifier_accuracy: float
    per_field_advantage: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _ue_fields(frames: list[tuple[str, bytes]], ue: str) -> dict[str, bytes]:
    for sender, frame in frames:
        if sender == ue and len(frame) > 1 and frame[1] in VARIABLE_FIELDS:
            msg = decode_frame(frame).message
            return dict(zip(msg.FIELD_NAMES, msg.fields()))
    return {}


def _advantage(x: np.ndarray, y: np.ndarray, seed: int) -> tuple[float, float]:
    half = len(y) // 2
    if len(set(y[:half])) < 2:
        return 0.0, 0.5
    clf = LogisticRegression(max_iter=2000, random_state=seed)
    clf.fit(x[:half], y[:half])
    acc = float((clf.predict(x[half:]) == y[half:]).mean())
    return abs(acc - 0.5), acc


def experiment_linkability(config: ScenarioConfig, trials: int = 2000, kind: str = "aka") -> LinkabilityReport:
    if kind not in ("aka", "ho"):
        raise ValueError("kind must be 'aka' or 'ho'")
    cfg = dataclasses.replace(config, n_ues=2, n_gnbs=max(2, config.n_gnbs), list_size=max(2, config.list_size), adversary=None)
    w = World(cfg)
    coin = random.Random(cfg.seed ^ 0xC011)
    ues = ("ue-0", "ue-1")
    if kind == "ho":
        for i in range(2):
            w.run_aka(i, 0)
        w.sync_handover_lists()

    seen: dict[tuple[str, bytes], int] = {}
    score = 0
    repeated = 0
    rows, labels = [], []
    per_field_rows: dict[str, list[bytes]] = {}
    for _ in range(trials):
        b = coin.randrange(2)
        start = len(w.transcript.events)
        res = w.run_aka(b, 0) if kind == "aka" else w.run_ho(b, 1)
        if not res.accepted:
            raise RuntimeError(f"honest {kind} run failed: {res.reasons}")
        frames = [(e.sender, e.frame) for e in w.transcript.events[start:]]
        fields = _ue_fields(frames, ues[b])
        guess = None
        for name, value in fields.items():
            hit = seen.get((name, value))
            if hit is not None:
                repeated += 1
                guess = hit
            seen[(name, value)] = b
            per_field_rows.setdefault(name, []).append(value)
        if guess is not None:
            score += 1 if guess == b else -1
        rows.append(b"".join(f for _, f in frames))
        labels.append(b)

    y = np.array(labels)
    width = max(map(len, rows))
    x = np.zeros((len(rows), width), dtype=np.float32)
    for i, r in enumerate(rows):
        x[i, : len(r)] = np.frombuffer(r, dtype=np.uint8) / 255.0
    adv, acc = _advantage(x, y, cfg.seed)
    per_field = {}
    for name, vals in per_field_rows.items():
        if name == "tau":
            continue
        fx = np.stack([np.frombuffer(v, dtype=np.uint8) for v in vals]).astype(np.float32) / 255.0
        per_field[name] = _advantage(fx, y, cfg.seed)[0]
    return LinkabilityReport(
        kind=kind,
        trials=trials,
        matcher_advantage=abs(score) / (2 * trials) if trials else 0.0,
        repeated_fields=repeated,
        classifier_advantage=adv,
        classifier_accuracy=acc,
        per_field_advantage=per_field,
    )
