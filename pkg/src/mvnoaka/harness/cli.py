"""Command-line entry point.

Exit codes: 0 when every scenario assertion held, 1 when one failed, 2 for
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .attacks import attack_fake_gnb, attack_replay
from .bench import E2E_BUDGET_MS, bench, reference_csv, throughput
from .config import load_config
from .linkability import experiment_linkability
from .scenario import TRANSPORTS, ConfigInvalid, ScenarioConfig, World

FEATURES = ("session-keys",)
ATTACKS = ("replay", "fake-gnb", "linkability")
ADVANTAGE_BOUND = 0.05


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file mirroring these flags")
    common.add_argument("--seed", type=int)
    common.add_argument("--ues", type=int)
    common.add_argument("--gnbs", type=int)
    common.add_argument("--list-size", type=int)
    common.add_argument("--skew-ms", type=int)
    common.add_argument("--features", help="comma-separated: " + ",".join(FEATURES))
    common.add_argument("--transcript-out", help="write a hex dump of the transcript here")
    common.add_argument("--output", choices=("json", "csv"))
    common.add_argument("--transport", choices=TRANSPORTS, help="memory (default) or loopback socket framing")

    p = argparse.ArgumentParser(prog="mvnoaka", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("setup", parents=[common], help="build all entities and print public parameters")
    sub.add_parser("run-aka", parents=[common], help="run AKA for every UE")
    sub.add_parser("run-ho", parents=[common], help="run AKA then handover for every UE")
    sub.add_parser("revoke", parents=[common], help="revoke ue-0 and check that it is locked out")
    a = sub.add_parser("attack", parents=[common], help="run an attack or privacy experiment")
    a.add_argument("--type", choices=ATTACKS, help="required here or as type= in the config file")
    a.add_argument("--trials", type=int)
    b = sub.add_parser("bench", parents=[common], help="per-message cost and end-to-end latency")
    b.add_argument("--reps", type=int)
    b.add_argument("--workers", type=int, help="also measure AKA throughput over this many processes")
    b.add_argument("--sessions", type=int, help="sessions for the throughput run (default 8 per worker)")
    return p


def _settings(args: argparse.Namespace) -> dict:
    settings = load_config(args.config) if args.config else {}
    for key in ("seed", "ues", "gnbs", "list_size", "skew_ms", "features", "transcript_out", "output", "trials", "reps", "type", "transport", "workers", "sessions"):
        val = getattr(args, key, None)
        if val is not None:
            settings[key.replace("_", "-")] = val
    return settings


def _config(s: dict) -> ScenarioConfig:
    feats = {f.strip() for f in str(s.get("features", "")).split(",") if f.strip()}
    unknown = feats - set(FEATURES)
    if unknown:
        raise ConfigInvalid(f"unknown feature(s): {', '.join(sorted(unknown))}")
    for key in ("workers", "sessions", "trials", "reps"):
        if key in s and s[key] < 1:
            raise ConfigInvalid(f"{key} must be positive")
    if s.get("output", "json") not in ("json", "csv"):
        raise ConfigInvalid("output must be json or csv")
    cfg = ScenarioConfig(
        seed=s.get("seed", 0),
        n_ues=s.get("ues", 1),
        n_gnbs=s.get("gnbs", 2),
        list_size=s.get("list-size", 16),
        skew_ms=s.get("skew-ms", 5000),
        session_keys="session-keys" in feats,
        transport=s.get("transport", "memory"),
    )
    cfg.validate()
    return cfg


def _emit(result: dict, fmt: str) -> None:
    if fmt == "csv":
        keys = [k for k, v in result.items() if not isinstance(v, (dict, list))]
        print(",".join(keys))
        print(",".join(str(result[k]) for k in keys))
    else:
        print(json.dumps(result, indent=2, default=str))


def _run(cmd: str, s: dict, cfg: ScenarioConfig) -> tuple[bool, dict, World | None]:
    if cmd == "setup":
        w = World(cfg)
        return True, {
            "crs_digest": w.mvno.crs.digest.hex(),
            "ck_digest": w.mvno.ck.digest.hex(),
            "aka_list_digest": w.mvno.aka_list.digest.hex(),
            "aka_list_size": len(w.mvno.aka_list),
            "aka_list_version": w.mvno.aka_list.version,
            "cn_list_in_sync": w.cn.aka_list.digest == w.mvno.aka_list.digest,
            "gnbs": [g.gnb_id.decode() for g in w.gnbs.values()],
        }, w
    if cmd == "run-aka":
        w = World(cfg)
        res = w.run_plan(("aka",))
        return all(r.accepted for r in res), {"runs": [r.to_dict() for r in res]}, w
    if cmd == "run-ho":
        w = World(cfg)
        res = w.run_plan(("aka", "sync", "ho"))
        ho_runs = [r for r in res if r.kind == "ho"]
        cn_events = sum(
            1 for r in ho_runs for e in w.transcript.for_run(r.run) if "cn" in (e.sender, e.receiver)
        )
        ok = all(r.accepted for r in res) and cn_events == 0
        return ok, {"runs": [r.to_dict() for r in res], "cn_events_in_handover": cn_events}, w
    if cmd == "revoke":
        w = World(cfg)
        before = w.run_plan(("aka", "sync"))
        w.revoke(0)
        after_aka = w.run_aka(0, 0)
        after_ho = w.run_ho(0, 1 % cfg.n_gnbs)
        control = [w.run_aka(i, 0) for i in range(1, cfg.n_ues)]
        ok = all(r.accepted for r in before) and not after_aka.accepted and not after_ho.accepted
        ok = ok and all(r.accepted for r in control)
        return ok, {
            "revoked": "ue-0",
            "aka_after_revocation": after_aka.accepted,
            "ho_after_revocation": after_ho.accepted,
            "control_runs_accepted": [r.accepted for r in control],
        }, w
    if cmd == "attack":
        kind = s.get("type")
        if kind == "replay":
            v = attack_replay(cfg)
            return v.accepted == 0, v.to_dict(), None
        if kind == "fake-gnb":
            v = attack_fake_gnb(cfg, forgeries=s.get("trials", 1000))
            return v.accepts == 0, v.to_dict(), None
        trials = s.get("trials", 2000)
        reports = [experiment_linkability(cfg, trials, k) for k in ("aka", "ho")]
        ok = all(
            r.matcher_advantage == 0 and r.repeated_fields == 0 and r.classifier_advantage <= ADVANTAGE_BOUND
            for r in reports
        )
        return ok, {r.kind: r.to_dict() for r in reports}, None
    if cmd == "bench":
        report = bench(cfg, reps=s.get("reps", 10))
        if s.get("output") == "csv":
            print(report.to_csv(), end="")
            print()
            print(reference_csv(), end="")
        ok = report.ordering_holds() and report.e2e_ms < E2E_BUDGET_MS
        result = json.loads(report.to_json())
        workers = s.get("workers")
        if workers:
            tp = throughput(cfg, s.get("sessions", 8 * workers), workers)
            result["throughput"] = tp
            ok = ok and tp["accepted"] == tp["sessions"]
        return ok, result, None
    raise ConfigInvalid(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        s = _settings(args)
        cfg = _config(s)
        if args.command == "attack" and s.get("type") not in ATTACKS:
            raise ConfigInvalid(f"attack type must be one of {', '.join(ATTACKS)}")
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    ok, result, world = _run(args.command, s, cfg)
    result["ok"] = ok
    if not (args.command == "bench" and s.get("output") == "csv"):
        _emit(result, s.get("output", "json"))
    if world is not None and s.get("transcript-out"):
        Path(s["transcript-out"]).write_text(world.transcript.hexdump())
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
