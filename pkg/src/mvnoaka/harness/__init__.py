from .attacks import FakeGnbVerdict, ReplayVerdict, attack_fake_gnb, attack_replay
from .bench import CSV_HEADER, BenchReport, bench, throughput
from .config import load_config
from .linkability import LinkabilityReport, experiment_linkability
from .network import (
    AdversaryScript,
    Deliver,
    Drop,
    Envelope,
    Inject,
    LogicalClock,
    LoopbackLink,
    Match,
    Modify,
    Redirect,
    Replay,
)
from .scenario import ConfigInvalid, RunResult, ScenarioConfig, World, run_scenario
from .suite import merged_coverage, scenario_suite
from .transcript import Event, Transcript

__all__ = [
    "AdversaryScript",
    "BenchReport",
    "CSV_HEADER",
    "ConfigInvalid",
    "Deliver",
    "Drop",
    "Envelope",
    "Event",
    "FakeGnbVerdict",
    "Inject",
    "LinkabilityReport",
    "LogicalClock",
    "LoopbackLink",
    "Match",
    "Modify",
    "Redirect",
    "Replay",
    "ReplayVerdict",
    "RunResult",
    "ScenarioConfig",
    "Transcript",
    "World",
    "attack_fake_gnb",
    "attack_replay",
    "bench",
    "experiment_linkability",
    "load_config",
    "merged_coverage",
    "run_scenario",
    "scenario_suite",
    "throughput",
]
