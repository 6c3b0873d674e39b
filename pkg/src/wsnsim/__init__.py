"""Heterogeneous wireless sensor network simulator for the DEEC protocol family."""

from .engine import HAVE_COMPILED, RoundMetrics, RunSummary, run_round, run_simulation
from .model import (
    MultiLevel,
    NetworkConfig,
    NodeState,
    RadioParams,
    ThreeLevel,
    TwoLevel,
)
from .protocols import Protocol, ProtocolKind

__all__ = [
    "HAVE_COMPILED",
    "MultiLevel",
    "NetworkConfig",
    "NodeState",
    "Protocol",
    "ProtocolKind",
    "RadioParams",
    "RoundMetrics",
    "RunSummary",
    "ThreeLevel",
    "TwoLevel",
    "run_round",
    "run_simulation",
]
