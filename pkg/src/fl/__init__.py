"""Federated-learning exfiltration simulator."""

from .exceptions import SimConfigError
from .models import CodeSizeSampling, NodeSummary, RoundEvent, SimConfig, SimReport
from .simulator import (
    AggregationServer,
    SimNode,
    rounds_to_exfiltrate,
    run_simulation,
    run_simulation_async,
    sample_code_sizes,
)

__all__ = [
    "AggregationServer",
    "CodeSizeSampling",
    "NodeSummary",
    "RoundEvent",
    "SimConfig",
    "SimConfigError",
    "SimNode",
    "SimReport",
    "rounds_to_exfiltrate",
    "run_simulation",
    "run_simulation_async",
    "sample_code_sizes",
]
