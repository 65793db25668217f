"""Uplink cell-free massive MIMO resilience simulator.

Library for Monte-Carlo evaluation of user-centric cell-free networks
under probabilistic access-point hardware failures, comparing
failure-aware AP selection against failure-agnostic clustering and an
all-APs benchmark.
"""

__version__ = "0.1.0"

from .channel import ChannelRealization, realize_block, sample_channel
from .config import ConfigError, ExperimentConfig, load_config, preset
from .estimation import (
    EstimationResult,
    PilotAssignment,
    SystemParams,
    assign_pilots,
    estimate_block,
)
from .geometry import NetworkConfig, NetworkSnapshot, build_snapshot
from .harness import ResultRow, ResultTable, run_experiment, write_results
from .metrics import AggregateResult, aggregate, empirical_cdf
from .selection import (
    ClusterAssignment,
    FailureRealization,
    Scheme,
    assign_clusters,
    sample_failures,
    scale_failure_probs,
    select_cluster,
    select_master,
    surviving_cluster,
)
from .uplink import CombinerSet, RateReport, evaluate_rates

__all__ = [
    "AggregateResult",
    "ChannelRealization",
    "ClusterAssignment",
    "CombinerSet",
    "ConfigError",
    "EstimationResult",
    "ExperimentConfig",
    "FailureRealization",
    "NetworkConfig",
    "NetworkSnapshot",
    "PilotAssignment",
    "RateReport",
    "ResultRow",
    "ResultTable",
    "Scheme",
    "SystemParams",
    "aggregate",
    "assign_clusters",
    "assign_pilots",
    "build_snapshot",
    "empirical_cdf",
    "estimate_block",
    "evaluate_rates",
    "load_config",
    "preset",
    "realize_block",
    "run_experiment",
    "sample_channel",
    "sample_failures",
    "scale_failure_probs",
    "select_cluster",
    "select_master",
    "surviving_cluster",
    "write_results",
]
