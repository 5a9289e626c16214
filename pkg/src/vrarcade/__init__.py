"""Simulator of a multiplayer VR arcade served over 60 GHz links with edge compute.

Three service schemes are compared on identical random workloads: Baseline1
(reactive rendering only), Baseline2 (reactive plus proactive computing/caching),
and Proposed (proactive plus dual-connectivity downlink).
"""

from .capacity import pixel_rate, required_bitrate
from .config import SCHEMES, ConfigError, Scenario, load_scenario, validate_config
from .engine import (DeliveryRecord, MetricsSummary, compute_metrics, run_experiment,
                     run_replication)
from .workload import zipf_pmf

__version__ = "0.1.0"

__all__ = [
    "SCHEMES", "ConfigError", "DeliveryRecord", "MetricsSummary", "Scenario",
    "compute_metrics", "load_scenario", "pixel_rate", "required_bitrate",
    "run_experiment", "run_replication", "validate_config", "zipf_pmf", "__version__",
]
