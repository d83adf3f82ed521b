"""Shovel idle probability and throughput in a closed truck haulage cycle.

Analytic approximations (``stst``, ``pfa``, ``flow``), the breakdown moment
calculus (``moments``), a discrete-event simulator (``simcycle``) and study
orchestration (``study``) over a common network model (``netmodel``).
"""

from .errors import (
    AssumptionViolated,
    ConfigError,
    DegenerateVariance,
    HaulCycleError,
    InvalidConfig,
    NoBracket,
    Nonconvergence,
    StateSpaceTooLarge,
    UtilizationExceedsOne,
)
from .flow import flow_closed_form, flow_trajectory, regime
from .moments import (
    TABLE2,
    DisturbanceSpec,
    breakdown_probability,
    cross_moment,
    modified_service_moments,
)
from .netmodel import (
    KMetrics,
    MomentPair,
    NetworkSpec,
    NodeKind,
    NodeSpec,
    PerfReport,
    mining_preset,
    solve_traffic,
    throughput_to_idle,
)
from .pfa import bott, ebott, esum, gmva, gn_exact, mva, sum_method
from .simcycle import SimConfig, SimEstimate, simulate, sweep
from .stst import stst_m
from .study import StudyConfig, emit, load_config, run_study

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolated",
    "ConfigError",
    "DegenerateVariance",
    "HaulCycleError",
    "InvalidConfig",
    "NoBracket",
    "Nonconvergence",
    "StateSpaceTooLarge",
    "UtilizationExceedsOne",
    "flow_closed_form",
    "flow_trajectory",
    "regime",
    "TABLE2",
    "DisturbanceSpec",
    "breakdown_probability",
    "cross_moment",
    "modified_service_moments",
    "KMetrics",
    "MomentPair",
    "NetworkSpec",
    "NodeKind",
    "NodeSpec",
    "PerfReport",
    "mining_preset",
    "solve_traffic",
    "throughput_to_idle",
    "bott",
    "ebott",
    "esum",
    "gmva",
    "gn_exact",
    "mva",
    "sum_method",
    "SimConfig",
    "SimEstimate",
    "simulate",
    "sweep",
    "stst_m",
    "StudyConfig",
    "emit",
    "load_config",
    "run_study",
]
