"""Deterministic flow model of the four-node cycle.

With every duration fixed at its mean, node 1 either ends up never waiting
(``K m1 <= sum m``) or ends up permanently saturated with a constant wait
``K m1 - sum m``.  :func:`flow_closed_form` gives the long-run values
directly; :func:`flow_trajectory` evolves the event recursion from the
all-at-node-1 start and measures them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AssumptionViolated

__all__ = [
    "FlowReport",
    "Trajectory",
    "flow_closed_form",
    "flow_trajectory",
    "regime",
]


@dataclass(frozen=True)
class FlowReport:
    idle1: float
    lambda1: float
    vbar1: float


@dataclass(frozen=True)
class Trajectory:
    """Per-arrival quantities at node 1 (index n = 0..N-1) plus node-3 waits."""

    gamma: np.ndarray  # arrival times at node 1
    tau: np.ndarray  # departure times from node 1
    V: np.ndarray  # waits at node 1
    A: np.ndarray  # interarrival times, A[n] = gamma[n+1] - gamma[n]
    V3: np.ndarray  # waits at node 3
    regime: str  # "no-wait" or "saturated"
    transient: int  # services treated as the initial transient
    report: FlowReport


def _check(means: Sequence[float], K: int) -> np.ndarray:
    m = np.asarray(means, dtype=float)
    if m.shape != (4,):
        raise ValueError("flow model needs exactly four mean durations")
    if np.any(m <= 0):
        raise ValueError("all means must be > 0")
    if K < 1:
        raise ValueError("K must be >= 1")
    if not m[0] > m[2]:
        raise AssumptionViolated(
            f"loading time {m[0]} must exceed unloading time {m[2]} for the flow model")
    return m


def regime(means: Sequence[float], K: int) -> str:
    """``"no-wait"`` if trucks eventually never queue at the shovel, else ``"saturated"``."""
    m = _check(means, K)
    return "no-wait" if K * m[0] <= m.sum() else "saturated"


def flow_closed_form(means: Sequence[float], K: int) -> FlowReport:
    m = _check(means, K)
    total = m.sum()
    vbar = max(0.0, K * m[0] - total)
    idle = 1.0 - K * m[0] / (total + vbar)
    idle = min(1.0, max(0.0, idle))
    return FlowReport(idle, (1.0 - idle) / m[0], vbar)


def flow_trajectory(means: Sequence[float], K: int, cycles: int | None = None,
                    tol: float = 1e-9) -> Trajectory:
    """Evolve the deterministic cycle with all ``K`` trucks queued at node 1 at t = 0.

    Every leg preserves the truck order, so the n-th node-1 service belongs
    to truck ``n mod K`` and the cycle reduces to a recursion over n.
    Long-run statistics are measured over whole multiples of K services after
    a transient of ``max(3K, 50)`` services.
    """
    m = _check(means, K)
    transient = max(3 * K, 50)
    window = K * max(1, cycles or 10)
    N = transient + window + K
    gamma = np.zeros(N + K)
    tau = np.empty(N)
    V = np.empty(N)
    V3 = np.empty(N)
    free1 = free3 = 0.0
    for n in range(N):
        start = max(gamma[n], free1)
        V[n] = start - gamma[n]
        tau[n] = free1 = start + m[0]
        a3 = tau[n] + m[1]
        start3 = max(a3, free3)
        V3[n] = start3 - a3
        free3 = start3 + m[2]
        gamma[n + K] = free3 + m[3]
    gamma = gamma[:N]
    A = np.diff(gamma)

    tail = V[transient:]
    reg = "no-wait" if np.all(tail <= tol) else "saturated"
    vbar = float(tail.mean()) if reg == "saturated" else 0.0
    # busy m1 per service; elapsed time between departures spanning `window` services
    elapsed = tau[transient + window] - tau[transient]
    idle = 1.0 - window * m[0] / elapsed
    idle = min(1.0, max(0.0, idle))
    rep = FlowReport(idle, (1.0 - idle) / m[0], vbar)
    return Trajectory(gamma, tau, V, A, V3, reg, transient, rep)
