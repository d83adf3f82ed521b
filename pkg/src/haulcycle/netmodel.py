"""Network description, traffic equations and the throughput/idle identity.

A network is a list of nodes, each either a single-server FCFS station or an
infinite-server (delay) station, a row-stochastic routing matrix and a fixed
population ``K``.  Service times are described only through their first two
moments (minutes, minutes squared).

Visit ratios are always normalized to a probability vector.  Texts that fix
``eta_1 = 1`` instead produce the same idle probabilities and per-node
throughputs; only the "total throughput" differs by the constant factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    NonStochasticMatrix,
    PopulationNotOne,
    ReducibleMatrix,
    UtilizationExceedsOne,
)

__all__ = [
    "NodeKind",
    "MomentPair",
    "NodeSpec",
    "NetworkSpec",
    "KMetrics",
    "PerfReport",
    "cyclic_routing",
    "solve_traffic",
    "throughput_to_idle",
    "exact_single_customer_idle",
    "mining_preset",
    "TABLE1_MEANS",
    "TABLE1_CVS",
]

# Table 1 of the case study: loading, travel loaded, unloading, travel empty.
TABLE1_MEANS = (1.5, 6.0, 1.0, 4.0)
TABLE1_CVS = (0.25, 0.2, 0.1, 0.2)
TABLE1_LABELS = ("loading", "travel loaded", "unloading", "travel empty")


class NodeKind(str, enum.Enum):
    SINGLE = "single"
    INFINITE = "infinite"


@dataclass(frozen=True)
class MomentPair:
    """Mean and variance of a duration."""

    mean: float
    variance: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise ValueError(f"mean must be finite, got {self.mean}")
        if not (self.variance >= 0.0 and math.isfinite(self.variance)):
            raise ValueError(f"variance must be finite and >= 0, got {self.variance}")

    @classmethod
    def from_cv(cls, mean: float, cv: float) -> "MomentPair":
        return cls(mean, (mean * cv) ** 2)

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def scv(self) -> float:
        """Squared coefficient of variation."""
        return self.variance / self.mean**2


@dataclass(frozen=True)
class NodeSpec:
    kind: NodeKind
    service: MomentPair
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", NodeKind(self.kind))
        if not self.service.mean > 0:
            raise ValueError(f"node {self.label!r}: service mean must be > 0")

    @property
    def is_single(self) -> bool:
        return self.kind is NodeKind.SINGLE


def cyclic_routing(n: int) -> np.ndarray:
    """Routing matrix of the cycle 1 -> 2 -> ... -> n -> 1."""
    return np.roll(np.eye(n), 1, axis=1)


def _check_routing(r: np.ndarray) -> None:
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise NonStochasticMatrix(f"routing must be square, got shape {r.shape}")
    if np.any(r < 0):
        raise NonStochasticMatrix("routing has negative entries")
    rows = r.sum(axis=1)
    if np.any(np.abs(rows - 1.0) > 1e-9):
        raise NonStochasticMatrix(f"routing rows sum to {rows}, expected 1")
    # boolean transitive closure
    reach = (r > 0) | np.eye(len(r), dtype=bool)
    for _ in range(max(1, int(np.ceil(np.log2(len(r)))) + 1)):
        reach = (reach.astype(int) @ reach.astype(int)) > 0
    if not reach.all():
        raise ReducibleMatrix("routing matrix is not irreducible")


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Closed network: nodes in visiting order, routing and population K.

    ``routing`` defaults to the cyclic shift.  Instances are immutable; use
    :meth:`with_population` or :meth:`with_service` to derive variants.
    """

    nodes: tuple[NodeSpec, ...]
    population: int = 1
    routing: np.ndarray | None = None
    _eta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if not nodes:
            raise ValueError("network needs at least one node")
        if int(self.population) != self.population or self.population < 1:
            raise ValueError(f"population must be an integer >= 1, got {self.population}")
        object.__setattr__(self, "population", int(self.population))
        r = cyclic_routing(len(nodes)) if self.routing is None else np.array(self.routing, dtype=float)
        if r.shape != (len(nodes), len(nodes)):
            raise NonStochasticMatrix(f"routing shape {r.shape} does not match {len(nodes)} nodes")
        r.setflags(write=False)
        object.__setattr__(self, "routing", r)
        eta = solve_traffic(r)
        eta.setflags(write=False)
        object.__setattr__(self, "_eta", eta)

    @property
    def J(self) -> int:
        return len(self.nodes)

    @property
    def K(self) -> int:
        return self.population

    @property
    def eta(self) -> np.ndarray:
        return self._eta

    @property
    def means(self) -> np.ndarray:
        return np.array([n.service.mean for n in self.nodes])

    @property
    def variances(self) -> np.ndarray:
        return np.array([n.service.variance for n in self.nodes])

    @property
    def scv(self) -> np.ndarray:
        return self.variances / self.means**2

    @property
    def single(self) -> np.ndarray:
        return np.array([n.is_single for n in self.nodes])

    @property
    def is_cyclic(self) -> bool:
        return bool(np.array_equal(self.routing, cyclic_routing(self.J)))

    def with_population(self, K: int) -> "NetworkSpec":
        return replace(self, population=K)

    def with_service(self, index: int, service: MomentPair) -> "NetworkSpec":
        nodes = list(self.nodes)
        nodes[index] = replace(nodes[index], service=service)
        return replace(self, nodes=tuple(nodes))


def mining_preset(K: int = 1, means: Sequence[float] = TABLE1_MEANS,
                  cvs: Sequence[float] = TABLE1_CVS) -> NetworkSpec:
    """Four-node haulage cycle: shovel, travel loaded, crusher, travel empty."""
    kinds = (NodeKind.SINGLE, NodeKind.INFINITE, NodeKind.SINGLE, NodeKind.INFINITE)
    nodes = tuple(
        NodeSpec(k, MomentPair.from_cv(m, c), lab)
        for k, m, c, lab in zip(kinds, means, cvs, TABLE1_LABELS)
    )
    return NetworkSpec(nodes, population=K)


def solve_traffic(routing) -> np.ndarray:
    """Stochastic solution ``eta = eta @ r`` of the traffic equations.

    Solved densely: the transposed balance system with one equation replaced
    by the normalization row.
    """
    r = np.asarray(routing, dtype=float)
    _check_routing(r)
    n = len(r)
    A = r.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    eta = np.linalg.solve(A, b)
    # clean tiny negative round-off before renormalizing
    eta = np.clip(eta, 0.0, None)
    return eta / eta.sum()


def throughput_to_idle(lambda1: float, mean_service1: float, clip: bool = False) -> float:
    """Idle probability of a single server from its throughput: ``1 - lambda1 * E[S]``.

    Utilizations above 1 (beyond 1e-9 round-off) raise
    :class:`UtilizationExceedsOne` unless ``clip`` is set, in which case the
    result is clamped to 0.  Heuristics such as GMVA can overshoot.
    """
    if lambda1 < 0:
        raise ValueError(f"throughput must be >= 0, got {lambda1}")
    util = lambda1 * mean_service1
    if util > 1.0 + 1e-9 and not clip:
        raise UtilizationExceedsOne(f"utilization {util:.12g} exceeds 1")
    return min(1.0, max(0.0, 1.0 - util))


def exact_single_customer_idle(spec: NetworkSpec) -> float:
    """Exact idle probability of node 1 when only one customer circulates.

    The lone customer spends a fraction ``eta_1 m_1 / sum_j eta_j m_j`` of its
    time at node 1.  This holds for any service distributions.
    """
    if spec.population != 1:
        raise PopulationNotOne(f"population is {spec.population}")
    w = spec.eta * spec.means
    return float(1.0 - w[0] / w.sum())


@dataclass(frozen=True)
class KMetrics:
    """Outputs of one algorithm at one population size."""

    idle1: float
    lambda_total: float
    lambda_node: np.ndarray
    mean_queue: np.ndarray | None = None
    mean_sojourn: np.ndarray | None = None
    notes: tuple[str, ...] = ()


@dataclass
class PerfReport:
    algorithm: str
    per_k: dict[int, KMetrics] = field(default_factory=dict)
    info: Mapping[str, object] = field(default_factory=dict)

    def __getitem__(self, K: int) -> KMetrics:
        return self.per_k[K]

    def idle(self, K: int) -> float:
        return self.per_k[K].idle1

    @property
    def ks(self) -> list[int]:
        return sorted(self.per_k)


def make_metrics(spec: NetworkSpec, lam: float, mean_queue=None, mean_sojourn=None,
                 notes: Sequence[str] = (), clip: bool = True) -> KMetrics:
    """Build a :class:`KMetrics` from the total throughput of a heuristic.

    Idle is obtained through :func:`throughput_to_idle`; an overshoot above
    utilization one is clamped and recorded in ``notes``.
    """
    lam_node = spec.eta * lam
    util = lam_node[0] * spec.means[0]
    notes = tuple(notes)
    if util > 1.0 + 1e-9:
        notes += (f"utilization {util:.6f} > 1 clamped to idle 0",)
    idle = throughput_to_idle(float(lam_node[0]), float(spec.means[0]), clip=clip)
    return KMetrics(idle, float(lam), lam_node, mean_queue, mean_sojourn, notes)
