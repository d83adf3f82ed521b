"""Discrete-event simulation of the closed haulage cycle.

Customers travel a cycle of single-server FCFS stations and infinite-server
delays.  Service times are normal, truncated below at zero.  Optionally the
first node suffers breakdowns: a service ``S`` is extended by a repair
``Y ~ Exp(beta)`` whenever an ``X ~ Exp(alpha)`` up-time ends before ``S``.
The server stays occupied during the repair.

On a cycle, a customer's departure from an FCFS station is known the moment
it arrives there (``max(arrival, server free) + service``), and an
infinite-server leg is just a delay.  So the only events that need global
time ordering are arrivals at single-server stations (and at node 1, which
is always an event node); delay legs are advanced inline.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidConfig
from .moments import DisturbanceSpec
from .netmodel import NetworkSpec

__all__ = ["SimConfig", "SimEstimate", "simulate", "sweep"]

_BLOCK = 1 << 15


@dataclass(frozen=True)
class SimConfig:
    spec: NetworkSpec
    disturbance: DisturbanceSpec | None = None
    horizon: float = 1_000_000.0
    warmup: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.horizon > self.warmup >= 0):
            raise InvalidConfig(f"need horizon > warmup >= 0, got {self.horizon}, {self.warmup}")
        if not self.spec.is_cyclic:
            raise InvalidConfig("simulator supports cyclic routing only")


@dataclass
class SimEstimate:
    K: int
    idle1: float
    lambda_node: np.ndarray
    mean_queue: np.ndarray
    mean_sojourn: np.ndarray  # over visits completed inside the window
    mean_service1: float  # node-1 occupation (incl. repairs) per completed service
    departures: np.ndarray
    arrivals: np.ndarray
    neg_sample_count: int
    draw_count: int
    breakdowns: int
    event_count: int
    extra: dict = field(default_factory=dict)


def _draws(rng, kind, a, b=0.0):
    """Endless iterator over block-generated variates."""
    if kind == "normal":
        blocks = iter(lambda: rng.normal(a, b, _BLOCK).tolist(), None)
    else:
        blocks = iter(lambda: rng.exponential(a, _BLOCK).tolist(), None)
    return itertools.chain.from_iterable(blocks).__next__


def simulate(config: SimConfig) -> SimEstimate:
    spec = config.spec
    J, K = spec.J, spec.population
    H, W0 = float(config.horizon), float(config.warmup)
    span = H - W0
    means = spec.means.tolist()
    sds = np.sqrt(spec.variances).tolist()
    single = spec.single.tolist()

    children = np.random.SeedSequence(config.seed).spawn(J + 2)
    draw = [_draws(np.random.default_rng(children[j]), "normal", means[j], sds[j])
            for j in range(J)]
    dist = config.disturbance
    if dist is not None:
        draw_up = _draws(np.random.default_rng(children[J]), "exp", dist.mean_uptime)
        draw_rep = _draws(np.random.default_rng(children[J + 1]), "exp", dist.mean_repair)
    disturbed = dist is not None

    event_node = [j == 0 or single[j] for j in range(J)]
    nxt = [(j + 1) % J for j in range(J)]
    free = [0.0] * J
    # visits lying entirely in [W0, H): the common case
    inner_time = [0.0] * J
    inner_n = [0] * J
    # visits touching a window boundary
    edge_area = [0.0] * J
    edge_deps = [0] * J
    edge_arrs = [0] * J
    edge_n = [0] * J
    busy1 = 0.0
    svc1_inner = 0.0
    neg = breakdowns = events = 0

    heap = [(0.0, i, 0) for i in range(K)]
    seq = K
    pop, push = heapq.heappop, heapq.heappush

    while heap:
        t, _, j = pop(heap)
        if t >= H:
            break
        events += 1
        while True:
            s = draw[j]()
            if s < 0.0:
                s = 0.0
                neg += 1
            if single[j]:
                if j == 0 and disturbed and draw_up() < s:
                    s += draw_rep()
                    breakdowns += 1
                f = free[j]
                start = f if f > t else t
                d = free[j] = start + s
            else:
                start = t
                d = t + s
            if t >= W0 and d < H:
                inner_time[j] += d - t
                inner_n[j] += 1
                if j == 0:
                    busy1 += s
                    svc1_inner += s
            else:
                edge_n[j] += 1
                lo = t if t > W0 else W0
                hi = d if d < H else H
                if hi > lo:
                    edge_area[j] += hi - lo
                if W0 <= d < H:
                    edge_deps[j] += 1
                if W0 <= t < H:
                    edge_arrs[j] += 1
                if j == 0:
                    lo = start if start > W0 else W0
                    if hi > lo:
                        busy1 += hi - lo
            j = nxt[j]
            t = d
            if event_node[j] or t >= H:
                break
        if t < H:
            seq += 1
            push(heap, (t, seq, j))

    inner_n_arr = np.array(inner_n)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_soj = np.where(inner_n_arr > 0, np.array(inner_time) / inner_n_arr, np.nan)
    deps = inner_n_arr + np.array(edge_deps)
    arrs = inner_n_arr + np.array(edge_arrs)
    if W0 == 0.0:
        # the K initial placements at node 1 are not routed arrivals
        arrs[0] -= K
    return SimEstimate(
        K=K,
        idle1=1.0 - busy1 / span,
        lambda_node=deps / span,
        mean_queue=(np.array(inner_time) + np.array(edge_area)) / span,
        mean_sojourn=mean_soj,
        mean_service1=svc1_inner / inner_n[0] if inner_n[0] else float("nan"),
        departures=deps,
        arrivals=arrs,  # arrivals[(j+1) % J] == departures[j]
        neg_sample_count=neg,
        draw_count=int(inner_n_arr.sum() + sum(edge_n)),
        breakdowns=breakdowns,
        event_count=events,
    )


def sweep(config: SimConfig, kmin: int, kmax: int) -> list[SimEstimate]:
    """One independent run per population; run K uses seed ``seed ^ K``."""
    if kmin < 1 or kmax < kmin:
        raise InvalidConfig(f"bad K range [{kmin}, {kmax}]")
    out = []
    for K in range(kmin, kmax + 1):
        cfg = replace(config, spec=config.spec.with_population(K), seed=config.seed ^ K)
        out.append(simulate(cfg))
    return out
