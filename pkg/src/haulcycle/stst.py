"""Special-purpose shovel heuristic on the two-stage repairman reduction.

The cycle is collapsed to the shovel (single server) plus one infinite-server
"backcycle" whose duration is the sum of all other legs.  For a tagged truck
leaving the shovel, ``W`` is its backcycle time minus the busy and idle
periods the shovel spends on the other ``K - 1`` trucks.  ``W`` is taken to
be normal with variance ``var T + (K - 1) var S``; its mean solves a scalar
fixed point, and ``E max(0, W)`` is the mean shovel idle period.

``stst_m`` corrects the undisturbed result for long breakdowns by the share of
time the shovel is up, accounting for breakdowns striking only busy periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateVariance, NoBracket
from .moments import (
    DisturbanceSpec,
    backcycle_moments,
    breakdown_probability,
    std_normal_cdf,
    std_normal_pdf,
)
from .netmodel import KMetrics, NetworkSpec, PerfReport, make_metrics

__all__ = [
    "FixedPointResult",
    "StStReport",
    "expected_idle",
    "fixed_point_residual",
    "solve_fixed_point",
    "stst",
    "stst_m",
    "psi_factor",
    "naive_uptime_factor",
    "stst_report",
    "stst_m_report",
]


@dataclass(frozen=True)
class FixedPointResult:
    muW: float
    sigmaW: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class StStReport:
    idle1: float
    lambda1: float
    expected_idle: float
    fixed_point: FixedPointResult


def expected_idle(muW: float, sigmaW: float) -> float:
    """``E max(0, W)`` for ``W ~ N(muW, sigmaW^2)``."""
    if sigmaW <= 0:
        raise ValueError("sigmaW must be > 0")
    z = muW / sigmaW
    return muW * std_normal_cdf(z) + sigmaW * std_normal_pdf(z)


def fixed_point_residual(m, ES, ET, sigmaW, K):
    return ET - (K - 1) * (ES + expected_idle(m, sigmaW)) - m


def solve_fixed_point(ES: float, varS: float, ET: float, varT: float, K: int,
                      tol: float = 1e-10, max_doublings: int = 200) -> FixedPointResult:
    """Root of ``g(m) = ET - (K-1)(ES + i(m)) - m`` by bracketed bisection.

    ``g`` is strictly decreasing so the root is unique.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if ES <= 0:
        raise ValueError("ES must be > 0")
    sigma2 = varT + (K - 1) * varS
    if sigma2 <= 0:
        raise DegenerateVariance("sigma_W = 0; use the deterministic flow model")
    sigmaW = math.sqrt(sigma2)
    if K == 1:
        return FixedPointResult(ET, sigmaW, 0.0, 0)

    def g(m):
        return fixed_point_residual(m, ES, ET, sigmaW, K)

    hi = ET
    width = 10.0 * (ET + K * sigmaW)
    lo = ET - (K - 1) * ES - width
    g_lo = g(lo)
    doublings = 0
    while g_lo <= 0:
        if doublings >= max_doublings:
            raise NoBracket(f"no sign change below {lo}")
        width *= 2.0
        lo = ET - (K - 1) * ES - width
        g_lo = g(lo)
        doublings += 1

    it = 0
    mid, g_mid = hi, g(hi)
    while abs(g_mid) >= tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        g_mid = g(mid)
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
        it += 1
    return FixedPointResult(mid, sigmaW, g_mid, it)


def _two_stage(spec: NetworkSpec):
    if not spec.is_cyclic or not spec.nodes[0].is_single:
        raise ValueError("ST&ST needs a cyclic network whose first node is a single server")
    shovel = spec.nodes[0].service
    back = backcycle_moments(n.service for n in spec.nodes[1:])
    return shovel, back


def stst(spec: NetworkSpec) -> StStReport:
    """Idle probability and throughput of the shovel for ``spec.population`` trucks."""
    shovel, back = _two_stage(spec)
    K = spec.population
    ES = shovel.mean
    fp = solve_fixed_point(ES, shovel.variance, back.mean, back.variance, K)
    ei = expected_idle(fp.muW, fp.sigmaW)
    idle = ei / (ei + ES)
    lam1 = (1.0 - idle) / ES
    return StStReport(idle, lam1, ei, fp)


def psi_factor(lambda1: float, p: float, beta: float) -> float:
    """Share of time the shovel is up in the breakdown regeneration cycle.

    Between breakdowns the shovel completes on average ``1/p`` services,
    spaced ``1/lambda1`` apart; then a repair of mean ``1/beta`` follows.
    """
    if p <= 0 or lambda1 <= 0:
        return 1.0
    # up / (up + 1/beta) with up = 1 / (lambda1 p), written without the reciprocal
    return 1.0 / (1.0 + lambda1 * p / beta)


def naive_uptime_factor(dist: DisturbanceSpec) -> float:
    """Plain up-time ratio, ignoring that breakdowns only strike busy periods."""
    return dist.mean_uptime / (dist.mean_uptime + dist.mean_repair)


def stst_m(spec: NetworkSpec, dist: DisturbanceSpec) -> float:
    """Idle probability under long breakdowns.

    ``spec`` carries the undisturbed loading-time moments; the result is the
    undisturbed ST&ST idle probability scaled by :func:`psi_factor`.
    """
    base = stst(spec)
    p = breakdown_probability(spec.nodes[0].service, dist.alpha)
    return base.idle1 * psi_factor(base.lambda1, p, dist.beta)


def stst_report(spec: NetworkSpec, ks) -> PerfReport:
    rep = PerfReport("stst")
    for K in ks:
        sk = spec.with_population(K)
        r = stst(sk)
        # stst works on the two-stage model; node throughputs of the cycle all equal lambda1
        m = make_metrics(sk, r.lambda1 / sk.eta[0])
        rep.per_k[K] = m
    return rep


def stst_m_report(spec: NetworkSpec, dist: DisturbanceSpec, ks) -> PerfReport:
    rep = PerfReport("stst-m")
    shovel = spec.nodes[0].service
    p = breakdown_probability(shovel, dist.alpha)
    for K in ks:
        sk = spec.with_population(K)
        base = stst(sk)
        psi = psi_factor(base.lambda1, p, dist.beta)
        idle = base.idle1 * psi
        notes = () if base.lambda1 > 0 else ("zero throughput: psi set to 1",)
        # throughput implied for the disturbed shovel is not defined by the
        # correction; report the undisturbed one scaled by the up-time share
        lam1 = base.lambda1 * psi
        rep.per_k[K] = KMetrics(idle, lam1 / sk.eta[0], sk.eta * (lam1 / sk.eta[0]), notes=notes)
    rep.info = {"breakdown_probability": p}
    return rep
