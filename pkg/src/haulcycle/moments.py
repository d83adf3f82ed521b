"""Closed-form moment calculus for normal service times with breakdowns.

The shovel's loading time ``S ~ N(mu, sigma^2)`` is interrupted by
breakdowns arriving as a Poisson process of rate ``alpha`` while it works; a
breakdown during a service adds one ``Exp(beta)`` repair.  The modified
service time is ``S + 1{X < S} Y`` with ``X ~ Exp(alpha)``, ``Y ~ Exp(beta)``.

All closed forms treat ``S`` as an untruncated normal.  Use
:func:`negative_mass` to see how much probability that puts below zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from scipy import special

from .netmodel import MomentPair

__all__ = [
    "DisturbanceSpec",
    "ModifiedServiceMoments",
    "std_normal_cdf",
    "std_normal_pdf",
    "positive_part_mean_normal",
    "negative_mass",
    "breakdown_probability",
    "cross_moment",
    "modified_service_moments",
    "backcycle_moments",
    "TABLE2",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class DisturbanceSpec:
    """Breakdown rate ``alpha`` (per minute of work) and repair rate ``beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"alpha and beta must be > 0, got {self.alpha}, {self.beta}")

    @classmethod
    def from_means(cls, mean_uptime: float, mean_repair: float) -> "DisturbanceSpec":
        return cls(1.0 / mean_uptime, 1.0 / mean_repair)

    @property
    def mean_uptime(self) -> float:
        return 1.0 / self.alpha

    @property
    def mean_repair(self) -> float:
        return 1.0 / self.beta


# Table 2: mean up-time 300 min, mean repair 30 min.
TABLE2 = DisturbanceSpec.from_means(300.0, 30.0)


def std_normal_cdf(x: float) -> float:
    return float(special.ndtr(x))


def std_normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def positive_part_mean_normal(y: float, sigma: float) -> float:
    """``E[max(0, Z)]`` for ``Z ~ N(y, sigma^2)``."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    z = y / sigma
    return std_normal_cdf(z) * y + std_normal_pdf(z) * sigma


def negative_mass(service: MomentPair) -> float:
    """``P(S < 0)`` under the normal model; 0 for deterministic service."""
    if service.variance == 0:
        return 0.0 if service.mean >= 0 else 1.0
    return std_normal_cdf(-service.mean / service.sd)


def _tilt(mu: float, sigma: float, alpha: float) -> float:
    # E[exp(-alpha S)] factor exp(alpha^2 sigma^2 / 2 - alpha mu)
    return math.exp(0.5 * (alpha * sigma) ** 2 - alpha * mu)


def breakdown_probability(service: MomentPair, alpha: float) -> float:
    """Probability ``P(X < S)`` that a breakdown hits during one service.

    Zero variance falls back to the deterministic limit ``1 - exp(-alpha mu)``.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    mu, sigma = service.mean, service.sd
    if alpha == 0:
        return 0.0
    if sigma == 0:
        return max(0.0, -math.expm1(-alpha * mu)) if mu > 0 else 0.0
    z = mu / sigma
    # exp(.) * Phi(.) can overflow separately for large alpha*sigma; work in logs
    log_term = 0.5 * (alpha * sigma) ** 2 - alpha * mu + float(special.log_ndtr(z - alpha * sigma))
    p = std_normal_cdf(z) - math.exp(log_term)
    return min(1.0, max(0.0, p))


def _tilted_positive_part(mu: float, sigma: float, alpha: float) -> float:
    # exp(a^2 s^2/2 - a mu) * (Phi(y/s) y + phi(y/s) s), y = mu - a s^2, evaluated in logs
    y = mu - alpha * sigma**2
    z = y / sigma
    log_pref = 0.5 * (alpha * sigma) ** 2 - alpha * mu
    # Phi(z) y + phi(z) s = s * (z Phi(z) + phi(z)); the bracket is positive
    bracket = z * std_normal_cdf(z) + std_normal_pdf(z)
    if bracket <= 0 or z < -30:
        # z Phi(z) + phi(z) = phi(z)/z^2 (1 - 3/z^2 + 15/z^4 - 105/z^6 + ...) as z -> -inf
        u = 1.0 / (z * z)
        series = 1.0 - 3.0 * u + 15.0 * u**2 - 105.0 * u**3 + 945.0 * u**4
        log_bracket = -0.5 * z * z - 0.5 * math.log(2 * math.pi) + math.log(u) + math.log(series)
    else:
        log_bracket = math.log(bracket)
    return math.exp(log_pref + math.log(sigma) + log_bracket)


def cross_moment(service: MomentPair, alpha: float) -> float:
    """``E[S 1{X < S}]`` for ``S ~ N(mu, sigma^2)`` and ``X ~ Exp(alpha)``.

    Equals ``E[S+] - E[S+ exp(-alpha S)]``; the second term is the positive
    part mean of the exponentially tilted normal ``N(mu - alpha sigma^2, sigma^2)``.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    mu, sigma = service.mean, service.sd
    if alpha == 0:
        return 0.0
    if sigma == 0:
        return mu * -math.expm1(-alpha * mu) if mu > 0 else 0.0
    return positive_part_mean_normal(mu, sigma) - _tilted_positive_part(mu, sigma, alpha)


@dataclass(frozen=True)
class ModifiedServiceMoments:
    base: MomentPair
    p: float
    cross: float
    modified: MomentPair
    negative_mass: float

    @property
    def mean(self) -> float:
        return self.modified.mean

    @property
    def variance(self) -> float:
        return self.modified.variance


def modified_service_moments(service: MomentPair, dist: DisturbanceSpec,
                             variance_formula: str = "exact") -> ModifiedServiceMoments:
    """Mean and variance of ``S + 1{X < S} Y``.

    ``variance_formula`` selects the cross term of the second moment:

    ``"exact"``
        ``2 E[S 1{X<S}] / beta``, which follows from independence of ``Y``.
    ``"printed"``
        ``2 E[S 1{X<S}] * 2 / beta^2``, kept for comparison only; it does
        not reproduce the tabulated 9.122382 nor Monte Carlo.
    """
    mu, var = service.mean, service.variance
    p = breakdown_probability(service, dist.alpha)
    cm = cross_moment(service, dist.alpha)
    ey, ey2 = 1.0 / dist.beta, 2.0 / dist.beta**2
    mean = mu + p * ey
    if variance_formula == "exact":
        cross_term = 2.0 * cm * ey
    elif variance_formula == "printed":
        cross_term = 2.0 * cm * ey2
    else:
        raise ValueError(f"unknown variance_formula {variance_formula!r}")
    variance = var + cross_term + p * (ey2 - 2.0 * mu * ey - p * ey**2)
    modified = MomentPair(mean, max(0.0, variance))
    neg = negative_mass(modified)
    return ModifiedServiceMoments(service, p, cm, modified, neg)


def backcycle_moments(parts: Iterable[MomentPair]) -> MomentPair:
    """Moments of a sum of independent durations (travel + unload + return)."""
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one component")
    return MomentPair(sum(p.mean for p in parts), sum(p.variance for p in parts))
