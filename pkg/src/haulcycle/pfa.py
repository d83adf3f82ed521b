"""General-purpose closed-network algorithms.

``gn_exact`` enumerates the Gordon-Newell product-form distribution and
serves as the oracle for the exponential case.  ``mva`` is exact for that
case; ``gmva``, ``esum`` and ``ebott`` are the heuristic extensions for
non-exponential single servers that use the squared coefficient of
variation of the service time.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import Nonconvergence, StateSpaceTooLarge
from .netmodel import (
    KMetrics,
    NetworkSpec,
    PerfReport,
    exact_single_customer_idle,
    make_metrics,
)

__all__ = [
    "MvaTrace",
    "gn_states",
    "gn_exact",
    "mva",
    "gmva",
    "f_sum",
    "f_esum",
    "h_sum",
    "h_esum",
    "sum_method",
    "esum",
    "bott",
    "ebott",
    "find_bottleneck",
]

MAX_STATES = 10**6
DEFAULT_EPS = 1e-9
MAX_ITER = 10**5


# -- exact product form -----------------------------------------------------

def gn_states(J: int, K: int) -> np.ndarray:
    """All occupancy vectors of ``K`` customers over ``J`` nodes (lexicographic)."""
    n_states = math.comb(K + J - 1, J - 1)
    if n_states > MAX_STATES:
        raise StateSpaceTooLarge(f"{n_states} states for J={J}, K={K}")
    out = np.empty((n_states, J), dtype=np.int64)
    # stars and bars: bar positions among K + J - 1 slots
    for row, bars in enumerate(itertools.combinations(range(K + J - 1), J - 1)):
        prev = -1
        for j, b in enumerate(bars):
            out[row, j] = b - prev - 1
            prev = b
        out[row, J - 1] = K + J - 2 - prev
    return out


def gn_exact(spec: NetworkSpec) -> PerfReport:
    """Exact marginals of the exponential product-form network with ``spec.population`` customers.

    Only the means are used.  Weights are accumulated in log space, so
    ``G(J, K)`` never overflows.
    """
    K = spec.population
    states = gn_states(spec.J, K)
    eta, m = spec.eta, spec.means
    single = spec.single
    logw = states @ np.log(eta * m)
    # infinite server: rate l * mu at occupancy l, i.e. an extra 1 / n! factor
    logw -= gammaln(states[:, ~single] + 1).sum(axis=1)
    logG = logsumexp(logw)
    prob = np.exp(logw - logG)

    mean_queue = prob @ states
    busy = prob @ (states > 0)
    lam_node = np.where(single, busy / m, mean_queue / m)
    lam = float(lam_node[0] / eta[0])
    idle = float(1.0 - busy[0])
    rep = PerfReport("gn-exact")
    rep.per_k[K] = KMetrics(idle, lam, lam_node, mean_queue, mean_queue / lam_node)
    rep.info = {"log_G": float(logG), "n_states": len(states)}
    return rep


# -- mean value analysis ----------------------------------------------------

@dataclass(frozen=True)
class MvaTrace:
    """``lam[k-1]``, ``X[k-1, j]``, ``W[k-1, j]`` for populations k = 1..K."""

    algorithm: str
    spec: NetworkSpec
    lam: np.ndarray
    X: np.ndarray
    W: np.ndarray

    def report(self) -> PerfReport:
        rep = PerfReport(self.algorithm)
        for k in range(1, len(self.lam) + 1):
            sk = self.spec.with_population(k)
            rep.per_k[k] = make_metrics(sk, float(self.lam[k - 1]),
                                        self.X[k - 1].copy(), self.W[k - 1].copy())
        return rep


def _mva(spec: NetworkSpec, residual: np.ndarray, name: str) -> MvaTrace:
    K, J = spec.population, spec.J
    m, eta, single = spec.means, spec.eta, spec.single
    lam = np.empty(K)
    X = np.empty((K, J))
    W = np.empty((K, J))
    x = np.zeros(J)
    for k in range(1, K + 1):
        w = np.where(single, m * (residual + x), m)
        lk = k / np.dot(eta, w)
        x = eta * lk * w
        lam[k - 1], X[k - 1], W[k - 1] = lk, x, w
    return MvaTrace(name, spec, lam, X, W)


def mva(spec: NetworkSpec) -> MvaTrace:
    """Exact MVA recursion over populations 1..K."""
    return _mva(spec, np.ones(spec.J), "mva")


def gmva(spec: NetworkSpec) -> MvaTrace:
    """MVA with the residual-service correction ``(1 + C^2) / 2`` at single servers."""
    return _mva(spec, (1.0 + spec.scv) / 2.0, "gmva")


# -- summation method -------------------------------------------------------

def f_sum(rho, K):
    """Mean queue at an exponential single server as a function of its utilization."""
    return rho / (1.0 - (K - 1) / K * rho)


def h_sum(x, K):
    return x / (1.0 + (K - 1) / K * x)


def f_esum(rho, a, K):
    """Mean queue at a general single server; ``a = (1 + C^2) / 2``, needs K >= 2."""
    b = (K - 1 - a) / (K - 1)
    return rho + rho**2 * a / (1.0 - b * rho)


def h_esum(x, a, K):
    """Inverse of :func:`f_esum` in ``rho`` (the positive quadratic root)."""
    b = (K - 1 - a) / (K - 1)
    d = a - b
    if abs(d) < 1e-12:
        # f reduces to rho / (1 - b rho)
        return x / (1.0 + b * x)
    lin = 1.0 + b * x
    return (-lin + math.sqrt(lin * lin + 4.0 * x * d)) / (2.0 * d)


def _node_fill(spec: NetworkSpec, K: int, extended: bool):
    m, single = spec.means, spec.single
    a = (1.0 + spec.scv) / 2.0

    def fill(lam_node):
        rho = lam_node * m
        # the single-server formula is evaluated on every entry, infinite ones discarded
        with np.errstate(divide="ignore", invalid="ignore"):
            fs = f_esum(rho, a, K) if extended else f_sum(rho, K)
        return np.where(single, fs, rho)

    return fill


def _k1_report(spec: NetworkSpec, name: str) -> PerfReport:
    # b_i = (K-1-a_i)/(K-1) is undefined at K = 1; the exact value is known
    w = spec.eta * spec.means
    lam = 1.0 / w.sum()
    rep = PerfReport(name)
    rep.per_k[1] = make_metrics(spec, lam, spec.eta * lam * spec.means, spec.means.copy(),
                                notes=("K=1: exact single-customer value",))
    assert abs(rep.per_k[1].idle1 - exact_single_customer_idle(spec)) < 1e-12
    return rep


def _capacity(spec: NetworkSpec, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Server counts ``s_i`` and throughput caps ``mu_i s_i / eta_i``."""
    s = np.where(spec.single, 1.0, float(K))
    return s, s / spec.means / spec.eta


def _summation(spec: NetworkSpec, eps: float, extended: bool, name: str) -> PerfReport:
    K = spec.population
    if extended and K == 1:
        return _k1_report(spec, name)
    fill = _node_fill(spec, K, extended)
    eta = spec.eta
    _, cap = _capacity(spec, K)
    lo, hi = 0.0, float(cap.min())
    for it in range(1, MAX_ITER + 1):
        lam = 0.5 * (lo + hi)
        g = fill(lam * eta).sum()
        if abs(g - K) <= eps:
            break
        if g > K + eps:
            hi = lam
        else:
            lo = lam
    else:
        raise Nonconvergence(f"{name}: |g - K| = {abs(g - K):.3g} after {MAX_ITER} iterations")
    lam_node = lam * eta
    X = fill(lam_node)
    rep = PerfReport(name)
    rep.per_k[K] = make_metrics(spec, lam, X, X / lam_node)
    rep.info = {"iterations": it, "g": float(g)}
    return rep


def sum_method(spec: NetworkSpec, eps: float = DEFAULT_EPS) -> PerfReport:
    """Summation method: bisection on the total throughput until ``sum_i f_i = K``."""
    return _summation(spec, eps, False, "sum")


def esum(spec: NetworkSpec, eps: float = DEFAULT_EPS) -> PerfReport:
    return _summation(spec, eps, True, "esum")


# -- bottleneck approximation -----------------------------------------------

def find_bottleneck(spec: NetworkSpec, K: int | None = None) -> tuple[int, list[int]]:
    """Index of the node minimizing ``mu_i s_i / eta_i`` and the full set of ties.

    Ties (relative 1e-12) go to the smallest index.
    """
    K = spec.population if K is None else K
    _, cap = _capacity(spec, K)
    best = cap.min()
    tied = [int(i) for i in np.flatnonzero(np.abs(cap - best) <= 1e-12 * best)]
    return tied[0], tied


def _bottleneck(spec: NetworkSpec, eps: float, extended: bool, name: str) -> PerfReport:
    K = spec.population
    if extended and K == 1:
        return _k1_report(spec, name)
    fill = _node_fill(spec, K, extended)
    eta, m = spec.eta, spec.means
    s, cap = _capacity(spec, K)
    bi, tied = find_bottleneck(spec, K)
    notes = ()
    if len(tied) > 1:
        msg = f"{name}: bottleneck tie between nodes {[t + 1 for t in tied]}, using node {bi + 1}"
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        notes = (msg,)
    a_b = (1.0 + spec.scv[bi]) / 2.0

    def invert(x):
        if not spec.single[bi]:
            return x / K
        return h_esum(x, a_b, K) if extended else h_sum(x, K)

    lam = float(cap[bi])
    for it in range(1, MAX_ITER + 1):
        X = fill(lam * eta)
        g = X.sum()
        if abs(K / g - 1.0) <= eps:
            break
        rho_b = invert(X[bi] * K / g)
        lam = rho_b * s[bi] / m[bi] / eta[bi]
    else:
        raise Nonconvergence(f"{name}: |K/g - 1| = {abs(K / g - 1):.3g} after {MAX_ITER} iterations")
    X = X * abs(K / g)
    lam_node = lam * eta
    rep = PerfReport(name)
    rep.per_k[K] = make_metrics(spec, lam, X, X / lam_node, notes=notes)
    rep.info = {"iterations": it, "bottleneck": bi, "tied": tied}
    return rep


def bott(spec: NetworkSpec, eps: float = DEFAULT_EPS) -> PerfReport:
    """Bottleneck approximation: fixed-point iteration on the bottleneck's utilization."""
    return _bottleneck(spec, eps, False, "bott")


def ebott(spec: NetworkSpec, eps: float = DEFAULT_EPS) -> PerfReport:
    return _bottleneck(spec, eps, True, "ebott")
