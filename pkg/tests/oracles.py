"""Independent reference computations used by the test suite.

Nothing here calls into haulcycle's closed forms: quadrature, power
iteration, brute-force Monte Carlo and a hand-rolled Markov-chain solve.
"""

from __future__ import annotations

import csv
import functools
import math
from pathlib import Path

import numpy as np
from scipy import integrate

DATA = Path(__file__).parent / "data"
SQRT2PI = math.sqrt(2.0 * math.pi)


def normal_pdf(x, mu=0.0, sd=1.0):
    return math.exp(-0.5 * ((x - mu) / sd) ** 2) / (sd * SQRT2PI)


def quad_cdf(x):
    return integrate.quad(normal_pdf, -np.inf, x, epsabs=1e-14, epsrel=1e-13)[0]


def quad_positive_part(y, sigma):
    f = lambda t: t * normal_pdf(t, y, sigma)
    return integrate.quad(f, 0.0, max(y, 0.0) + 12 * sigma, epsabs=1e-14, epsrel=1e-12)[0]


def quad_expected_max0(mu, sigma):
    f = lambda w: w * normal_pdf(w, mu, sigma)
    return integrate.quad(f, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12)[0]


def quad_breakdown(mu, sigma, alpha):
    """P(X < S), X ~ Exp(alpha), S ~ N(mu, sigma^2), integrating over s > 0."""
    f = lambda s: -math.expm1(-alpha * s) * normal_pdf(s, mu, sigma)
    return integrate.quad(f, 0.0, mu + 14 * sigma, epsabs=1e-15, epsrel=1e-12, limit=200)[0]


def quad_cross(mu, sigma, alpha):
    """E(S 1{X < S})."""
    f = lambda s: s * -math.expm1(-alpha * s) * normal_pdf(s, mu, sigma)
    return integrate.quad(f, 0.0, mu + 14 * sigma, epsabs=1e-15, epsrel=1e-12, limit=200)[0]


def power_iteration(r, tol=1e-14, max_iter=1_000_000):
    """Stationary vector of a row-stochastic matrix by damped power iteration."""
    r = np.asarray(r, dtype=float)
    n = len(r)
    lazy = 0.5 * (np.eye(n) + r)  # aperiodic, same fixed vector
    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        w = v @ lazy
        w /= w.sum()
        if np.abs(w - v).max() < tol:
            return w
        v = w
    raise RuntimeError("power iteration did not converge")


def mc_disturbed(mu, sigma, alpha, beta, n=10**7, seed=0, chunk=10**6):
    """Monte-Carlo moments of S, 1{X<S}, S 1{X<S} and S + 1{X<S} Y (S untruncated).

    Returns a dict of (mean, standard error) pairs and the variance of the
    modified time with its standard error.
    """
    rng = np.random.default_rng(seed)
    sums = np.zeros(4)  # ind, cross, mod, mod^2
    sq = np.zeros(3)  # ind^2, cross^2, mod^4 accumulators
    mod3 = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        s = rng.normal(mu, sigma, m)
        x = rng.exponential(1.0 / alpha, m)
        y = rng.exponential(1.0 / beta, m)
        ind = (x < s).astype(float)
        cr = s * ind
        mod = s + ind * y
        sums += (ind.sum(), cr.sum(), mod.sum(), (mod**2).sum())
        sq += ((ind**2).sum(), (cr**2).sum(), (mod**4).sum())
        mod3 += (mod**3).sum()
        done += m
    e = sums / n
    p, c, m1, m2 = e
    var_p = sq[0] / n - p * p
    var_c = sq[1] / n - c * c
    var_mod = m2 - m1 * m1
    # standard error of the sample variance from central moments
    m3, m4 = mod3 / n, sq[2] / n
    mu4 = m4 - 4 * m1 * m3 + 6 * m1**2 * m2 - 3 * m1**4
    return {
        "p": (p, math.sqrt(var_p / n)),
        "cross": (c, math.sqrt(var_c / n)),
        "mean": (m1, math.sqrt(var_mod / n)),
        "var": (var_mod, math.sqrt(max(mu4 - var_mod**2, 0.0) / n)),
    }


@functools.lru_cache(maxsize=None)
def moment_grid(n_points=20, seed=2024):
    """20 random (mu, cv, alpha, beta) points with their Monte-Carlo estimates."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_points):
        mu = rng.uniform(0.5, 5.0)
        cv = rng.uniform(0.05, 0.45)
        alpha = 1.0 / rng.uniform(5.0, 500.0)
        beta = 1.0 / rng.uniform(1.0, 60.0)
        sigma = mu * cv
        out.append(((mu, sigma, alpha, beta), mc_disturbed(mu, sigma, alpha, beta, seed=1000 + i)))
    return tuple(out)


def read_golden(name):
    """Rows of a checked-in published table: {label: [(value, bold), ...]}."""
    rows = {}
    with open(DATA / name, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for label, *cells in reader:
            rows[label] = [(c.rstrip("*"), c.endswith("*")) for c in cells]
    return rows
