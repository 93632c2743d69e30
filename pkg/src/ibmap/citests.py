"""Conditional independence tests and a memoizing cache.

Every backend is a callable ``backend(triplet) -> Judgment`` exposing the
number of variables as ``backend.n``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaincc, gammaln

from ibmap.dataset import Dataset, _check_triplet, slice_counts
from ibmap.graph import Structure, Triplet

EPS = 1e-12


def clamp(p: float) -> float:
    return min(1.0 - EPS, max(EPS, float(p)))


@dataclass(frozen=True)
class Judgment:
    triplet: Triplet
    posterior_independent: float
    decision: bool  # True = independent
    reliable: bool = True
    cost_units: int = 0

    def prob(self, independent: bool) -> float:
        """Posterior of the asserted value."""
        return self.posterior_independent if independent else 1.0 - self.posterior_independent

    def neg_log(self, independent: bool) -> float:
        return -math.log(self.prob(independent))


def _log_dirichlet_multinomial(counts: np.ndarray, alpha: float) -> np.ndarray:
    """Log marginal likelihood of a count sequence under a symmetric Dirichlet.

    ``counts`` has shape (k, cells); one value per row.
    """
    cells = counts.shape[1]
    a0 = alpha * cells
    total = counts.sum(axis=1)
    return (
        gammaln(a0)
        - gammaln(a0 + total)
        + (gammaln(alpha + counts) - gammaln(alpha)).sum(axis=1)
    )


def bayesian_log_evidence(counts: np.ndarray, alpha: float = 1.0) -> tuple[float, float]:
    """(log P(D | independent), log P(D | dependent)) summed over z-slices."""
    k, r, c = counts.shape
    if k == 0:
        return 0.0, 0.0
    joint = counts.reshape(k, r * c)
    dep = _log_dirichlet_multinomial(joint, alpha).sum()
    ind = (
        _log_dirichlet_multinomial(counts.sum(axis=2), alpha).sum()
        + _log_dirichlet_multinomial(counts.sum(axis=1), alpha).sum()
    )
    return float(ind), float(dep)


def bayesian_posterior(d: Dataset, t: Triplet, alpha: float = 1.0, prior: float = 0.5) -> Judgment:
    _check_triplet(d, t)
    counts = slice_counts(d, t)
    log_ind, log_dep = bayesian_log_evidence(counts, alpha)
    logit = log_ind - log_dep + math.log(prior) - math.log1p(-prior)
    p = clamp(expit(logit))
    return Judgment(t, p, p >= 0.5, True, d.N * len(t))


def chi_square_statistic(counts: np.ndarray) -> tuple[float, int, int, int]:
    """Pearson statistic pooled over slices.

    Returns (statistic, dof, small_cells, cells) where rows and columns with a
    zero margin are dropped slice by slice.
    """
    stat = 0.0
    dof = 0
    small = 0
    cells = 0
    for sl in counts:
        sl = sl[sl.sum(axis=1) > 0][:, sl.sum(axis=0) > 0]
        r, c = sl.shape
        if r == 0 or c == 0:
            continue
        total = sl.sum()
        expected = np.outer(sl.sum(axis=1), sl.sum(axis=0)) / total
        cells += r * c
        small += int((expected < 5).sum())
        if r < 2 or c < 2:
            continue
        stat += float(((sl - expected) ** 2 / expected).sum())
        dof += (r - 1) * (c - 1)
    return stat, dof, small, cells


def chi_square(d: Dataset, t: Triplet, alpha: float = 0.05) -> Judgment:
    _check_triplet(d, t)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    stat, dof, small, cells = chi_square_statistic(slice_counts(d, t))
    cost = d.N * len(t)
    if dof == 0:
        return Judgment(t, clamp(1.0), True, False, cost)
    pval = float(gammaincc(dof / 2.0, stat / 2.0))
    reliable = not (cells and small / cells > 0.2)
    return Judgment(t, clamp(pval), pval >= alpha, reliable, cost)


def oracle_test(gstar: Structure, t: Triplet, p_hi: float = 0.99) -> Judgment:
    if not 0.5 < p_hi <= 1 - EPS:
        raise ValueError("p_hi must lie in (0.5, 1 - 1e-12]")
    sep = gstar.separated(t.x, t.y, t.z)
    return Judgment(t, clamp(p_hi if sep else 1.0 - p_hi), sep, True, 0)


class BayesianTest:
    name = "bayes"

    def __init__(self, data: Dataset, alpha: float = 1.0, prior: float = 0.5, threshold: float = 0.5):
        self.data = data
        self.n = data.n
        self.alpha = alpha
        self.prior = prior
        self.threshold = threshold

    def __call__(self, t: Triplet) -> Judgment:
        j = bayesian_posterior(self.data, t, self.alpha, self.prior)
        if self.threshold != 0.5:
            j = Judgment(t, j.posterior_independent, j.posterior_independent >= self.threshold,
                         j.reliable, j.cost_units)
        return j


class ChiSquareTest:
    name = "chi2"

    def __init__(self, data: Dataset, alpha: float = 0.05):
        self.data = data
        self.n = data.n
        self.alpha = alpha

    def __call__(self, t: Triplet) -> Judgment:
        return chi_square(self.data, t, self.alpha)


class OracleTest:
    """Answers queries by vertex separation on a known structure."""

    name = "oracle"

    def __init__(self, gstar: Structure, p_hi: float = 0.99):
        self.gstar = gstar
        self.n = gstar.n
        self.p_hi = p_hi

    def __call__(self, t: Triplet) -> Judgment:
        return oracle_test(self.gstar, t, self.p_hi)


class TestCache:
    """Canonical-triplet memo of judgments from one backend."""

    __test__ = False  # not a pytest class

    def __init__(self):
        self._store: dict[Triplet, Judgment] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self.cost_units = 0

    def __len__(self) -> int:
        return len(self._store)

    def __contains__(self, t: Triplet) -> bool:
        return t in self._store

    def get(self, t: Triplet) -> Judgment | None:
        return self._store.get(t)

    def stats(self) -> dict:
        lookups = self.hits + self.misses
        return {
            "tests": self.misses,
            "hits": self.hits,
            "hit_rate": self.hits / lookups if lookups else 0.0,
            "cost_units": self.cost_units,
        }


def cached(backend, cache: TestCache, t: Triplet) -> Judgment:
    j = cache._store.get(t)
    if j is not None:
        with cache._lock:
            cache.hits += 1
        return j
    j = backend(t)
    with cache._lock:
        prev = cache._store.get(t)
        if prev is not None:
            cache.hits += 1
            return prev
        cache._store[t] = j
        cache.misses += 1
        cache.cost_units += j.cost_units
    return j


class CachedTest:
    """A backend bound to a cache; calls go through :func:`cached`."""

    __test__ = False

    def __init__(self, backend, cache: TestCache | None = None):
        self.backend = backend
        self.cache = cache if cache is not None else TestCache()
        self.n = backend.n

    def __call__(self, t: Triplet) -> Judgment:
        return cached(self.backend, self.cache, t)


def make_backend(kind: str, data: Dataset | None = None, truth: Structure | None = None,
                 alpha: float = 0.05, p_hi: float = 0.99, threshold: float = 0.5):
    if kind == "bayes":
        return BayesianTest(data, threshold=threshold)
    if kind == "chi2":
        return ChiSquareTest(data, alpha)
    if kind == "oracle":
        if truth is None:
            raise ValueError("oracle backend needs a ground-truth structure")
        return OracleTest(truth, p_hi)
    raise ValueError(f"unknown test backend {kind!r}")
