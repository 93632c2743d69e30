"""Edge and independence Hamming distances, and error ratios against GSMN."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ibmap.citests import TestCache, cached
from ibmap.dataset import Dataset
from ibmap.graph import Structure, Triplet, all_triplets


@dataclass(frozen=True)
class TripletSample:
    triplets: tuple[Triplet, ...]
    per_cardinality: dict
    seed: int | None

    def __len__(self) -> int:
        return len(self.triplets)


def sample_triplets(n: int, total: int = 2000, seed=None) -> TripletSample:
    """Stratified random triplets: equal share per conditioning size 0..n-2.

    The ``total mod (n-1)`` leftover triplets go to the smallest sizes.
    """
    if n < 3:
        raise ValueError("need at least 3 variables")
    strata = n - 1
    if total < strata:
        raise ValueError(f"total must be at least n-1 = {strata}")
    base, extra = divmod(total, strata)
    rng = np.random.default_rng(seed)
    out = []
    counts = {}
    for m in range(strata):
        k = base + (1 if m < extra else 0)
        counts[m] = k
        for _ in range(k):
            pi = rng.permutation(n)
            out.append(Triplet(int(pi[0]), int(pi[1]), tuple(int(v) for v in pi[2:m + 2])))
    return TripletSample(tuple(out), counts, seed if isinstance(seed, int) else None)


def _same_n(g: Structure, other_n: int) -> None:
    if g.n != other_n:
        raise ValueError(f"size mismatch: {g.n} vs {other_n} variables")


def edge_hamming(g: Structure, gstar: Structure) -> int:
    _same_n(g, gstar.n)
    return sum(
        g.has_edge(x, y) != gstar.has_edge(x, y) for x, y in combinations(range(g.n), 2)
    )


def independence_hamming_structure(g: Structure, gstar: Structure, ts) -> float:
    _same_n(g, gstar.n)
    triplets = ts.triplets if isinstance(ts, TripletSample) else list(ts)
    if not triplets:
        raise ValueError("empty triplet sample")
    bad = sum(g.separated(t.x, t.y, t.z) != gstar.separated(t.x, t.y, t.z) for t in triplets)
    return bad / len(triplets)


def independence_hamming_data(g: Structure, d: Dataset, ts, test, cache: TestCache | None = None) -> float:
    """Disagreement between separation in ``g`` and test decisions on the full dataset ``d``."""
    _same_n(g, d.n)
    if test.n != d.n:
        raise ValueError("test backend is bound to a dataset of a different width")
    triplets = ts.triplets if isinstance(ts, TripletSample) else list(ts)
    if not triplets:
        raise ValueError("empty triplet sample")
    judge = test if cache is None else (lambda t: cached(test, cache, t))
    bad = sum(g.separated(t.x, t.y, t.z) != judge(t).decision for t in triplets)
    return bad / len(triplets)


def exhaustive_independence_hamming(g: Structure, gstar: Structure, stratified: bool = True) -> float:
    """Exact independence Hamming distance over all triplets.

    With ``stratified`` the per-cardinality disagreement rates are averaged
    with equal weight, which is the quantity :func:`sample_triplets` estimates;
    otherwise every triplet counts once.
    """
    _same_n(g, gstar.n)
    bad: Counter = Counter()
    tot: Counter = Counter()
    for t in all_triplets(g.n):
        m = len(t.z)
        tot[m] += 1
        bad[m] += g.separated(t.x, t.y, t.z) != gstar.separated(t.x, t.y, t.z)
    if stratified:
        return sum(bad[m] / tot[m] for m in tot) / len(tot)
    return sum(bad.values()) / sum(tot.values())


@dataclass
class RatioSummary:
    ratios: list  # float, or None when undefined
    mean: float
    sd: float
    undefined: int

    def __str__(self) -> str:
        return format_mean_sd(self.mean, self.sd)


def format_mean_sd(mean: float, sd: float, digits: int = 3) -> str:
    return f"{mean:.{digits}f}({sd:.{digits}f})"


def ratio_report(errors_ours, errors_gsmn) -> RatioSummary:
    """Paired error ratios ours / GSMN with population standard deviation.

    0/0 counts as 1; x/0 with x > 0 is undefined and left out of the mean.
    """
    ours, base = list(errors_ours), list(errors_gsmn)
    if len(ours) != len(base):
        raise ValueError(f"unpaired errors: {len(ours)} vs {len(base)}")
    ratios = []
    for a, b in zip(ours, base):
        if b == 0:
            ratios.append(1.0 if a == 0 else None)
        else:
            ratios.append(a / b)
    defined = [r for r in ratios if r is not None]
    if defined:
        mean = float(np.mean(defined))
        sd = float(np.std(defined))
    else:
        mean = sd = math.nan
    return RatioSummary(ratios, mean, sd, len(ratios) - len(defined))
