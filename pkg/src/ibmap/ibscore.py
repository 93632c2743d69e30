"""Markov-blanket closures and the IB-score in natural-log space."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ibmap.citests import CachedTest, TestCache, cached
from ibmap.graph import Structure, Triplet


@dataclass(frozen=True)
class Assertion:
    triplet: Triplet
    independent: bool

    def __str__(self) -> str:
        return f"{self.triplet} -> {'I' if self.independent else 'D'}"


def mb_assertion(g: Structure, x: int, y: int) -> Assertion:
    """Assertion for the ordered pair (x, y): test x against y given x's boundary."""
    z = g.boundary(x) - {y}
    return Assertion(Triplet(x, y, tuple(z)), not g.has_edge(x, y))


def mb_closure(g: Structure) -> list[Assertion]:
    """n(n-1) assertions, one per ordered pair, in row-major pair order."""
    return [mb_assertion(g, x, y) for x in range(g.n) for y in range(g.n) if x != y]


def structure_from_closure(n: int, assertions: dict[tuple[int, int], bool]) -> Structure:
    """Rebuild a structure from ordered-pair assertion values.

    Edge (x, y) is placed iff either ordered assertion says dependent.
    """
    edges = [
        (x, y)
        for x in range(n)
        for y in range(x + 1, n)
        if not assertions[(x, y)] or not assertions[(y, x)]
    ]
    return Structure(n, edges)


def _lookup(test, cache):
    if cache is None:
        return test if isinstance(test, CachedTest) else (lambda t: test(t))
    return lambda t: cached(test, cache, t)


def _row_terms(g: Structure, x: int, judge) -> np.ndarray:
    n = g.n
    row = np.zeros(n)
    nb = g.boundary(x)
    for y in range(n):
        if y == x:
            continue
        t = Triplet(x, y, tuple(nb - {y}))
        row[y] = math.log(judge(t).prob(y not in nb))
    return row


def ib_score(g: Structure, test, cache: TestCache | None = None) -> float:
    """Sum of log posteriors of the asserted values over the MB closure."""
    judge = _lookup(test, cache)
    return float(sum(math.log(judge(a.triplet).prob(a.independent)) for a in mb_closure(g)))


@dataclass(frozen=True)
class ScoreState:
    """A structure with per-ordered-pair log terms.

    ``terms[x, y]`` is the log posterior of the (x, y) assertion; the diagonal
    is zero.
    """

    structure: Structure
    terms: np.ndarray
    total: float

    @classmethod
    def build(cls, g: Structure, test, cache: TestCache | None = None) -> "ScoreState":
        judge = _lookup(test, cache)
        terms = np.vstack([_row_terms(g, x, judge) for x in range(g.n)]) if g.n else np.zeros((0, 0))
        terms.setflags(write=False)
        return cls(g, terms, float(terms.sum()))

    def consistent(self, tol: float = 1e-9) -> bool:
        return abs(self.total - float(self.terms.sum())) <= tol


def flip_delta(s: ScoreState, x: int, y: int, test, cache: TestCache | None = None):
    """Score change of flipping (x, y); returns (flipped structure, new rows x and y, delta)."""
    judge = _lookup(test, cache)
    g2 = s.structure.flip(x, y)
    rx = _row_terms(g2, x, judge)
    ry = _row_terms(g2, y, judge)
    delta = float((rx.sum() - s.terms[x].sum()) + (ry.sum() - s.terms[y].sum()))
    return g2, rx, ry, delta


def flip_rescore(s: ScoreState, x: int, y: int, test, cache: TestCache | None = None):
    """Rescore an edge flip touching only the 2(n-1) terms of rows x and y."""
    g2, rx, ry, delta = flip_delta(s, x, y, test, cache)
    terms = s.terms.copy()
    terms[x] = rx
    terms[y] = ry
    terms.setflags(write=False)
    return ScoreState(g2, terms, s.total + delta), delta
