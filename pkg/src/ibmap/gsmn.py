"""Grow-shrink Markov network learning as a resumable query operator.

:class:`GSMNRun` holds the control state of GSMN between test queries. It
asks for one triplet at a time and is told the decision, so the same code
serves the one-shot learner, prefix replay, and the decision tree searched
by IBMAP-TS. Repeated queries within one run are answered from the run's own
decision memo and do not reappear in the trace.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from ibmap.citests import TestCache, cached
from ibmap.graph import Structure, Triplet

GROW, SHRINK, DONE = 0, 1, 2


class ReplayError(ValueError):
    def __init__(self, position: int, expected, got):
        super().__init__(f"prefix diverges from replay at position {position}: expected {expected}, got {got}")
        self.position = position


class GSMNRun:
    """Control state of a GSMN run.

    ``variables`` fixes which blankets are learned and in what order; the
    default is every variable in index order.
    """

    __slots__ = ("n", "rule", "order", "k", "phase", "blanket", "pos", "changed",
                 "blankets", "memo", "trace", "_pending")

    def __init__(self, n: int, rule: str = "or", variables: Iterable[int] | None = None):
        if rule not in ("or", "and"):
            raise ValueError("edge rule must be 'or' or 'and'")
        self.n = n
        self.rule = rule
        self.order = tuple(range(n)) if variables is None else tuple(variables)
        self.k = 0
        self.phase = GROW if self.order else DONE
        self.blanket: frozenset[int] = frozenset()
        self.pos = 0
        self.changed = False
        self.blankets: dict[int, frozenset[int]] = {}
        self.memo: dict[Triplet, bool] = {}
        self.trace: list[tuple[Triplet, bool]] = []
        self._pending: Triplet | None = None

    def copy(self) -> "GSMNRun":
        c = GSMNRun.__new__(GSMNRun)
        c.n, c.rule, c.order, c.k = self.n, self.rule, self.order, self.k
        c.phase, c.blanket, c.pos, c.changed = self.phase, self.blanket, self.pos, self.changed
        c.blankets = dict(self.blankets)
        c.memo = dict(self.memo)
        c.trace = list(self.trace)
        c._pending = self._pending
        return c

    @property
    def done(self) -> bool:
        return self.next_triplet() is None

    def _candidate(self) -> Triplet | None:
        """Next query of the raw grow-shrink control flow, advancing past skips."""
        while self.phase != DONE:
            x = self.order[self.k]
            if self.pos < self.n:
                w = self.pos
                if w == x:
                    self.pos += 1
                    continue
                if self.phase == GROW and w not in self.blanket:
                    return Triplet(x, w, tuple(self.blanket))
                if self.phase == SHRINK and w in self.blanket:
                    return Triplet(x, w, tuple(self.blanket - {w}))
                self.pos += 1
                continue
            # end of a sweep
            if self.changed:
                self.pos, self.changed = 0, False
            elif self.phase == GROW:
                self.phase, self.pos = SHRINK, 0
            else:
                self.blankets[x] = self.blanket
                self.k += 1
                self.blanket, self.pos, self.changed = frozenset(), 0, False
                self.phase = GROW if self.k < len(self.order) else DONE
        return None

    def _apply(self, independent: bool) -> None:
        w = self.pos
        if self.phase == GROW and not independent:
            self.blanket = self.blanket | {w}
            self.changed = True
        elif self.phase == SHRINK and independent:
            self.blanket = self.blanket - {w}
            self.changed = True
        self.pos += 1

    def next_triplet(self) -> Triplet | None:
        """The next triplet needing an outside decision, or None when finished."""
        if self._pending is not None:
            return self._pending
        while True:
            t = self._candidate()
            if t is None:
                return None
            known = self.memo.get(t)
            if known is None:
                self._pending = t
                return t
            self._apply(known)

    def answer(self, independent: bool) -> None:
        t = self.next_triplet()
        if t is None:
            raise RuntimeError("run is already complete")
        independent = bool(independent)
        self.memo[t] = independent
        self.trace.append((t, independent))
        self._pending = None
        self._apply(independent)

    def structure(self) -> Structure:
        if self.next_triplet() is not None:
            raise RuntimeError("run is not complete")
        edges = set()
        for x, b in self.blankets.items():
            for y in b:
                u, v = min(x, y), max(x, y)
                if self.rule == "or":
                    edges.add((u, v))
                elif x in self.blankets.get(y, frozenset()):
                    edges.add((u, v))
        return Structure(self.n, sorted(edges))


@dataclass(frozen=True)
class NextTriplet:
    triplet: Triplet


@dataclass(frozen=True)
class Done:
    structure: Structure


def replay(n: int, prefix: Sequence[tuple[Triplet, bool]], rule: str = "or") -> GSMNRun:
    run = GSMNRun(n, rule)
    for i, (t, decision) in enumerate(prefix):
        expected = run.next_triplet()
        if expected != t:
            raise ReplayError(i, expected, t)
        run.answer(decision)
    return run


def next_query(n: int, prefix: Sequence[tuple[Triplet, bool]], rule: str = "or") -> Union[NextTriplet, Done]:
    """What GSMN asks next after ``prefix``, or the structure if it has finished."""
    run = replay(n, prefix, rule)
    t = run.next_triplet()
    return Done(run.structure()) if t is None else NextTriplet(t)


def _judge(test, cache):
    if cache is None:
        return test
    return lambda t: cached(test, cache, t)


def grow_shrink_blanket(x: int, test, cache: TestCache | None = None):
    """Learn the Markov blanket of ``x``; returns (blanket, trace)."""
    judge = _judge(test, cache)
    run = GSMNRun(test.n, variables=[x])
    while (t := run.next_triplet()) is not None:
        run.answer(judge(t).decision)
    return run.blankets[x], list(run.trace)


def gsmn_learn(test, cache: TestCache | None = None, rule: str = "or"):
    """GSMN: a blanket per variable, then edges from blanket membership."""
    judge = _judge(test, cache)
    run = GSMNRun(test.n, rule)
    while (t := run.next_triplet()) is not None:
        run.answer(judge(t).decision)
    return run.structure(), list(run.trace)


def format_trace(trace: Iterable[tuple[Triplet, bool]]) -> str:
    return "".join(f"{t} -> {'I' if d else 'D'}\n" for t, d in trace)


def parse_trace(text: str) -> list[tuple[Triplet, bool]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        body, sep, dec = line.rpartition("->")
        dec = dec.strip()
        if not sep or dec not in ("I", "D"):
            raise ValueError(f"trace line {lineno}: expected '... -> I|D'")
        out.append((Triplet.parse(body), dec == "I"))
    return out
