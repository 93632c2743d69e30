"""IBMAP-TS: uniform-cost search over the tree of trusted/distrusted decisions.

The search works with any *operator*: an object with ``next_triplet()``,
``answer(independent)``, ``copy()`` and ``structure()``, such as
:class:`ibmap.gsmn.GSMNRun`. Each tree node owns a copy of the operator
positioned after the node's decision prefix.
"""
from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass
from typing import Callable, Iterator

from ibmap.citests import TestCache, cached
from ibmap.gsmn import GSMNRun
from ibmap.report import RunReport

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 2**20
MAX_DEFAULT_N = 14


@dataclass(frozen=True)
class Expansion:
    depth: int
    path_cost: float
    triplet: object  # last assertion of the node's prefix; None at the root
    decision: bool | None
    goal: bool = False


class BudgetExhausted(RuntimeError):
    def __init__(self, budget, best_goal):
        super().__init__(f"node budget {budget} exhausted")
        self.best_goal = best_goal  # (cost, operator) or None


def _children(op, judge):
    """(cost_ind, cost_dep, triplet) for the operator's pending query."""
    t = op.next_triplet()
    j = judge(t)
    return t, j.neg_log(True), j.neg_log(False)


def uniform_cost(root, judge: Callable, node_budget: int = DEFAULT_NODE_BUDGET,
                 on_pop: Callable[[Expansion], None] | None = None):
    """Pop nodes in order of path cost; the first finished operator popped is optimal.

    Ties go to the shallower node, then to the node whose path has more
    independent decisions earlier. Returns (operator, path_cost, expansions).
    """
    # key: (cost, depth, path bits with independent = 0)
    frontier = [(0.0, 0, (), 0, root)]
    counter = 1
    expansions = 0
    while frontier:
        cost, depth, bits, _, op = heapq.heappop(frontier)
        t = op.next_triplet()
        if on_pop is not None:
            last = op.trace[-1] if op.trace else (None, None)
            on_pop(Expansion(depth, cost, last[0], last[1], t is None))
        if t is None:
            return op, cost, expansions
        if expansions >= node_budget:
            goals = [(c, o) for c, _, _, _, o in frontier if o.next_triplet() is None]
            raise BudgetExhausted(node_budget, min(goals, key=lambda g: g[0]) if goals else None)
        expansions += 1
        t, c_ind, c_dep = _children(op, judge)
        for independent, c in ((True, c_ind), (False, c_dep)):
            child = op.copy()
            child.answer(independent)
            heapq.heappush(frontier, (cost + c, depth + 1, bits + (0 if independent else 1,), counter, child))
            counter += 1
    raise RuntimeError("search tree exhausted without reaching a goal")


def ibmap_ts(test, cache: TestCache | None = None, node_budget: int = DEFAULT_NODE_BUDGET,
             operator=None, force: bool = False, expansion_log: list | None = None) -> RunReport:
    """Structure whose algorithm-based closure has the largest IB-score."""
    cache = cache if cache is not None else TestCache()
    n = test.n
    if n > MAX_DEFAULT_N:
        if not force:
            raise ValueError(
                f"IBMAP-TS needs exponentially many tests; n={n} exceeds {MAX_DEFAULT_N} (pass force=True)"
            )
        log.warning("running IBMAP-TS with n=%d; expect exponential cost", n)
    root = operator if operator is not None else GSMNRun(n)
    judge = lambda t: cached(test, cache, t)  # noqa: E731
    t0 = time.perf_counter()
    on_pop = expansion_log.append if expansion_log is not None else None
    try:
        op, cost, expansions = uniform_cost(root, judge, node_budget, on_pop)
    except BudgetExhausted as exc:
        goal_found = exc.best_goal is not None
        if goal_found:
            cost, op = exc.best_goal
        else:
            # no complete path generated yet: follow the tests' own decisions
            op = root.copy()
            while (t := op.next_triplet()) is not None:
                op.answer(judge(t).decision)
            cost = path_cost(op.trace, judge)
        st = cache.stats()
        log.warning("IBMAP-TS node budget %d exhausted (goal found: %s)", node_budget, goal_found)
        return RunReport(
            algorithm="ibmap-ts", structure=op.structure(), score=-cost,
            tests=st["tests"], cache_hits=st["hits"], cost_units=st["cost_units"],
            wall_time=time.perf_counter() - t0, budget_exhausted=True,
            extra={"expansions": node_budget, "goal_found": goal_found,
                   "path_cost": round(cost, 6), "closure": _dump(op.trace)},
        )
    st = cache.stats()
    return RunReport(
        algorithm="ibmap-ts",
        structure=op.structure(),
        score=-cost,
        tests=st["tests"],
        cache_hits=st["hits"],
        cost_units=st["cost_units"],
        wall_time=time.perf_counter() - t0,
        extra={"expansions": expansions, "path_cost": round(cost, 6), "closure": _dump(op.trace)},
    )


def _dump(trace):
    return [f"{t} -> {'I' if d else 'D'}" for t, d in trace]


def path_cost(trace, judge) -> float:
    return sum(judge(t).neg_log(d) for t, d in trace)


def enumerate_leaves(root, judge) -> Iterator[tuple[float, object]]:
    """Every complete decision vector below ``root`` with its path cost (brute force)."""
    stack = [(0.0, root)]
    while stack:
        cost, op = stack.pop()
        t = op.next_triplet()
        if t is None:
            yield cost, op
            continue
        j = judge(t)
        for independent in (True, False):
            child = op.copy()
            child.answer(independent)
            stack.append((cost + j.neg_log(independent), child))


def format_expansions(log_entries) -> str:
    lines = []
    for e in log_entries:
        dec = "-" if e.decision is None else ("I" if e.decision else "D")
        t = "root" if e.triplet is None else str(e.triplet)
        lines.append(f"{e.depth} {e.path_cost:.6f} {t} {dec}")
    return "\n".join(lines) + ("\n" if lines else "")

