"""IBMAP-HC: hill climbing over edge flips, maximizing the IB-score."""
from __future__ import annotations

import logging
import time

from ibmap.citests import TestCache
from ibmap.graph import Structure
from ibmap.gsmn import gsmn_learn
from ibmap.ibscore import ScoreState, flip_delta, flip_rescore
from ibmap.report import RunReport

log = logging.getLogger(__name__)

MIN_IMPROVEMENT = 1e-9


def best_flip(state: ScoreState, test, cache: TestCache):
    """Best strictly improving flip as (delta, (x, y)), or None.

    Pairs are scanned in lexicographic order and only a strictly larger delta
    replaces the incumbent, so ties go to the lowest pair.
    """
    n = state.structure.n
    best = None
    for x in range(n):
        for y in range(x + 1, n):
            delta = flip_delta(state, x, y, test, cache)[3]
            if delta > MIN_IMPROVEMENT and (best is None or delta > best[0]):
                best = (delta, (x, y))
    return best


def ibmap_hc(test, cache: TestCache | None = None, start: Structure | None = None,
             max_iters: int | None = None) -> RunReport:
    """Climb from ``start`` (GSMN's output by default) to a local IB-score maximum."""
    cache = cache if cache is not None else TestCache()
    t0 = time.perf_counter()
    n = test.n
    if start is None:
        start, _ = gsmn_learn(test, cache)
    if start.n != n:
        raise ValueError(f"start structure has {start.n} nodes, backend has {n}")
    if max_iters is None:
        max_iters = 10 * n

    state = ScoreState.build(start, test, cache)
    start_score = state.total
    deltas = []
    scores = [state.total]
    truncated = False
    while True:
        best = best_flip(state, test, cache)
        if best is None:
            break
        if len(deltas) >= max_iters:
            truncated = True
            break
        delta, (x, y) = best
        state, _ = flip_rescore(state, x, y, test, cache)
        deltas.append(delta)
        scores.append(state.total)
        log.debug("ascent %d: flip (%d, %d) delta %.6f", len(deltas), x, y, delta)

    st = cache.stats()
    return RunReport(
        algorithm="ibmap-hc",
        structure=state.structure,
        score=state.total,
        ascents=len(deltas),
        tests=st["tests"],
        cache_hits=st["hits"],
        cost_units=st["cost_units"],
        wall_time=time.perf_counter() - t0,
        truncated=truncated,
        extra={
            "start_score": round(start_score, 6),
            "start_edges": [list(e) for e in start.edges()],
            "deltas": [round(d, 6) for d in deltas],
            "scores": scores,
            "max_iters": max_iters,
        },
    )
