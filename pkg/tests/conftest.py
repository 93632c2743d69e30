import itertools
import math
import random

import pytest

from ibmap.graph import Structure, Triplet


def random_graph(n, p, seed):
    rng = random.Random(seed)
    return Structure(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Structure(n, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])


def path_separated(g, x, y, z):
    """Brute force: no simple path from x to y avoids z."""
    z = set(z)

    def dfs(u, seen):
        for v in range(g.n):
            if g.has_edge(u, v) and v not in seen:
                if v == y:
                    return True
                if v not in z and dfs(v, seen | {v}):
                    return True
        return False

    return not dfs(x, {x})


@pytest.fixture
def path3():
    return Structure(3, [(0, 1), (1, 2)])


class TwoQueryOperator:
    """Depth-2 tree: (0,2|{}) first, then (0,1|{}) or (0,1|{2}) depending on the answer."""

    def __init__(self, trace=()):
        self.trace = list(trace)

    def next_triplet(self):
        if not self.trace:
            return Triplet(0, 2)
        if len(self.trace) == 1:
            return Triplet(0, 1) if self.trace[0][1] else Triplet(0, 1, (2,))
        return None

    def answer(self, independent):
        self.trace.append((self.next_triplet(), independent))

    def copy(self):
        return TwoQueryOperator(self.trace)

    def structure(self):
        return Structure(3)


class SplitJudgment:
    """A judgment whose two decisions carry unrelated probabilities."""

    def __init__(self, p_ind, p_dep):
        self.p = {True: p_ind, False: p_dep}

    def neg_log(self, independent):
        return -math.log(self.p[independent])


# per-triplet (Pr of I, Pr of D) for a small worked search tree
FIG_TREE = {
    Triplet(0, 2): (0.4, 0.7),
    Triplet(0, 1): (0.6, 0.5),
    Triplet(0, 1, (2,)): (0.75, 0.85),
}


def fig_judge(t):
    return SplitJudgment(*FIG_TREE[t])


# acceptance criteria: one PASS/FAIL line each, printed after the run
_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    line = f"criterion {number:>2} {'PASS' if rep.passed else 'FAIL'}  {title}"
    _CRITERIA.append((number, line + (f"  [{detail}]" if detail else "")))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA):
        terminalreporter.write_line(line)


@pytest.fixture
def detail(request):
    """Attach a measured value to the criterion line."""
    def add(text):
        request.node.user_properties.append(("detail", text))
    return add
