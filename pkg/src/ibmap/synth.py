"""Random benchmark networks and Gibbs-sampled datasets.

Models are binary pairwise (Ising-style) networks with
``p(s) ~ exp(sum_{(i,j) in E} w_ij * s_i * s_j)`` over spins ``s in {-1, +1}``;
spin +1 is written as code 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ibmap.dataset import Dataset
from ibmap.graph import Structure

W_LO, W_HI = 0.5, 1.5


def random_structure(n: int, tau: int, seed) -> Structure:
    """Connect every node to the first ``tau`` entries of a random permutation of the others."""
    if not 1 <= tau < n:
        raise ValueError(f"need 1 <= tau < n, got tau={tau}, n={n}")
    rng = np.random.default_rng(seed)
    edges = set()
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for j in rng.permutation(others)[:tau]:
            edges.add((min(i, int(j)), max(i, int(j))))
    return Structure(n, sorted(edges))


@dataclass(frozen=True)
class PairwiseModel:
    structure: Structure
    weights: dict  # (u, v) with u < v -> float

    def __post_init__(self):
        if set(self.weights) != set(self.structure.edges()):
            raise ValueError("weights must be defined exactly on the structure's edges")

    def coupling_matrix(self) -> np.ndarray:
        n = self.structure.n
        w = np.zeros((n, n))
        for (u, v), val in self.weights.items():
            w[u, v] = w[v, u] = val
        return w

    def dumps_weights(self) -> str:
        return "".join(f"{u} {v} {w:.17g}\n" for (u, v), w in sorted(self.weights.items()))

    @classmethod
    def loads(cls, structure: Structure, text: str) -> "PairwiseModel":
        weights = {}
        for line in text.splitlines():
            if line.strip():
                u, v, w = line.split()
                weights[(int(u), int(v))] = float(w)
        return cls(structure, weights)


def random_parameters(g: Structure, seed, w_lo: float = W_LO, w_hi: float = W_HI) -> PairwiseModel:
    rng = np.random.default_rng(seed)
    weights = {}
    for e in g.edges():
        mag = rng.uniform(w_lo, w_hi)
        weights[e] = float(mag if rng.random() < 0.5 else -mag)
    return PairwiseModel(g, weights)


@njit(cache=True)
def _gibbs_kernel(w, state, uniforms, burn_in, thin, n_rows):
    n = state.shape[0]
    out = np.empty((n_rows, n), dtype=np.int64)
    k = 0
    sweeps = burn_in + thin * n_rows
    row = 0
    for sweep in range(sweeps):
        for i in range(n):
            h = 0.0
            for j in range(n):
                h += w[i, j] * state[j]
            p_up = 1.0 / (1.0 + np.exp(-2.0 * h))
            state[i] = 1 if uniforms[k] < p_up else -1
            k += 1
        done = sweep + 1 - burn_in
        if done > 0 and done % thin == 0:
            for i in range(n):
                out[row, i] = 1 if state[i] > 0 else 0
            row += 1
    return out


def gibbs_sample(m: PairwiseModel, N: int, seed, burn_in: int = 1000, thin: int = 10) -> Dataset:
    """Single chain of index-order single-site sweeps; keeps every ``thin``-th sweep after burn-in."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if thin < 1 or burn_in < 0:
        raise ValueError("need thin >= 1 and burn_in >= 0")
    n = m.structure.n
    rng = np.random.default_rng(seed)
    state = rng.choice(np.array([-1, 1], dtype=np.int64), size=n)
    uniforms = rng.random((burn_in + thin * N) * n)
    rows = _gibbs_kernel(m.coupling_matrix(), state, uniforms, burn_in, thin, N)
    names = tuple(f"X{j}" for j in range(n))
    return Dataset(names, (2,) * n, rows)


def exact_pair_agreement(w: float) -> float:
    """P(s_0 = s_1) for a two-spin model with coupling ``w``."""
    return float(np.exp(w) / (np.exp(w) + np.exp(-w)))
