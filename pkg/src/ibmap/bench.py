"""Seeded benchmark grids: generate networks, learn, measure, compare with GSMN."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ibmap.citests import TestCache, make_backend
from ibmap.dataset import subsample
from ibmap.gsmn import gsmn_learn
from ibmap.hc import ibmap_hc
from ibmap.metrics import (
    edge_hamming,
    format_mean_sd,
    independence_hamming_structure,
    ratio_report,
    sample_triplets,
)
from ibmap.synth import gibbs_sample, random_parameters, random_structure
from ibmap.ts import ibmap_ts

log = logging.getLogger(__name__)


def _seq(root: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=root, spawn_key=tuple(int(k) for k in key))


def graph_seeds(root: int, n: int, tau: int, g: int) -> dict:
    """Independent seed streams for one benchmark network, keyed by its grid position."""
    base = _seq(root, n, tau, g)
    structure, params, chain, triplets = base.spawn(4)
    return {"structure": structure, "params": params, "chain": chain, "triplets": triplets}


def subsample_seed(root: int, n: int, tau: int, g: int, N: int) -> int:
    return int(_seq(root, n, tau, g, N, 1).generate_state(1)[0])


def make_network(root: int, n: int, tau: int, g: int):
    s = graph_seeds(root, n, tau, g)
    gstar = random_structure(n, tau, s["structure"])
    return gstar, random_parameters(gstar, s["params"])


def make_pool(root: int, n: int, tau: int, g: int, size: int, burn_in: int = 1000, thin: int = 10):
    gstar, model = make_network(root, n, tau, g)
    data = gibbs_sample(model, size, graph_seeds(root, n, tau, g)["chain"], burn_in, thin)
    return gstar, model, data


def datasets_for(root: int, n: int, tau: int, g: int, Ns, pool_size: int | None = None,
                 burn_in: int = 1000, thin: int = 10):
    """One Gibbs pool per network, subsampled once per requested size."""
    pool_size = pool_size or max(Ns)
    gstar, model, pool = make_pool(root, n, tau, g, pool_size, burn_in, thin)
    out = {}
    for N in Ns:
        out[N] = pool if N == pool.N else subsample(pool, N, subsample_seed(root, n, tau, g, N))
    return gstar, model, out


# grids only run the exponential search on small networks
TS_BENCH_MAX_N = 12


@dataclass
class BenchConfig:
    n: list = field(default_factory=lambda: [12])
    tau: list = field(default_factory=lambda: [1])
    N: list = field(default_factory=lambda: [200, 800])
    num_graphs: int = 10
    algorithms: list = field(default_factory=lambda: ["gsmn", "ibmap-hc"])
    test: str = "bayes"
    alpha: float = 0.05
    p_hi: float = 0.99
    triplets: int = 2000
    seed: int = 0
    burn_in: int = 1000
    thin: int = 10
    pool_size: int | None = None
    max_iters: int | None = None
    node_budget: int = 2**20
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown bench config keys: {sorted(unknown)}")
        cfg = cls(**known)
        for key in ("n", "tau", "N", "algorithms"):
            val = getattr(cfg, key)
            if not isinstance(val, list):
                setattr(cfg, key, [val])
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


def run_cell(cfg: BenchConfig, n: int, tau: int, g: int) -> list[dict]:
    """All algorithms on one network at every N; one record per (algorithm, N)."""
    gstar, _, data = datasets_for(cfg.seed, n, tau, g, cfg.N, cfg.pool_size, cfg.burn_in, cfg.thin)
    ts = sample_triplets(n, cfg.triplets, graph_seeds(cfg.seed, n, tau, g)["triplets"])
    records = []
    for N in cfg.N:
        d = data[N]
        backend = make_backend(cfg.test, d, gstar, alpha=cfg.alpha, p_hi=cfg.p_hi)
        cache = TestCache()
        t0 = time.perf_counter()
        gs, _ = gsmn_learn(backend, cache)
        gsmn_time = time.perf_counter() - t0
        results = {"gsmn": (gs, None, gsmn_time, cache.stats())}
        if "ibmap-hc" in cfg.algorithms:
            rep = ibmap_hc(backend, cache, start=gs, max_iters=cfg.max_iters)
            results["ibmap-hc"] = (rep.structure, rep.ascents, rep.wall_time, cache.stats())
        if "ibmap-ts" in cfg.algorithms and n <= TS_BENCH_MAX_N:
            rep = ibmap_ts(backend, TestCache(), node_budget=cfg.node_budget)
            results["ibmap-ts"] = (rep.structure, None, rep.wall_time, {"budget_exhausted": rep.budget_exhausted})
        for name, (structure, M, wall, stats) in results.items():
            records.append({
                "name": name, "n": n, "N": N, "tau": tau, "graph": g,
                "H_E": edge_hamming(structure, gstar),
                "H_I": independence_hamming_structure(structure, gstar, ts),
                "M": M, "time": wall, "stats": stats,
            })
    return records


def _cell_job(args):
    cfg_dict, n, tau, g = args
    cfg = BenchConfig.from_dict(cfg_dict)
    try:
        return run_cell(cfg, n, tau, g)
    except Exception as exc:  # one failed cell must not stop the grid
        log.exception("cell n=%d tau=%d graph=%d failed", n, tau, g)
        return [{"name": "error", "n": n, "tau": tau, "graph": g, "error": repr(exc)}]


def run_grid(cfg: BenchConfig) -> list[dict]:
    jobs = [(cfg.to_dict(), n, tau, g) for n in cfg.n for tau in cfg.tau for g in range(cfg.num_graphs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_cell_job, jobs))
    else:
        chunks = [_cell_job(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]


def summarize(records: list[dict]) -> list[dict]:
    """Table-style rows: mean(sd) errors per algorithm and ratios against GSMN."""
    rows = []
    keys = sorted({(r["n"], r["tau"], r["N"]) for r in records if r["name"] != "error"})
    for n, tau, N in keys:
        cell = [r for r in records if (r.get("n"), r.get("tau"), r.get("N")) == (n, tau, N)]
        by = {}
        for r in cell:
            by.setdefault(r["name"], {})[r["graph"]] = r
        base = by.get("gsmn", {})
        row = {"n": n, "tau": tau, "N": N}
        for name, runs in sorted(by.items()):
            graphs = sorted(runs)
            he = [runs[g]["H_E"] for g in graphs]
            hi = [runs[g]["H_I"] for g in graphs]
            row[f"H_E[{name}]"] = format_mean_sd(float(np.mean(he)), float(np.std(he)))
            row[f"H_I[{name}]"] = format_mean_sd(float(np.mean(hi)), float(np.std(hi)))
            if name != "gsmn" and base:
                paired = [g for g in graphs if g in base]
                re = ratio_report([runs[g]["H_E"] for g in paired], [base[g]["H_E"] for g in paired])
                ri = ratio_report([runs[g]["H_I"] for g in paired], [base[g]["H_I"] for g in paired])
                row[f"r_E[{name}]"] = str(re)
                row[f"r_I[{name}]"] = str(ri)
                row[f"r_E_mean[{name}]"] = re.mean
                row[f"r_E_undefined[{name}]"] = re.undefined
            ms = [runs[g]["M"] for g in graphs if runs[g].get("M") is not None]
            if ms:
                row[f"M[{name}]"] = format_mean_sd(float(np.mean(ms)), float(np.std(ms)))
                row[f"M_mean[{name}]"] = float(np.mean(ms))
        rows.append(row)
    return rows


def flat_records(records: list[dict]) -> list[dict]:
    """One row per run with the table columns name, n, N, tau, H_E, H_I, r, M."""
    base = {(r["n"], r["tau"], r["N"], r["graph"]): r for r in records if r["name"] == "gsmn"}
    out = []
    for r in records:
        if r["name"] == "error":
            continue
        b = base.get((r["n"], r["tau"], r["N"], r["graph"]))
        ratio = ratio_report([r["H_E"]], [b["H_E"]]).ratios[0] if b is not None else None
        out.append({
            "name": r["name"], "n": r["n"], "N": r["N"], "tau": r["tau"], "graph": r["graph"],
            "H_E": r["H_E"], "H_I": round(r["H_I"], 6),
            "r": "undefined" if ratio is None else round(ratio, 6),
            "M": "" if r["M"] is None else r["M"],
        })
    return out
