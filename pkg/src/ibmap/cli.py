"""Command-line interface: ``ibmap generate|learn|evaluate|bench``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

from ibmap import __version__
from ibmap.bench import BenchConfig, datasets_for, flat_records, run_grid, summarize
from ibmap.citests import TestCache, make_backend
from ibmap.dataset import Dataset, load_dataset, read_schema, subsample
from ibmap.graph import Structure
from ibmap.gsmn import format_trace, gsmn_learn
from ibmap.hc import ibmap_hc
from ibmap.ibscore import ib_score
from ibmap.metrics import (
    edge_hamming,
    independence_hamming_data,
    independence_hamming_structure,
    sample_triplets,
)
from ibmap.report import RunReport
from ibmap.ts import MAX_DEFAULT_N, format_expansions, ibmap_ts

log = logging.getLogger("ibmap")


class CLIError(Exception):
    pass


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc}") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_data(path: str, schema_path: str | None = None) -> Dataset:
    p = Path(path)
    if not p.exists():
        raise CLIError(f"data file {path} does not exist")
    sidecar = Path(schema_path) if schema_path else p.with_suffix(".schema")
    schema = None
    if sidecar.exists():
        with open(sidecar) as fh:
            schema = read_schema(fh)
    with open(p, newline="") as fh:
        return load_dataset(fh, schema)


def read_structure(path: str) -> Structure:
    try:
        return Structure.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CLIError(f"structure file {path} does not exist") from None


def cmd_generate(args) -> int:
    out = Path(args.out)
    Ns = sorted(set(args.N_list))
    manifest = {
        "command": "generate", "version": __version__, "n": args.n, "tau": args.tau,
        "num_graphs": args.num_graphs, "N_list": Ns, "seed": args.seed,
        "burn_in": args.burn_in, "thin": args.thin, "pool_size": args.pool_size or max(Ns),
        "weights": "uniform |w| in [0.5, 1.5], random sign", "graphs": [],
    }
    for g in range(args.num_graphs):
        gstar, model, data = datasets_for(args.seed, args.n, args.tau, g, Ns, args.pool_size,
                                          args.burn_in, args.thin)
        gdir = out / f"graph_{g:03d}"
        _write(gdir / "structure.txt", gstar.dumps())
        _write(gdir / "weights.txt", model.dumps_weights())
        files = []
        for N in Ns:
            stem = gdir / f"data_N{N}"
            _write(stem.with_suffix(".csv"), data[N].dumps())
            _write(stem.with_suffix(".schema"), data[N].schema())
            files.append(str(stem.with_suffix(".csv").relative_to(out)))
        manifest["graphs"].append({"graph": g, "edges": gstar.num_edges(), "datasets": files})
    _write(out / "manifest.json", _dump_json(manifest))
    print(f"wrote {args.num_graphs} networks x {len(Ns)} datasets to {out}")
    return 0


def _backend(args, data: Dataset | None):
    truth = read_structure(args.truth) if getattr(args, "truth", None) else None
    if args.test == "oracle" and truth is None:
        raise CLIError("--test oracle requires --truth STRUCTURE")
    if args.test != "oracle" and data is None:
        raise CLIError(f"--test {args.test} requires --data")
    return make_backend(args.test, data, truth, alpha=args.alpha, p_hi=args.p_hi, threshold=args.threshold)


def _apply_subsample(data: Dataset, spec: str | None, seed: int) -> Dataset:
    if not spec:
        return data
    val = float(spec)
    size = int(round(data.N * val)) if val < 1 else int(val)
    return subsample(data, max(1, size), seed)


def cmd_learn(args) -> int:
    data = read_data(args.data, args.schema) if args.data else None
    if data is not None:
        data = _apply_subsample(data, args.subsample, args.seed)
    backend = _backend(args, data)
    n = backend.n
    if args.algorithm == "ibmap-ts" and n > MAX_DEFAULT_N and not args.force:
        raise CLIError(
            f"refusing IBMAP-TS on n={n} > {MAX_DEFAULT_N}: the tree search needs an exponential "
            "number of tests; pass --force to run anyway"
        )
    cache = TestCache()
    out = Path(args.out)
    if args.algorithm == "gsmn":
        t0 = time.perf_counter()
        structure, trace = gsmn_learn(backend, cache, rule=args.edge_rule)
        wall = time.perf_counter() - t0
        score = ib_score(structure, backend, cache)
        st = cache.stats()
        report = RunReport("gsmn", structure, score=score, tests=st["tests"], cache_hits=st["hits"],
                           cost_units=st["cost_units"], wall_time=wall,
                           extra={"edge_rule": args.edge_rule, "trace_length": len(trace)})
        _write(out / "trace.txt", format_trace(trace))
    elif args.algorithm == "ibmap-hc":
        start = read_structure(args.start) if args.start else None
        report = ibmap_hc(backend, cache, start=start, max_iters=args.max_iters)
    else:
        expansions = [] if args.dump_expansions else None
        report = ibmap_ts(backend, cache, node_budget=args.node_budget, force=args.force,
                          expansion_log=expansions)
        if expansions is not None:
            _write(out / "expansions.txt", format_expansions(expansions))
    report.extra["manifest"] = _learn_manifest(args, data)
    _write(out / "structure.txt", report.structure.dumps())
    _write(out / "report.json", _dump_json(report.to_dict()))
    summary = f"{report.algorithm}: {report.structure.num_edges()} edges, score {report.score:.6f}"
    if report.ascents is not None:
        summary += f", M={report.ascents}"
    print(summary)
    return 0


def _learn_manifest(args, data) -> dict:
    keys = ("algorithm", "data", "schema", "truth", "test", "alpha", "p_hi", "threshold", "seed",
            "subsample", "max_iters", "node_budget", "edge_rule", "start", "force")
    m = {k: getattr(args, k, None) for k in keys}
    if data is not None:
        m["N"] = data.N
        m["n"] = data.n
    return m


def cmd_evaluate(args) -> int:
    learned = read_structure(args.learned)
    record = {"metric": args.metric, "learned": args.learned, "n": learned.n}
    if args.metric == "he":
        if not args.truth:
            raise CLIError("metric he needs --truth")
        record["H_E"] = edge_hamming(learned, read_structure(args.truth))
    elif args.metric == "hi-structure":
        if not args.truth:
            raise CLIError("metric hi-structure needs --truth")
        ts = sample_triplets(learned.n, args.triplets, args.seed)
        record.update(triplets=len(ts), seed=args.seed,
                      H_I=round(independence_hamming_structure(learned, read_structure(args.truth), ts), 6))
    else:
        if not args.data:
            raise CLIError("metric hi-data needs --data (the complete dataset)")
        data = read_data(args.data, args.schema)
        if args.test == "oracle":
            raise CLIError("metric hi-data compares against data; use --test bayes or chi2")
        backend = make_backend(args.test, data, alpha=args.alpha, threshold=args.threshold)
        ts = sample_triplets(learned.n, args.triplets, args.seed)
        record.update(triplets=len(ts), seed=args.seed, N=data.N, test=args.test,
                      H_I=round(independence_hamming_data(learned, data, ts, backend, TestCache()), 6))
    text = _dump_json(record)
    if args.out:
        _write(Path(args.out), text)
    print(text, end="")
    return 0


def cmd_bench(args) -> int:
    cfg_dict = json.loads(Path(args.config).read_text())
    for key in ("seed", "workers"):
        val = getattr(args, key, None)
        if val is not None:
            cfg_dict[key] = val
    cfg = BenchConfig.from_dict(cfg_dict)
    records = run_grid(cfg)
    out = Path(args.out)
    rows = summarize(records)
    flat = flat_records(records)
    _write(out / "manifest.json", _dump_json({"command": "bench", "version": __version__, **cfg.to_dict()}))
    _write(out / "runs.json", _dump_json([{k: v for k, v in r.items() if k != "time"} for r in records]))
    _write(out / "summary.json", _dump_json(rows))
    if flat:
        with open(out / "runs.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(flat[0]))
            w.writeheader()
            w.writerows(flat)
    errors = [r for r in records if r["name"] == "error"]
    for row in rows:
        cols = [f"n={row['n']}", f"tau={row['tau']}", f"N={row['N']}"]
        cols += [f"{k}={v}" for k, v in row.items()
                 if k.startswith(("H_E[", "r_E[", "M[")) and isinstance(v, str)]
        print("  ".join(cols))
    if errors:
        print(f"{len(errors)} cell(s) failed; see runs.json", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ibmap", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def test_flags(sp):
        sp.add_argument("--test", choices=["bayes", "chi2", "oracle"], default="bayes")
        sp.add_argument("--alpha", type=float, default=0.05, help="chi-square significance level")
        sp.add_argument("--p-hi", type=float, default=0.99, help="oracle posterior of a correct answer")
        sp.add_argument("--threshold", type=float, default=0.5, help="bayes decision threshold")

    g = sub.add_parser("generate", help="sample benchmark networks and datasets")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--tau", type=int, required=True)
    g.add_argument("--num-graphs", type=int, default=10)
    g.add_argument("--N-list", type=lambda s: [int(v) for v in s.split(",")], default=[40, 200, 800, 5000, 12000])
    g.add_argument("--pool-size", type=int, default=None, help="Gibbs rows drawn before subsampling")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--burn-in", type=int, default=1000)
    g.add_argument("--thin", type=int, default=10)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    le = sub.add_parser("learn", help="learn a structure")
    le.add_argument("--algorithm", choices=["gsmn", "ibmap-hc", "ibmap-ts"], required=True)
    le.add_argument("--data")
    le.add_argument("--schema")
    le.add_argument("--truth", help="ground-truth structure (required for --test oracle)")
    test_flags(le)
    le.add_argument("--seed", type=int, default=0)
    le.add_argument("--subsample", help="fraction (<1) or row count to learn from")
    le.add_argument("--max-iters", type=int, default=None)
    le.add_argument("--node-budget", type=int, default=2**20)
    le.add_argument("--edge-rule", choices=["or", "and"], default="or")
    le.add_argument("--start", help="starting structure for ibmap-hc")
    le.add_argument("--force", action="store_true")
    le.add_argument("--dump-expansions", action="store_true")
    le.add_argument("--out", required=True)
    le.set_defaults(func=cmd_learn)

    ev = sub.add_parser("evaluate", help="compare a learned structure with a truth or a dataset")
    ev.add_argument("--learned", required=True)
    ev.add_argument("--metric", choices=["he", "hi-structure", "hi-data"], required=True)
    ev.add_argument("--truth")
    ev.add_argument("--data")
    ev.add_argument("--schema")
    test_flags(ev)
    ev.add_argument("--triplets", type=int, default=2000)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("bench", help="run a (n, tau, N, graph) grid from a JSON config")
    b.add_argument("config")
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CLIError, ValueError) as exc:
        print(f"ibmap: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
