"""Discrete tabular datasets and contingency tables."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from ibmap.graph import Triplet

# conditioning sets up to this size get dense zero-filled tables
DENSE_Z_CAP = 12

_NON_FINITE = {"nan", "inf", "-inf", "+inf", "infinity", "-infinity", "+infinity"}


class DatasetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    variable_names: tuple[str, ...]
    arities: tuple[int, ...]
    rows: np.ndarray
    categories: tuple[tuple[str, ...], ...] = field(default=())

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.int64)
        if rows.ndim != 2:
            rows = rows.reshape(-1, len(self.arities))
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "arities", tuple(int(a) for a in self.arities))
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        if len(self.variable_names) != len(self.arities) or rows.shape[1] != len(self.arities):
            raise DatasetError("variable names, arities and row width disagree")
        if any(a < 1 for a in self.arities):
            raise DatasetError("every arity must be at least 1")
        if rows.size and (rows.min() < 0 or np.any(rows.max(axis=0) >= np.array(self.arities))):
            raise DatasetError("category code out of range for its arity")
        if not self.categories:
            cats = tuple(tuple(str(c) for c in range(a)) for a in self.arities)
            object.__setattr__(self, "categories", cats)

    @property
    def N(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return len(self.arities)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dataset)
            and self.variable_names == other.variable_names
            and self.arities == other.arities
            and np.array_equal(self.rows, other.rows)
        )

    def dumps(self) -> str:
        """Serialize the code-mapped rows as comma-separated text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.variable_names)
        w.writerows(self.rows.tolist())
        return buf.getvalue()

    def schema(self) -> str:
        return "".join(f"{name}:{a}\n" for name, a in zip(self.variable_names, self.arities))


def read_schema(fh: TextIO) -> dict[str, int]:
    out = {}
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        name, sep, arity = line.rpartition(":")
        if not sep:
            raise DatasetError(f"schema line {lineno}: expected 'name:arity'")
        out[name.strip()] = int(arity)
    return out


def load_dataset(source: TextIO | str, schema: dict[str, int] | None = None) -> Dataset:
    """Parse a comma-separated table with a header row.

    Labels in each column are coded 0, 1, ... in order of first appearance.
    ``schema`` may raise a column's arity above the number of observed labels.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DatasetError("empty dataset: no header") from None
    if not header or any(not h for h in header):
        raise DatasetError("line 1: empty variable name in header")
    n = len(header)
    maps: list[dict[str, int]] = [{} for _ in range(n)]
    rows = []
    for record in reader:
        lineno = reader.line_num
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        if len(record) != n:
            raise DatasetError(f"line {lineno}: expected {n} fields, got {len(record)}")
        row = []
        for j, raw in enumerate(record):
            val = raw.strip()
            if not val or val.lower() in _NON_FINITE:
                raise DatasetError(f"line {lineno}: empty or non-finite field in column {header[j]!r}")
            row.append(maps[j].setdefault(val, len(maps[j])))
        rows.append(row)
    if not rows:
        raise DatasetError("empty dataset")
    arities = [len(m) for m in maps]
    if schema:
        for j, name in enumerate(header):
            if name in schema:
                if schema[name] < arities[j]:
                    raise DatasetError(
                        f"schema declares arity {schema[name]} for {name!r} but {arities[j]} labels observed"
                    )
                arities[j] = schema[name]
    categories = tuple(tuple(m) for m in maps)
    return Dataset(tuple(header), tuple(arities), np.array(rows, dtype=np.int64), categories)


def subsample(d: Dataset, size: int, seed: int) -> Dataset:
    """Uniform sample of ``size`` rows without replacement; arities are kept."""
    if size < 1 or size > d.N:
        raise DatasetError(f"subsample size {size} outside [1, {d.N}]")
    rng = np.random.default_rng(seed)
    idx = rng.choice(d.N, size=size, replace=False)
    return Dataset(d.variable_names, d.arities, d.rows[idx], d.categories)


def _config_index(d: Dataset, z: tuple[int, ...]) -> tuple[np.ndarray, int | None]:
    """Map every row to an integer id of its Z configuration.

    Returns (ids, total_configs); total_configs is None when the mixed-radix
    index would overflow and ids are then dense ranks of observed configs.
    """
    if not z:
        return np.zeros(d.N, dtype=np.int64), 1
    radices = [d.arities[v] for v in z]
    if math.prod(radices) < 2**62:
        ids = np.zeros(d.N, dtype=np.int64)
        for v, r in zip(z, radices):
            ids = ids * r + d.rows[:, v]
        return ids, math.prod(radices)
    _, ids = np.unique(d.rows[:, list(z)], axis=0, return_inverse=True)
    return ids.reshape(-1).astype(np.int64), None


def slice_counts(d: Dataset, t: Triplet) -> np.ndarray:
    """Counts for observed Z configurations only, shape (k, |X|, |Y|)."""
    ax, ay = d.arities[t.x], d.arities[t.y]
    ids, _ = _config_index(d, t.z)
    uniq, inv = np.unique(ids, return_inverse=True)
    cell = (inv.reshape(-1) * ax + d.rows[:, t.x]) * ay + d.rows[:, t.y]
    counts = np.bincount(cell, minlength=len(uniq) * ax * ay)
    return counts.reshape(len(uniq), ax, ay)


@dataclass(frozen=True)
class ContingencyTable:
    """Counts of (x, y) per configuration of z.

    ``counts`` is a dense array indexed ``[z_config, x, y]`` when the
    conditioning set is small, else a dict keyed by the z-configuration tuple.
    """

    triplet: Triplet
    counts: np.ndarray | dict
    total: int

    @property
    def dimension(self) -> int:
        return 2 + len(self.triplet.z)

    @property
    def dense(self) -> bool:
        return isinstance(self.counts, np.ndarray)

    def slices(self) -> Iterable[np.ndarray]:
        if self.dense:
            return iter(self.counts)
        return iter(self.counts.values())


def _check_triplet(d: Dataset, t: Triplet) -> None:
    vs = (t.x, t.y) + t.z
    if any(not 0 <= v < d.n for v in vs):
        raise DatasetError(f"triplet {t} references variables outside [0, {d.n})")


def contingency_table(d: Dataset, t: Triplet, dense_cap: int = DENSE_Z_CAP) -> ContingencyTable:
    _check_triplet(d, t)
    ax, ay = d.arities[t.x], d.arities[t.y]
    if len(t.z) <= dense_cap:
        ids, total_configs = _config_index(d, t.z)
        if total_configs is not None:
            cell = (ids * ax + d.rows[:, t.x]) * ay + d.rows[:, t.y]
            counts = np.bincount(cell, minlength=total_configs * ax * ay)
            return ContingencyTable(t, counts.reshape(total_configs, ax, ay), d.N)
    table: dict[tuple[int, ...], np.ndarray] = {}
    zcols = d.rows[:, list(t.z)]
    for zrow, xv, yv in zip(map(tuple, zcols.tolist()), d.rows[:, t.x].tolist(), d.rows[:, t.y].tolist()):
        m = table.get(zrow)
        if m is None:
            m = table[zrow] = np.zeros((ax, ay), dtype=np.int64)
        m[xv, yv] += 1
    return ContingencyTable(t, table, d.N)


def from_codes(rows: Iterable[Iterable[int]], arities: Iterable[int] | None = None,
               names: Iterable[str] | None = None) -> Dataset:
    """Build a dataset directly from integer codes (used by the sampler and tests)."""
    arr = np.asarray(list(map(list, rows)) if not isinstance(rows, np.ndarray) else rows, dtype=np.int64)
    if arr.ndim != 2:
        raise DatasetError("rows must be two-dimensional")
    if arities is None:
        arities = (arr.max(axis=0) + 1).tolist() if arr.size else [1] * arr.shape[1]
    arities = tuple(int(a) for a in arities)
    if names is None:
        names = tuple(f"X{j}" for j in range(len(arities)))
    return Dataset(tuple(names), arities, arr)
