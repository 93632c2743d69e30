"""Undirected independence structures and vertex-separation queries.

Adjacency is kept as one integer bitset per node, which makes copies cheap
and lets reachability run on plain integer masks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, order=True)
class Triplet:
    """Conditional independence query ``(x ; y | z)`` in canonical form."""

    x: int
    y: int
    z: tuple[int, ...] = ()

    def __post_init__(self):
        if self.x == self.y:
            raise ValueError(f"triplet needs two distinct variables, got x=y={self.x}")
        if self.x > self.y:
            x, y = self.y, self.x
            object.__setattr__(self, "x", x)
            object.__setattr__(self, "y", y)
        z = tuple(sorted(set(self.z)))
        if self.x in z or self.y in z:
            raise ValueError(f"conditioning set {z} overlaps ({self.x}, {self.y})")
        object.__setattr__(self, "z", z)

    @classmethod
    def of(cls, x: int, y: int, z: Iterable[int] = ()) -> "Triplet":
        return cls(int(x), int(y), tuple(int(v) for v in z))

    def __len__(self) -> int:
        return 2 + len(self.z)

    def __str__(self) -> str:
        return f"{self.x} {self.y} | {' '.join(map(str, self.z))}".rstrip()

    @classmethod
    def parse(cls, text: str) -> "Triplet":
        head, _, tail = text.partition("|")
        x, y = head.split()
        return cls.of(int(x), int(y), (int(v) for v in tail.split()))


class Structure:
    """Undirected graph over nodes ``0..n-1`` with no self-loops.

    Instances are treated as values: every mutating operation returns a new
    structure.
    """

    __slots__ = ("n", "_adj", "_hash")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("n must be non-negative")
        adj = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self._adj = tuple(adj)
        self._hash = None

    @classmethod
    def _from_adj(cls, adj) -> "Structure":
        s = cls.__new__(cls)
        s.n = len(adj)
        s._adj = tuple(adj)
        s._hash = None
        return s

    @classmethod
    def empty(cls, n: int) -> "Structure":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "Structure":
        return cls(n, ((u, v) for u in range(n) for v in range(u + 1, n)))

    def has_edge(self, x: int, y: int) -> bool:
        return bool(self._adj[x] >> y & 1)

    def neighbor_mask(self, x: int) -> int:
        return self._adj[x]

    def boundary(self, x: int) -> frozenset[int]:
        """Markov boundary of ``x`` read off the graph: its neighbors."""
        if not 0 <= x < self.n:
            raise IndexError(f"node {x} out of range for n={self.n}")
        return frozenset(_bits(self._adj[x]))

    def degree(self, x: int) -> int:
        return bin(self._adj[x]).count("1")

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self._adj[u] >> (u + 1) << (u + 1))]

    def num_edges(self) -> int:
        return sum(bin(a).count("1") for a in self._adj) // 2

    def flip(self, x: int, y: int) -> "Structure":
        """Copy of this structure with the edge ``(x, y)`` toggled."""
        if x == y:
            raise ValueError(f"cannot flip a self-loop on node {x}")
        adj = list(self._adj)
        adj[x] ^= 1 << y
        adj[y] ^= 1 << x
        return Structure._from_adj(adj)

    def separated(self, x: int, y: int, z: Iterable[int] = ()) -> bool:
        """True iff every path between ``x`` and ``y`` passes through ``z``."""
        blocked = 0
        for v in z:
            blocked |= 1 << v
        target = 1 << y
        if (blocked >> x) & 1 or blocked & target:
            raise ValueError("x and y must not be in the conditioning set")
        adj = self._adj
        seen = (1 << x) | blocked
        frontier = 1 << x
        while frontier:
            nxt = 0
            for u in _bits(frontier):
                nxt |= adj[u]
            if nxt & target:
                return False
            nxt &= ~seen
            seen |= nxt
            frontier = nxt
        return True

    def __eq__(self, other) -> bool:
        return isinstance(other, Structure) and self._adj == other._adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._adj)
        return self._hash

    def __repr__(self) -> str:
        return f"Structure(n={self.n}, edges={self.edges()})"

    # file format: first line n, then "u v" per edge with u < v
    def dumps(self) -> str:
        lines = [str(self.n)] + [f"{u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    def write(self, fh: TextIO) -> None:
        fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Structure":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty structure file")
        n = int(lines[0])
        edges = []
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'u v', got {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls(n, edges)

    @classmethod
    def read(cls, fh: TextIO) -> "Structure":
        return cls.loads(fh.read())


def edge_flip(g: Structure, x: int, y: int) -> Structure:
    return g.flip(x, y)


def boundary(g: Structure, x: int) -> frozenset[int]:
    return g.boundary(x)


def vertex_separated(g: Structure, t: Triplet) -> bool:
    return g.separated(t.x, t.y, t.z)


def all_triplets(n: int) -> Iterator[Triplet]:
    """Every canonical triplet over ``n`` variables (exponential in ``n``)."""
    for x in range(n):
        for y in range(x + 1, n):
            rest = [v for v in range(n) if v != x and v != y]
            for mask in range(1 << len(rest)):
                yield Triplet(x, y, tuple(rest[i] for i in range(len(rest)) if mask >> i & 1))
