"""Degree sequences, grouping, z-vectors and graph values."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence


class Kind(str, enum.Enum):
    BIPARTITE = "bipartite"
    DIRECTED = "directed"
    UNDIRECTED = "undirected"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, Kind):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Group:
    """Nodes sharing one degree value."""

    alpha: int
    members: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.members)


def group(seq: Sequence[int], ids: Sequence[int] | None = None) -> list[Group]:
    """Partition nodes by degree, smallest degree first.

    Zero-degree nodes are left out. ``ids`` defaults to positions in ``seq``.
    """
    if ids is None:
        ids = range(len(seq))
    buckets: dict[int, list[int]] = {}
    for node, d in zip(ids, seq):
        if d > 0:
            buckets.setdefault(d, []).append(node)
    return [Group(d, tuple(sorted(buckets[d]))) for d in sorted(buckets)]


def z_vector(a: Iterable[int], length: int) -> tuple[int, ...]:
    """Entry j (1-based) counts the degrees in ``a`` that are at least j."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    hist = Counter(d for d in a if d > 0)
    z = [0] * length
    running = 0
    top = max(hist, default=0)
    # walk down from the largest degree so each entry is a suffix count
    for h in range(max(top, length), 0, -1):
        running += hist.get(h, 0)
        if h <= length:
            z[h - 1] = running
    return tuple(z)


def d_operation(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    """Entrywise ``x - y`` with the shorter vector padded by zeros."""
    n = max(len(x), len(y))
    return tuple(
        (x[h] if h < len(x) else 0) - (y[h] if h < len(y) else 0) for h in range(n)
    )


@dataclass(frozen=True)
class Graph:
    """A labeled simple graph.

    Bipartite edges are ``(i, j)`` with ``i`` a left id and ``j`` a right id,
    each counted from zero on its own side. Directed edges are ``(u, v)`` for
    ``u -> v``. Undirected edges are stored with ``u < v``.
    """

    kind: Kind
    left_count: int
    right_count: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_edges(cls, kind, edges, left_count, right_count=None) -> "Graph":
        kind = Kind.parse(kind)
        if right_count is None:
            right_count = left_count
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if kind is Kind.UNDIRECTED and u > v:
                u, v = v, u
            norm.append((u, v))
        norm.sort()
        return cls(kind, left_count, right_count, tuple(norm))

    @property
    def key(self) -> tuple[tuple[int, int], ...]:
        return canonical_key(self)

    def to_json_edges(self) -> list[list[int]]:
        if self.kind is Kind.BIPARTITE:
            return [[i, self.left_count + j] for i, j in self.edges]
        return [[u, v] for u, v in self.edges]

    @classmethod
    def from_json_edges(cls, kind, edges, left_count, right_count=None) -> "Graph":
        kind = Kind.parse(kind)
        if kind is Kind.BIPARTITE:
            edges = [(u, v - left_count) for u, v in edges]
        return cls.from_edges(kind, edges, left_count, right_count)


def canonical_key(g: Graph) -> tuple[tuple[int, int], ...]:
    """Order-independent, hashable form of the edge set."""
    return g.edges


def graph_violation(g: Graph, a: Sequence[int], b: Sequence[int] | None = None) -> str | None:
    """Describe the first reason ``g`` fails to realize the prescription, or None."""
    if b is None:
        b = a
    if len(set(g.edges)) != len(g.edges):
        seen = set()
        for e in g.edges:
            if e in seen:
                return f"repeated edge {e}"
            seen.add(e)
    left = [0] * len(a)
    right = [0] * len(b)
    for u, v in g.edges:
        if g.kind is Kind.BIPARTITE:
            if not (0 <= u < len(a) and 0 <= v < len(b)):
                return f"edge {(u, v)} out of range"
        else:
            if not (0 <= u < len(a) and 0 <= v < len(a)):
                return f"edge {(u, v)} out of range"
            if u == v:
                return f"self-loop at node {u}"
            if g.kind is Kind.UNDIRECTED and u > v:
                return f"undirected edge {(u, v)} not stored with u < v"
        left[u] += 1
        right[v] += 1
    if g.kind is Kind.UNDIRECTED:
        deg = [x + y for x, y in zip(left, right)]
        for i, (got, want) in enumerate(zip(deg, a)):
            if got != want:
                return f"node {i} has degree {got}, expected {want}"
        return None
    for i, (got, want) in enumerate(zip(left, a)):
        if got != want:
            return f"left node {i} has degree {got}, expected {want}"
    for j, (got, want) in enumerate(zip(right, b)):
        if got != want:
            return f"right node {j} has degree {got}, expected {want}"
    return None


def validate_graph(g: Graph, a: Sequence[int], b: Sequence[int] | None = None) -> bool:
    """True iff ``g`` is simple and every node has its prescribed degree."""
    return graph_violation(g, a, b) is None


def parse_sequence(text: str) -> list[int]:
    """Parse ``"2,1,1"`` into ``[2, 1, 1]``. An empty string gives ``[]``."""
    text = text.strip()
    if not text:
        return []
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit():
            raise ValueError(f"malformed degree {part!r} in {text!r}")
        out.append(int(part))
    return out


def check_sequence(seq, name="sequence") -> list[int]:
    """Coerce to a list of nonnegative ints or raise ValueError."""
    out = []
    for x in seq:
        if isinstance(x, bool) or int(x) != x:
            raise ValueError(f"{name} must contain integers, got {x!r}")
        if x < 0:
            raise ValueError(f"{name} must be nonnegative, got {x}")
        out.append(int(x))
    return out
