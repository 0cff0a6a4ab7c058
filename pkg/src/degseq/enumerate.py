"""Exhaustive, duplicate-free listing of every realization, plus a brute-force oracle.

Each enumerator keeps an outer queue of partial graphs sitting between two
right-side nodes and an inner queue for the groups of the node being
connected. Both are FIFO by default; ``dfs=True`` makes both LIFO, which
emits the same set in a different order using far less memory.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from math import comb, prod
from typing import Callable, Iterable

from .core import Graph, Kind, check_sequence
from .errors import BudgetExceeded
from .mechanism import BOUNDARY, TERMINAL, AugmentedMechanism, BipartiteMechanism

Sink = Callable[[Graph], None]


def _flatten(chain) -> list:
    edges = []
    while chain is not None:
        batch, chain = chain
        edges.extend(batch)
    return edges


class _Emitter:
    def __init__(self, sink, kind, left, right):
        self.sink = sink
        self.kind = kind
        self.left = left
        self.right = right
        self.count = 0

    def __call__(self, chain):
        self.count += 1
        if self.sink is not None:
            self.sink(Graph.from_edges(self.kind, _flatten(chain), self.left, self.right))


def enumerate_bipartite(a, b, sink: Sink | None = None, dfs: bool = False) -> int:
    """Emit every bipartite graph with left degrees ``a`` and right degrees ``b``.

    Returns the number of graphs emitted. With ``sink=None`` nothing is built
    and only the count is returned.
    """
    mech = BipartiteMechanism(a, b)
    emit = _Emitter(sink, Kind.BIPARTITE, len(mech.a), len(mech.b))
    root = mech.root()
    if root is None:
        return 0
    cache: dict = {}
    outer = deque([(root, mech.a, None)])
    take = outer.pop if dfs else outer.popleft
    while outer:
        item = take()
        if item[0] is TERMINAL:
            emit(item[2])
            continue
        j = item[0][0]
        bnode = mech.order[j]
        inner = deque([item])
        take_inner = inner.pop if dfs else inner.popleft
        while inner:
            key, resid, chain = take_inner()
            if key is TERMINAL or key[0] != j:
                outer.append((key, resid, chain))
                continue
            opts = cache.get(key)
            if opts is None:
                opts = cache[key] = mech.options(key)
            alpha = key[2]
            members = [i for i, r in enumerate(resid) if r == alpha]
            for F, _, nxt in opts:
                if F == 0:
                    inner.append((nxt, resid, chain))
                    continue
                for combo in combinations(members, F):
                    nr = list(resid)
                    for i in combo:
                        nr[i] -= 1
                    inner.append((nxt, tuple(nr), (tuple((i, bnode) for i in combo), chain)))
    return emit.count


def _augmented(mech: AugmentedMechanism, sink, dfs) -> int:
    n = mech.n
    emit = _Emitter(sink, mech.kind, n, n)
    root = mech.root()
    if root is None:
        return 0
    undirected = mech.undirected
    A0 = tuple(x + 1 for x in mech.out_deg)
    B0 = tuple(x + 1 for x in mech.in_deg)
    cache: dict = {}
    outer = deque([(root, A0, B0, None)])
    take = outer.pop if dfs else outer.popleft
    while outer:
        key, A, B, chain = take()
        if key is TERMINAL:
            emit(chain)
            continue
        # next active node: largest in-degree, smallest id
        active = min((i for i in range(n) if B[i] >= 1), key=lambda i: (-B[i], i))
        start = mech.start(key[1], (A[active], B[active]))
        if start is None:
            continue
        inner = deque([(start, A, B, chain)])
        take_inner = inner.pop if dfs else inner.popleft
        while inner:
            key, A, B, chain = take_inner()
            if key is TERMINAL or key[0] == BOUNDARY:
                A, B = list(A), list(B)
                if undirected:
                    for i in range(n):
                        if A[i] < B[i]:
                            B[i] = A[i]
                    A[active] = B[active] = 0
                else:
                    B[active] = 0
                outer.append((key, tuple(A), tuple(B), chain))
                continue
            opts = cache.get(key)
            if opts is None:
                opts = cache[key] = mech.options(key)
            pool, cp, looped, rem, alpha, _ = key
            forced = not looped and cp == alpha
            members: dict = {}
            for i in range(n):
                if i != active and A[i] == alpha:
                    members.setdefault((A[i], B[i]), []).append(i)
            for _, choice, _, nxt in opts:
                pools = [combinations(members.get(t, ()), x) for t, x in choice if x]
                for combo in _product(pools):
                    picked = [i for part in combo for i in part]
                    na = list(A)
                    for i in picked:
                        na[i] -= 1
                    if forced:
                        na[active] -= 1
                    if undirected:
                        batch = tuple((min(i, active), max(i, active)) for i in picked)
                    else:
                        batch = tuple((i, active) for i in picked)
                    inner.append((nxt, tuple(na), B, (batch, chain) if batch else chain))
    return emit.count


def _product(iterables):
    pools = [list(it) for it in iterables]
    if not pools:
        yield ()
        return
    idx = [0] * len(pools)
    if any(not p for p in pools):
        return
    while True:
        yield tuple(p[i] for p, i in zip(pools, idx))
        k = len(pools) - 1
        while k >= 0:
            idx[k] += 1
            if idx[k] < len(pools[k]):
                break
            idx[k] = 0
            k -= 1
        if k < 0:
            return


def enumerate_directed(a, b, sink: Sink | None = None, dfs: bool = False) -> int:
    """Emit every loopless digraph with out-degrees ``a`` and in-degrees ``b``."""
    return _augmented(AugmentedMechanism(Kind.DIRECTED, a, b), sink, dfs)


def enumerate_undirected(d, sink: Sink | None = None, dfs: bool = False) -> int:
    """Emit every simple graph with degree sequence ``d``."""
    return _augmented(AugmentedMechanism(Kind.UNDIRECTED, d), sink, dfs)


def enumerate_graphs(kind, a, b=None, sink: Sink | None = None, dfs: bool = False) -> int:
    kind = Kind.parse(kind)
    if kind is Kind.BIPARTITE:
        return enumerate_bipartite(a, b, sink, dfs)
    if kind is Kind.DIRECTED:
        return enumerate_directed(a, b, sink, dfs)
    return enumerate_undirected(a, sink, dfs)


def collect(kind, a, b=None, dfs: bool = False) -> list[Graph]:
    out: list[Graph] = []
    enumerate_graphs(kind, a, b, out.append, dfs)
    return out


# brute force


DEFAULT_BUDGET = 5_000_000


def brute_force(a, b=None, kind="bipartite", sink: Sink | None = None, budget: int = DEFAULT_BUDGET) -> int:
    """Every realization by exhaustive per-node neighbor-set choices.

    Each node on the cheaper side picks a neighbor set of its exact degree;
    the other side's degrees filter the result. Partial choices that already
    overshoot a degree on the other side are cut early, which changes the
    work but not the output. ``budget`` caps the number of partial choices
    examined.
    """
    kind = Kind.parse(kind)
    a = check_sequence(a, "a")
    if kind is Kind.UNDIRECTED:
        graphs = _brute_undirected(a, budget)
        left = right = len(a)
    else:
        b = check_sequence(b, "b")
        if kind is Kind.DIRECTED and len(a) != len(b):
            raise ValueError("directed sequences must have equal length")
        graphs = _brute_two_sided(a, b, kind is Kind.DIRECTED, budget)
        left, right = len(a), len(b)
    n = 0
    for edges in graphs:
        n += 1
        if sink is not None:
            sink(Graph.from_edges(kind, edges, left, right))
    return n


class _Budget:
    def __init__(self, cap):
        self.cap = cap
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.cap:
            raise BudgetExceeded(f"brute force passed {self.cap} partial configurations")


def _brute_two_sided(a, b, loopless, budget) -> Iterable[list]:
    if sum(a) != sum(b):
        return
    m, n = len(a), len(b)
    options = (n - 1) if loopless else n
    cost_a = prod(comb(options, x) for x in a)
    options_b = (m - 1) if loopless else m
    cost_b = prod(comb(options_b, x) for x in b)
    flip = cost_b < cost_a
    d1, d2 = (b, a) if flip else (a, b)
    tick = _Budget(budget).tick
    load = [0] * len(d2)
    chosen: list = [None] * len(d1)

    def rec(t):
        if t == len(d1):
            if load == list(d2):
                edges = []
                for u, nbrs in enumerate(chosen):
                    for v in nbrs:
                        edges.append((v, u) if flip else (u, v))
                yield edges
            return
        pool = [v for v in range(len(d2)) if not (loopless and v == t)]
        for nbrs in combinations(pool, d1[t]):
            tick()
            if any(load[v] >= d2[v] for v in nbrs):
                continue
            for v in nbrs:
                load[v] += 1
            chosen[t] = nbrs
            yield from rec(t + 1)
            for v in nbrs:
                load[v] -= 1

    yield from rec(0)


def _brute_undirected(d, budget) -> Iterable[list]:
    if sum(d) % 2:
        return
    n = len(d)
    tick = _Budget(budget).tick
    load = [0] * n
    adj = [set() for _ in range(n)]

    # every node picks its full neighbor set; sets must agree symmetrically
    def rec(t):
        if t == n:
            yield [(u, v) for u in range(n) for v in adj[u] if u < v]
            return
        have = {u for u in range(t) if t in adj[u]}
        for nbrs in combinations([v for v in range(n) if v != t], d[t]):
            tick()
            s = set(nbrs)
            if {u for u in s if u < t} != have:
                continue
            later = [v for v in s if v > t]
            if any(load[v] >= d[v] for v in later):
                continue
            for v in later:
                load[v] += 1
            adj[t] = s
            yield from rec(t + 1)
            adj[t] = set()
            for v in later:
                load[v] -= 1

    yield from rec(0)
