"""Canonical states of the sequential connection mechanism.

The active right-side node visits the left-side degree groups in increasing
degree order and takes some number of nodes from each. A state records only
what the rest of the process depends on, so labeled states that differ by a
relabeling of interchangeable nodes share one key. Counting, enumeration and
sampling all walk the same transitions.

Key shapes
----------
bipartite   ``(j, rem, alpha, counts)``: ``j`` indexes the right-side node in
            processing order, ``rem`` is its unmet degree, ``alpha`` the group
            being decided and ``counts[d]`` the number of left nodes with
            residual degree ``d``.
augmented   ``(pool, cp, looped, rem, alpha, reserve)`` inside a step, where
            ``pool`` is a sorted tuple of ``((A, B), count)`` over every node
            but the active one, ``A`` and ``B`` being augmented residual out-
            and in-degrees (``B == 0`` marks a finished node). ``cp`` is the
            active node's own out-degree. Between steps the key is
            ``(BOUNDARY, pool)``.
"""

from __future__ import annotations

from math import comb
from typing import Sequence

from .core import Kind, check_sequence
from .feasibility import (
    augmented_bounds,
    digraph_feasible,
    erdos_gallai,
    gale_ryser,
)

TERMINAL = ("done",)
BOUNDARY = "next"


def min_prefix_from(z: Sequence[int], b_rest: Sequence[int], alpha: int) -> int | None:
    """Smallest prefix sum of ``z - b_rest`` over positions ``alpha..len(z)``.

    None when ``alpha`` exceeds the length, which can only happen on a state
    with no completion.
    """
    n = len(z)
    if alpha > n:
        return None
    nb = len(b_rest)
    run = 0
    for h in range(alpha - 1):
        run += z[h] - (b_rest[h] if h < nb else 0)
    best = None
    for h in range(alpha - 1, n):
        run += z[h] - (b_rest[h] if h < nb else 0)
        if best is None or run < best:
            best = run
    return best


def _suffix_z(counts: Sequence[int], length: int) -> list[int]:
    z = [0] * length
    run = 0
    for d in range(len(counts) - 1, 0, -1):
        run += counts[d]
        if d <= length:
            z[d - 1] = run
    return z


class GroupStep:
    __slots__ = ("alpha", "lo", "hi", "m", "M", "rem", "forced", "classes")

    def __init__(self, alpha, lo, hi, m, M, rem, forced=False, classes=()):
        self.alpha = alpha
        self.lo = lo
        self.hi = hi
        self.m = m
        self.M = M
        self.rem = rem
        self.forced = forced
        # (type, count, allowed) for augmented mechanisms
        self.classes = classes

    @property
    def values(self):
        return range(self.lo, self.hi + 1)

    @property
    def eligible(self) -> int:
        """Members that may be picked freely (the forced counterpart excluded)."""
        if not self.classes:
            return self.m
        return sum(c for _, c, ok in self.classes if ok)


class BipartiteMechanism:
    kind = Kind.BIPARTITE

    def __init__(self, a: Sequence[int], b: Sequence[int]):
        self.a = tuple(check_sequence(a, "a"))
        self.b = tuple(check_sequence(b, "b"))
        # right-side nodes in processing order: degree descending, id ascending
        self.order = tuple(sorted((j for j in range(len(self.b)) if self.b[j] > 0), key=lambda j: (-self.b[j], j)))
        self.bs = tuple(self.b[j] for j in self.order)
        self.top = max(self.a, default=0)
        self.feasible = gale_ryser(self.a, self.b)
        # bytes keep keys small; multiplicities above 255 need a tuple
        self._pack = bytes if len(self.a) < 256 else tuple

    def initial_counts(self):
        counts = [0] * (self.top + 1)
        for d in self.a:
            if d > 0:
                counts[d] += 1
        return self._pack(counts)

    def root(self):
        if not self.feasible:
            return None
        return self.normalize(-1, 0, 1, self.initial_counts())

    def normalize(self, j, rem, thr, counts):
        """Advance past finished steps to the next group that needs a decision."""
        nb = len(self.bs)
        while True:
            if rem == 0:
                j += 1
                if j == nb:
                    return TERMINAL if not any(counts) else None
                rem = self.bs[j]
                thr = 1
            for alpha in range(thr, len(counts)):
                if counts[alpha]:
                    return (j, rem, alpha, counts)
            return None

    def context(self, key):
        """Per-step lookup arrays valid for this key and every later group of its step.

        Connections made in a group only lower z below the next group's degree,
        so prefix sums from there on shift by the number of nodes taken and the
        suffix minima computed once can be reused.
        """
        j, rem, alpha, counts = key
        length = len(self.bs) - j
        z = _suffix_z(counts, length)
        b_rest = self.bs[j + 1:]
        nb = len(b_rest)
        prefix = [0] * (length + 1)
        run = 0
        for h in range(length):
            run += z[h] - (b_rest[h] if h < nb else 0)
            prefix[h + 1] = run
        sufmin = [0] * (length + 2)
        best = None
        for h in range(length, 0, -1):
            if best is None or prefix[h] < best:
                best = prefix[h]
            sufmin[h] = best
        above = [0] * (len(counts) + 1)
        for d in range(len(counts) - 1, -1, -1):
            above[d] = above[d + 1] + (counts[d + 1] if d + 1 < len(counts) else 0)
        return (j, rem, length, sufmin, above)

    def step(self, key, ctx=None) -> GroupStep:
        j, rem, alpha, counts = key
        if ctx is None or ctx[0] != j:
            ctx = self.context(key)
        _, rem0, length, sufmin, above = ctx
        m = counts[alpha]
        M = above[alpha]
        lo = max(rem - M, 0)
        if alpha > length:
            return GroupStep(alpha, lo, -1, m, M, rem)
        hi = min(m, sufmin[alpha] - (rem0 - rem))
        return GroupStep(alpha, lo, hi, m, M, rem)

    def child(self, key, F):
        j, rem, alpha, counts = key
        if F:
            nc = list(counts)
            nc[alpha] -= F
            if alpha > 1:
                nc[alpha - 1] += F
            counts = self._pack(nc)
        return self.normalize(j, rem - F, alpha + 1, counts)

    def options(self, key, ctx=None):
        """``(F, multiplicity, child)`` for every admissible F in this group."""
        st = self.step(key, ctx)
        out = []
        for F in st.values:
            nxt = self.child(key, F)
            if nxt is not None:
                out.append((F, comb(st.m, F), nxt))
        return out

    def expand(self, key, ctx=None):
        if ctx is None or ctx[0] != key[0]:
            ctx = self.context(key)
        out = []
        for _, mult, nxt in self.options(key, ctx):
            out.append((mult, nxt, ctx if nxt[0] == key[0] else None))
        return out


def _pool_add(pool: dict, t, c=1):
    v = pool.get(t, 0) + c
    if v:
        pool[t] = v
    else:
        pool.pop(t, None)


def _freeze(pool: dict) -> tuple:
    return tuple(sorted((t, c) for t, c in pool.items() if c and t != (0, 0)))


class AugmentedMechanism:
    """Directed and undirected graphs through the loop-augmented bipartite picture.

    Every degree is raised by one and each node must take a loop to its own
    copy on the other side; loops are dropped from the output. For undirected
    graphs out- and in-degrees coincide and each finished step is mirrored.
    """

    def __init__(self, kind, out_deg: Sequence[int], in_deg: Sequence[int] | None = None):
        self.kind = Kind.parse(kind)
        if self.kind is Kind.BIPARTITE:
            raise ValueError("use BipartiteMechanism for bipartite graphs")
        out_deg = check_sequence(out_deg, "a")
        in_deg = out_deg if in_deg is None else check_sequence(in_deg, "b")
        if len(out_deg) != len(in_deg):
            raise ValueError("out- and in-degree sequences must have the same length")
        if self.kind is Kind.UNDIRECTED and list(out_deg) != list(in_deg):
            raise ValueError("undirected graphs need a single degree sequence")
        self.out_deg = tuple(out_deg)
        self.in_deg = tuple(in_deg)
        self.n = len(out_deg)
        if self.kind is Kind.DIRECTED:
            self.feasible = digraph_feasible(self.out_deg, self.in_deg)
        else:
            self.feasible = erdos_gallai(self.out_deg)

    @property
    def undirected(self) -> bool:
        return self.kind is Kind.UNDIRECTED

    def initial_pool(self) -> tuple:
        pool: dict = {}
        for o, i in zip(self.out_deg, self.in_deg):
            _pool_add(pool, (o + 1, i + 1))
        return _freeze(pool)

    def root(self):
        if not self.feasible:
            return None
        if self.n == 0:
            return TERMINAL
        return (BOUNDARY, self.initial_pool())

    @staticmethod
    def canonical_active(pool: tuple):
        best = None
        for t, _ in pool:
            if t[1] >= 1 and (best is None or (t[1], t[0]) > (best[1], best[0])):
                best = t
        return best

    def start(self, pool: tuple, active):
        """First group of the step led by a node of type ``active``."""
        d = dict(pool)
        _pool_add(d, active, -1)
        rest = _freeze(d)
        A, B = active
        b_rest = sorted((t[1] for t, c in rest for _ in range(c) if t[1] >= 1), reverse=True)
        length = len(b_rest) + 1
        z = self._z(rest, A, length)
        cap = min_prefix_from(z, b_rest, A)
        if cap is None:
            return None
        return self.normalize(rest, A, False, B, 1, cap - 1)

    @staticmethod
    def _z(pool, cp, length):
        z = [0] * length
        hist: dict[int, int] = {}
        for (A, _), c in pool:
            if A > 0:
                hist[A] = hist.get(A, 0) + c
        if cp > 0:
            hist[cp] = hist.get(cp, 0) + 1
        run = 0
        for d in range(max(max(hist, default=0), length), 0, -1):
            run += hist.get(d, 0)
            if d <= length:
                z[d - 1] = run
        return z

    def normalize(self, pool, cp, looped, rem, thr, reserve):
        if rem == 0:
            if not looped:
                return None
            return self.finish(pool, cp)
        alpha = None
        for (A, _), _c in pool:
            if A >= thr and (alpha is None or A < alpha):
                alpha = A
        if not looped and cp >= thr and (alpha is None or cp < alpha):
            alpha = cp
        if alpha is None:
            return None
        return (pool, cp, looped, rem, alpha, reserve)

    def finish(self, pool, cp):
        """Close the active node's step; None if the residual has no realization."""
        outs: list[int] = []
        ins: list[int] = []
        d: dict = {}
        if self.undirected:
            for (A, B), c in pool:
                # mirror: the counterpart hands back the edges it just received
                _pool_add(d, (A, A), c)
                outs.extend([A - 1] * c)
            if any(x < 0 for x in outs) or not erdos_gallai(outs):
                return None
        else:
            for (A, B), c in pool:
                if B >= 1:
                    outs.extend([A - 1] * c)
                    ins.extend([B - 1] * c)
                else:
                    outs.extend([A] * c)
                    ins.extend([0] * c)
                _pool_add(d, (A, B), c)
            outs.append(cp)
            ins.append(0)
            if any(x < 0 for x in outs) or not digraph_feasible(outs, ins):
                return None
            if cp > 0:
                _pool_add(d, (cp, 0))
        frozen = _freeze(d)
        if not any(t[1] >= 1 for t, _ in frozen):
            return TERMINAL if all(t[0] == 0 for t, _ in frozen) else None
        return (BOUNDARY, frozen)

    def step(self, key) -> GroupStep:
        pool, cp, looped, rem, alpha, reserve = key
        b_rest = sorted((t[1] for t, c in pool for _ in range(c) if t[1] >= 1), reverse=True)
        length = len(b_rest) + 1
        z = self._z(pool, cp, length)
        cap = min_prefix_from(z, b_rest, alpha)
        m = M = n_one = 0
        classes = []
        for t, c in pool:
            A, B = t
            if A == alpha:
                m += c
                # an unlooped degree-one node must keep its last unit for its own loop
                allowed = not (A == 1 and B >= 1)
                if not allowed:
                    n_one += c
                classes.append((t, c, allowed))
            elif A > alpha:
                M += c
        forced = not looped and cp == alpha
        if not looped:
            if cp == alpha:
                m += 1
                if alpha == 1:
                    n_one += 1
            elif cp > alpha:
                M += 1
        if cap is None:
            return GroupStep(alpha, 1, 0, m, M, rem, forced, tuple(classes))
        lo, hi = augmented_bounds(
            rem, m, M, cap, alpha == 1, None if looped else cp, alpha, n_one,
            reserve if (not looped and alpha < cp) else None,
        )
        return GroupStep(alpha, lo, hi, m, M, rem, forced, tuple(classes))

    def child(self, key, choice):
        """Apply ``choice`` = ``((type, taken), ...)`` within the current group."""
        pool, cp, looped, rem, alpha, reserve = key
        F = sum(x for _, x in choice)
        d = dict(pool)
        for (A, B), x in choice:
            if x:
                _pool_add(d, (A, B), -x)
                _pool_add(d, (A - 1, B), x)
        if not looped and cp == alpha:
            F += 1
            cp -= 1
            looped = True
            reserve = None
        elif not looped:
            reserve = reserve - F
        return self.normalize(_freeze(d), cp, looped, rem - F, alpha + 1, reserve)

    def choices(self, st: GroupStep, F: int):
        """Class-count vectors that take ``F`` nodes in this group."""
        need = F - (1 if st.forced else 0)
        if need < 0:
            return
        picks = [(t, c) for t, c, ok in st.classes if ok]
        yield from _compositions(picks, need)

    def options(self, key):
        """``(F, choice, multiplicity, child)`` for every admissible configuration class."""
        if key[0] == BOUNDARY:
            active = self.canonical_active(key[1])
            nxt = self.start(key[1], active)
            return [] if nxt is None else [(None, (), 1, nxt)]
        st = self.step(key)
        out = []
        for F in st.values:
            for choice in self.choices(st, F):
                nxt = self.child(key, choice)
                if nxt is None:
                    continue
                mult = 1
                for (_, c), (_, x) in zip([(t, c) for t, c, ok in st.classes if ok], choice):
                    mult *= comb(c, x)
                out.append((F, choice, mult, nxt))
        return out

    def expand(self, key, ctx=None):
        return [(mult, nxt, None) for _, _, mult, nxt in self.options(key)]


def _compositions(picks, need):
    """All ``((type, x), ...)`` with ``0 <= x <= count`` summing to ``need``."""
    if not picks:
        if need == 0:
            yield ()
        return
    caps = [c for _, c in picks]
    suffix = [0] * (len(caps) + 1)
    for i in range(len(caps) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]
    if need > suffix[0]:
        return

    def rec(i, left):
        if i == len(picks) - 1:
            yield ((picks[i][0], left),)
            return
        lo = max(0, left - suffix[i + 1])
        hi = min(caps[i], left)
        for x in range(lo, hi + 1):
            for rest in rec(i + 1, left - x):
                yield ((picks[i][0], x),) + rest

    yield from rec(0, need)


def make_mechanism(kind, a, b=None):
    kind = Kind.parse(kind)
    if kind is Kind.BIPARTITE:
        if b is None:
            raise ValueError("bipartite graphs need both a and b")
        return BipartiteMechanism(a, b)
    if kind is Kind.UNDIRECTED:
        if b is not None and list(b) != list(a):
            raise ValueError("undirected graphs take one sequence")
        return AugmentedMechanism(kind, a)
    if b is None:
        raise ValueError("directed graphs need both a and b")
    return AugmentedMechanism(kind, a, b)


__all__ = [
    "TERMINAL",
    "BOUNDARY",
    "AugmentedMechanism",
    "BipartiteMechanism",
    "GroupStep",
    "make_mechanism",
    "min_prefix_from",
]
