"""Weighted sequential samplers and importance-sampling estimators.

Uniform samplers weight each admissible choice by the exact number of graphs
that complete it, so every realization is equally likely. Efficient
samplers replace that count with a closed-form binomial product that needs
no table; the log-probability of each draw is recorded so the bias can be
corrected by importance weights.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import comb, log
from typing import Sequence

import numpy as np

from .core import Graph, Kind
from .count import CountTable, build_table
from .errors import EmptyInput, Infeasible, InfeasibleState
from .mechanism import BOUNDARY, TERMINAL, AugmentedMechanism, BipartiteMechanism, make_mechanism

MAX_RESTARTS = 1_000_000
# transitions are memoized per state up to this many states
_TRANSITION_CACHE = 2_000_000


def make_rng(seed: int = 0, worker: int = 0) -> random.Random:
    """Independent substream ``worker`` of the generator seeded by ``seed``."""
    state = np.random.SeedSequence([int(seed), int(worker)]).generate_state(4, dtype=np.uint64)
    return random.Random(int.from_bytes(b"".join(int(x).to_bytes(8, "big") for x in state), "big"))


def weighted_index(rng: random.Random, cum: Sequence[int]) -> int:
    """Index drawn with probability proportional to the increments of ``cum``.

    The draw is an exact integer below the total, so no rounding enters.
    """
    u = rng.randrange(cum[-1])
    return bisect_right(cum, u)


def _cumulative(weights):
    cum = []
    run = 0
    for w in weights:
        run += w
        cum.append(run)
    return cum


def _log_ratio(num: int, den: int) -> float:
    q = num / den
    return log(q) if q > 0.0 else log(num) - log(den)


def _buckets(degrees) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i, d in enumerate(degrees):
        if d > 0:
            out.setdefault(d, []).append(i)
    return out


def _step_arrays(counts, bs, j):
    """Suffix minima of the capacity prefix sums and the count of nodes above each degree."""
    length = len(bs) - j
    top = len(counts) - 1
    above = [0] * (top + 2)
    run = 0
    for d in range(top, 0, -1):
        above[d] = run
        run += counts[d]
    above[0] = run
    sufmin = [0] * (length + 2)
    prefix = [0] * (length + 1)
    acc = 0
    for h in range(1, length + 1):
        # left nodes with residual degree at least h
        z = above[h] + counts[h] if h <= top else 0
        acc += z - (bs[j + h] if j + h < len(bs) else 0)
        prefix[h] = acc
    best = None
    for h in range(length, 0, -1):
        if best is None or prefix[h] < best:
            best = prefix[h]
        sufmin[h] = best
    return sufmin, above


def _pick(randrange, group: list, F: int) -> list:
    """Remove and return ``F`` uniformly chosen entries of ``group``."""
    n = len(group)
    for t in range(F):
        r = randrange(n - t)
        last = n - 1 - t
        group[r], group[last] = group[last], group[r]
    chosen = group[n - F:]
    del group[n - F:]
    return chosen


@dataclass(frozen=True)
class SampleTrace:
    graph: Graph
    log_prob: float
    resample_count: int = 0


class _Sampler:
    kind: Kind
    uniform: bool

    def __init__(self, kind, a, b=None):
        self.kind = Kind.parse(kind)
        self.a = list(a)
        self.b = None if self.kind is Kind.UNDIRECTED else (None if b is None else list(b))
        self.mechanism = make_mechanism(self.kind, self.a, self.b)
        if not self.mechanism.feasible:
            raise Infeasible(f"no {self.kind.value} graph realizes the given degrees")

    def sample(self, rng: random.Random) -> SampleTrace:
        if isinstance(self.mechanism, BipartiteMechanism):
            return self._sample_bipartite(rng)
        return self._sample_augmented(rng)

    def sample_many(self, n: int, seed: int = 0, worker: int = 0) -> list[SampleTrace]:
        rng = make_rng(seed, worker)
        return [self.sample(rng) for _ in range(n)]

    # subclasses fill these in
    def _bipartite_weights(self, key, st, ctx, options):  # pragma: no cover
        raise NotImplementedError

    def _augmented_weights(self, key, st, options):  # pragma: no cover
        raise NotImplementedError


class UniformSampler(_Sampler):
    """Draws each realization with probability exactly one over the space size."""

    uniform = True

    def __init__(self, kind, a, b=None, table: CountTable | None = None):
        super().__init__(kind, a, b)
        if table is None:
            table = build_table(self.a, self.b, self.kind)
        elif not table.matches(self.kind, self.a, self.b):
            raise ValueError("count table was built for a different instance")
        self.table = table
        if table.total == 0:
            raise Infeasible("the graph space is empty")
        self._cache: dict = {}

    @property
    def total(self) -> int:
        return self.table.total

    def _transitions(self, key, ctx=None):
        got = self._cache.get(key)
        if got is not None:
            return got
        mech = self.mechanism
        table = self.table
        if isinstance(mech, BipartiteMechanism):
            opts = mech.options(key, ctx)
            weights = [mult * table[nxt] for _, mult, nxt in opts]
        else:
            opts = mech.options(key)
            weights = [mult * table[nxt] for _, _, mult, nxt in opts]
        keep = [(o, w) for o, w in zip(opts, weights) if w]
        got = ([o for o, _ in keep], _cumulative([w for _, w in keep]))
        if len(self._cache) < _TRANSITION_CACHE:
            self._cache[key] = got
        return got

    def _sample_bipartite(self, rng):
        mech = self.mechanism
        key = mech.root()
        buckets = _buckets(mech.a)
        edges = []
        logp = 0.0
        ctx = None
        randrange = rng.randrange
        while key is not TERMINAL:
            j, rem, alpha, counts = key
            if ctx is None or ctx[0] != j:
                ctx = mech.context(key)
            opts, cum = self._transitions(key, ctx)
            idx = bisect_right(cum, randrange(cum[-1])) if len(cum) > 1 else 0
            F, mult, nxt = opts[idx]
            w = cum[idx] - (cum[idx - 1] if idx else 0)
            logp += _log_ratio(w // mult, cum[-1])
            if F:
                bnode = mech.order[j]
                chosen = _pick(randrange, buckets[alpha], F)
                if alpha > 1:
                    buckets.setdefault(alpha - 1, []).extend(chosen)
                for i in chosen:
                    edges.append((i, bnode))
            key = nxt
        return SampleTrace(Graph.from_edges(Kind.BIPARTITE, edges, len(mech.a), len(mech.b)), logp)

    def _sample_augmented(self, rng):
        walker = _AugmentedWalk(self.mechanism)
        logp = 0.0
        key = walker.begin()
        while key is not TERMINAL:
            if key[0] == BOUNDARY:
                key = walker.next_step(key)
                continue
            opts, cum = self._transitions(key)
            idx = weighted_index(rng, cum)
            F, choice, mult, nxt = opts[idx]
            w = cum[idx] - (cum[idx - 1] if idx else 0)
            logp += log(w) - log(cum[-1]) - log(mult)
            walker.take_classes(key, choice, rng)
            key = walker.advance(key, nxt)
        return SampleTrace(walker.graph(), logp)

    def probability(self, g: Graph) -> Fraction:
        """Exact chance that one draw returns ``g``."""
        return _replay(self, g)


class EfficientSampler(_Sampler):
    """Draws with closed-form weights; no count table is needed."""

    uniform = False

    def __init__(self, kind, a, b=None, max_restarts: int = MAX_RESTARTS):
        super().__init__(kind, a, b)
        self.max_restarts = max_restarts

    @staticmethod
    def weights(st) -> list[int]:
        """Binomial proxy for the number of completions of each F in range."""
        return [comb(st.m, F) * comb(st.M + st.m - F, st.rem - F) for F in st.values]

    def _sample_bipartite(self, rng):
        mech = self.mechanism
        counts = list(mech.initial_counts())
        buckets = _buckets(mech.a)
        edges = []
        logp = 0.0
        top = len(counts) - 1
        bs = mech.bs
        nb = len(bs)
        randrange = rng.randrange
        for j in range(nb):
            bnode = mech.order[j]
            rem0 = rem = bs[j]
            sufmin, above = _step_arrays(counts, bs, j)
            length = nb - j
            alpha = 1
            while rem:
                while alpha <= top and not counts[alpha]:
                    alpha += 1
                if alpha > top or alpha > length:
                    raise InfeasibleState(f"no group left for right node {bnode}")
                m = counts[alpha]
                M = above[alpha]
                lo = rem - M if rem > M else 0
                hi = sufmin[alpha] - (rem0 - rem)
                if hi > m:
                    hi = m
                if lo > hi:
                    raise InfeasibleState(f"empty interval at degree {alpha}")
                # a member set of size F has weight C(M + m - F, rem - F)
                if lo == hi:
                    F = lo
                    if F and F != m:
                        logp -= log(comb(m, F))
                else:
                    cum = []
                    total = 0
                    for f in range(lo, hi + 1):
                        total += comb(m, f) * comb(M + m - f, rem - f)
                        cum.append(total)
                    F = lo + bisect_right(cum, randrange(total))
                    logp += _log_ratio(comb(M + m - F, rem - F), total)
                if F:
                    group = buckets[alpha]
                    size = len(group)
                    for t in range(F):
                        r = randrange(size - t)
                        last = size - 1 - t
                        group[r], group[last] = group[last], group[r]
                    chosen = group[size - F:]
                    del group[size - F:]
                    if alpha > 1:
                        buckets.setdefault(alpha - 1, []).extend(chosen)
                    for i in chosen:
                        edges.append((i, bnode))
                    counts[alpha] -= F
                    if alpha > 1:
                        counts[alpha - 1] += F
                    rem -= F
                alpha += 1
        return SampleTrace(Graph.from_edges(Kind.BIPARTITE, edges, len(mech.a), len(mech.b)), logp)

    def _sample_augmented(self, rng):
        mech = self.mechanism
        for attempt in range(self.max_restarts + 1):
            walker = _AugmentedWalk(mech)
            logp = 0.0
            key = walker.begin()
            while key is not None and key is not TERMINAL:
                if key[0] == BOUNDARY:
                    key = walker.next_step(key)
                    continue
                st = mech.step(key)
                if st.lo > st.hi:
                    key = None
                    break
                ws = self.weights(st)
                cum = _cumulative(ws)
                if cum[-1] == 0:
                    key = None
                    break
                idx = weighted_index(rng, cum)
                F = st.lo + idx
                need = F - (1 if st.forced else 0)
                eligible = st.eligible
                if need > eligible:
                    key = None
                    break
                logp += log(ws[idx]) - log(cum[-1]) - log(comb(eligible, need))
                choice = walker.take_uniform(key, st, need, rng)
                key = walker.advance(key, mech.child(key, choice))
            if key is TERMINAL:
                return SampleTrace(walker.graph(), logp, attempt)
        raise Infeasible(f"no draw accepted after {self.max_restarts} restarts")

    def probability(self, g: Graph) -> Fraction:
        """Chance that a single attempt produces ``g`` (restarts not folded in)."""
        return _replay(self, g)


class _AugmentedWalk:
    """Labeled state riding along a canonical augmented key."""

    def __init__(self, mech: AugmentedMechanism):
        self.mech = mech
        self.n = mech.n
        self.A = [x + 1 for x in mech.out_deg]
        self.B = [x + 1 for x in mech.in_deg]
        self.edges: list = []
        self.active = None

    def begin(self):
        return self.mech.root()

    def next_step(self, key):
        B = self.B
        self.active = min((i for i in range(self.n) if B[i] >= 1), key=lambda i: (-B[i], i))
        return self.mech.start(key[1], (self.A[self.active], B[self.active]))

    def members(self, alpha):
        out: dict = {}
        A, B, act = self.A, self.B, self.active
        for i in range(self.n):
            if i != act and A[i] == alpha:
                out.setdefault((A[i], B[i]), []).append(i)
        return out

    def _connect(self, key, picked):
        pool, cp, looped, rem, alpha, _ = key
        act = self.active
        for i in picked:
            self.A[i] -= 1
            if self.mech.undirected:
                self.edges.append((min(i, act), max(i, act)))
            else:
                self.edges.append((i, act))
        if not looped and cp == alpha:
            self.A[act] -= 1

    def take_classes(self, key, choice, rng):
        groups = self.members(key[4])
        picked = []
        for t, x in choice:
            if x:
                picked.extend(rng.sample(groups[t], x))
        self._connect(key, picked)

    def take_uniform(self, key, st, need, rng):
        groups = self.members(key[4])
        allowed = [t for t, _, ok in st.classes if ok]
        flat = [i for t in allowed for i in groups.get(t, ())]
        picked = rng.sample(flat, need) if need else []
        tally: dict = {}
        for i in picked:
            t = (self.A[i], self.B[i])
            tally[t] = tally.get(t, 0) + 1
        self._connect(key, picked)
        return tuple((t, tally.get(t, 0)) for t in allowed)

    def advance(self, key, nxt):
        if nxt is None:
            return None
        if nxt is TERMINAL or nxt[0] == BOUNDARY:
            act = self.active
            if self.mech.undirected:
                for i in range(self.n):
                    if self.A[i] < self.B[i]:
                        self.B[i] = self.A[i]
                self.A[act] = self.B[act] = 0
            else:
                self.B[act] = 0
        return nxt

    def graph(self) -> Graph:
        return Graph.from_edges(self.mech.kind, self.edges, self.n, self.n)


def _replay(sampler: _Sampler, g: Graph) -> Fraction:
    """Follow the unique path that builds ``g`` and multiply the choice probabilities."""
    mech = sampler.mechanism
    edge_set = set(g.edges)
    prob = Fraction(1)
    if isinstance(mech, BipartiteMechanism):
        key = mech.root()
        resid = list(mech.a)
        while key is not TERMINAL:
            if key is None:
                return Fraction(0)
            j, rem, alpha, counts = key
            bnode = mech.order[j]
            members = [i for i, r in enumerate(resid) if r == alpha]
            chosen = [i for i in members if (i, bnode) in edge_set]
            F = len(chosen)
            st = mech.step(key)
            if F not in st.values:
                return Fraction(0)
            if sampler.uniform:
                opts = mech.options(key)
                weights = {f: mult * sampler.table[nxt] for f, mult, nxt in opts}
            else:
                weights = dict(zip(st.values, EfficientSampler.weights(st)))
            total = sum(weights.values())
            if not weights.get(F):
                return Fraction(0)
            prob *= Fraction(weights[F], total) / comb(st.m, F)
            for i in chosen:
                resid[i] -= 1
            key = mech.child(key, F)
        return prob

    walker = _AugmentedWalk(mech)
    key = walker.begin()
    while key is not TERMINAL:
        if key is None:
            return Fraction(0)
        if key[0] == BOUNDARY:
            key = walker.next_step(key)
            continue
        act = walker.active
        st = mech.step(key)
        groups = walker.members(key[4])
        allowed = [t for t, _, ok in st.classes if ok]

        def linked(i):
            if mech.undirected:
                return (min(i, act), max(i, act)) in edge_set
            return (i, act) in edge_set

        chosen = {t: [i for i in groups.get(t, ()) if linked(i)] for t, _, _ in st.classes}
        if any(chosen[t] for t, _, ok in st.classes if not ok):
            return Fraction(0)
        choice = tuple((t, len(chosen[t])) for t in allowed)
        need = sum(x for _, x in choice)
        F = need + (1 if st.forced else 0)
        if sampler.uniform:
            opts = mech.options(key)
            total = sum(mult * sampler.table[nxt] for _, _, mult, nxt in opts)
            hit = [(mult, nxt) for _, ch, mult, nxt in opts if ch == choice]
            if not hit:
                return Fraction(0)
            mult, nxt = hit[0]
            prob *= Fraction(sampler.table[nxt], total)
        else:
            if F not in st.values:
                return Fraction(0)
            ws = EfficientSampler.weights(st)
            prob *= Fraction(ws[F - st.lo], sum(ws)) / comb(st.eligible, need)
            nxt = mech.child(key, choice)
        walker._connect(key, [i for t in allowed for i in chosen[t]])
        key = walker.advance(key, nxt)
    return prob


def make_sampler(kind, algo, a, b=None, table: CountTable | None = None, **kw) -> _Sampler:
    algo = str(algo).lower()
    if algo == "uniform":
        return UniformSampler(kind, a, b, table)
    if algo == "efficient":
        return EfficientSampler(kind, a, b, **kw)
    raise ValueError(f"unknown algorithm {algo!r}")


def sample_bipartite_uniform(a, b, rng, table=None) -> SampleTrace:
    return UniformSampler(Kind.BIPARTITE, a, b, table).sample(rng)


def sample_bipartite_efficient(a, b, rng) -> SampleTrace:
    return EfficientSampler(Kind.BIPARTITE, a, b).sample(rng)


def sample_directed_uniform(a, b, rng, table=None) -> SampleTrace:
    return UniformSampler(Kind.DIRECTED, a, b, table).sample(rng)


def sample_directed_efficient(a, b, rng) -> SampleTrace:
    return EfficientSampler(Kind.DIRECTED, a, b).sample(rng)


def sample_undirected_uniform(d, rng, table=None) -> SampleTrace:
    return UniformSampler(Kind.UNDIRECTED, d, None, table).sample(rng)


def sample_undirected_efficient(d, rng) -> SampleTrace:
    return EfficientSampler(Kind.UNDIRECTED, d).sample(rng)


def _worker(args):
    kind, algo, a, b, n, seed, worker, table = args
    return make_sampler(kind, algo, a, b, table).sample_many(n, seed, worker)


def sample_many(kind, algo, a, b=None, n: int = 1, seed: int = 0, workers: int = 1,
                table: CountTable | None = None) -> list[SampleTrace]:
    """``n`` draws; worker ``w`` uses substream ``(seed, w)`` and results keep worker order."""
    if workers <= 1:
        return make_sampler(kind, algo, a, b, table).sample_many(n, seed, 0)
    from concurrent.futures import ProcessPoolExecutor

    sizes = [n // workers + (1 if w < n % workers else 0) for w in range(workers)]
    jobs = [(kind, algo, a, b, sizes[w], seed, w, table) for w in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_worker, jobs))
    return [t for part in parts for t in part]


@dataclass(frozen=True)
class EstimateResult:
    theta_hat: float
    theta_tilde: float | None
    n_samples: int
    effective_sample_size: float
    se_hat: float
    se_tilde: float | None


def importance_estimate(traces, f_values, total: int | None = None) -> EstimateResult:
    """Reweight draws by ``1 / (|G| p_G)`` to estimate the uniform mean of ``f``.

    The ratio estimate needs no space size. ``total`` enables the unbiased
    plain average as well.
    """
    log_probs = [t.log_prob if isinstance(t, SampleTrace) else float(t) for t in traces]
    f = np.asarray(list(f_values), dtype=float)
    n = len(log_probs)
    if n == 0:
        raise EmptyInput("no samples to estimate from")
    if len(f) != n:
        raise ValueError("f_values must align with traces")
    lw = -np.asarray(log_probs, dtype=float)
    shift = lw.max()
    w = np.exp(lw - shift)
    sw = w.sum()
    theta_hat = float((w * f).sum() / sw)
    se_hat = float(math.sqrt(((w * (f - theta_hat)) ** 2).sum()) / sw)
    ess = float(sw**2 / (w**2).sum())
    theta_tilde = se_tilde = None
    if total is not None:
        full = np.exp(lw - math.log(total))
        vals = full * f
        theta_tilde = float(vals.mean())
        se_tilde = float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EstimateResult(theta_hat, theta_tilde, n, ess, se_hat, se_tilde)
