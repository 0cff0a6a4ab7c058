"""End-to-end acceptance checks, one test per criterion.

Each test prints a pass/fail line at the end of the run (see conftest.py).
Runtime is dominated by criteria 1, 8 and 11, a few minutes each.
"""

import gc
import math
import random
import statistics
import time
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from degseq.core import validate_graph
from degseq.count import build_table, count, count_bipartite, count_directed, count_undirected
from degseq.enumerate import brute_force, collect, enumerate_bipartite
from degseq.errors import BudgetExceeded, InfeasibleState
from degseq.feasibility import ConnectionState, bipartite_interval, digraph_feasible, erdos_gallai, gale_ryser
from degseq.mechanism import TERMINAL, BipartiteMechanism
from degseq.metrics import Histogram, bipartite_family, coverage, growth_exponent, kl_uniform
from degseq.sample import EfficientSampler, UniformSampler, importance_estimate, make_rng

from oracles import (
    EXAMPLE1_BIPARTITE,
    EXAMPLE1_DIRECTED,
    EXAMPLE1_UNDIRECTED,
    INTERBANK_1,
    TABLE1,
    TABLE4,
    TABLE7,
    group_completable,
    random_instance,
)


@pytest.mark.criterion(1, "exact bipartite counts by counting and enumeration")
def test_bipartite_reference_counts(note):
    for row, (a, b, expected) in enumerate(TABLE1):
        limit = 60 if row < 4 else 15 * 60
        t = time.perf_counter()
        assert count_bipartite(a, b) == expected
        # depth-first keeps memory flat on the two largest spaces
        assert enumerate_bipartite(a, b, dfs=True) == expected
        dt = time.perf_counter() - t
        assert dt < limit, f"row {row + 1} took {dt:.1f}s"
        note(f"{expected}: {dt:.1f}s")


@pytest.mark.criterion(2, "exact directed counts")
def test_directed_reference_counts(note):
    for s, expected in TABLE4:
        got = count_directed(s, s)
        assert got == expected
    note(", ".join(str(n) for _, n in TABLE4))


@pytest.mark.criterion(3, "exact undirected counts")
def test_undirected_reference_counts(note):
    for s, expected in TABLE7:
        assert count_undirected(s) == expected
    note(", ".join(str(n) for _, n in TABLE7))


@pytest.mark.criterion(4, "small example reproduces 5 / 1 / 1 realizations with the drawn edge sets")
def test_small_example():
    a = [2, 1, 1]
    bip = [g.key for g in collect("bipartite", a, a)]
    assert len(bip) == 5 and set(bip) == EXAMPLE1_BIPARTITE
    dg = [g.key for g in collect("directed", a, a)]
    assert len(dg) == 1 and set(dg) == EXAMPLE1_DIRECTED
    ug = [g.key for g in collect("undirected", a)]
    assert len(ug) == 1 and set(ug) == EXAMPLE1_UNDIRECTED


@pytest.mark.criterion(5, "enumeration, brute force and count agree on random instances with sides <= 6")
def test_oracle_equivalence(note):
    rng = random.Random(2024)
    tested = Counter()
    skipped = 0
    while min(tested[k] for k in ("bipartite", "directed", "undirected")) < 70:
        kind = rng.choice(["bipartite", "directed", "undirected"])
        a, b = random_instance(rng, kind, max_side=6)
        try:
            oracle = []
            brute_force(a, b, kind, oracle.append, budget=300_000)
        except BudgetExceeded:
            skipped += 1
            continue
        got = collect(kind, a, b)
        keys = [g.key for g in got]
        assert len(keys) == len(set(keys))
        assert set(keys) == {g.key for g in oracle}
        assert len(keys) == count(kind, a, b)
        tested[kind] += 1
    assert sum(tested.values()) >= 200
    note(f"{dict(tested)} instances, {skipped} over brute-force budget")


def _sorted_seqs(length, top):
    return [list(c) for c in combinations_with_replacement(range(top, 0, -1), length)]


def _small_spaces(limit=50):
    """Instances of each kind whose graph space is nonempty and at most ``limit`` graphs."""
    for m in range(1, 5):
        for n in range(1, 5):
            for a in _sorted_seqs(m, n):
                for b in _sorted_seqs(n, m):
                    if sum(a) == sum(b) and gale_ryser(a, b):
                        yield "bipartite", a, b
    types = [(o, i) for o in range(4) for i in range(4)]
    for n in range(2, 5):
        for combo in combinations_with_replacement(types, n):
            a = [o for o, _ in combo]
            b = [i for _, i in combo]
            if max(a) < n and max(b) < n and digraph_feasible(a, b):
                yield "directed", a, b
    for n in range(2, 7):
        for d in _sorted_seqs(n, n - 1):
            if erdos_gallai(d):
                yield "undirected", d, None
    # unsorted labelings and the reference instances
    yield "bipartite", [1, 3, 2, 3, 3], [1, 5, 2, 3, 1]
    yield "directed", [1, 2, 1, 2, 1], [2, 1, 1, 1, 2]
    yield "undirected", [1, 2, 2, 1, 2, 2], None
    yield "bipartite", [3, 3, 3, 2, 1], [5, 3, 2, 1, 1]
    yield "directed", [2, 2, 1, 1, 1], [2, 2, 1, 1, 1]
    yield "undirected", [2, 2, 2, 2, 1, 1], None


@pytest.mark.criterion(6, "uniform samplers give every graph probability exactly 1/|G| when |G| <= 50")
def test_exact_uniformity(note):
    checked = Counter()
    for kind, a, b in _small_spaces():
        n = count(kind, a, b)
        if not 0 < n <= 50:
            continue
        sampler = UniformSampler(kind, a, b)
        for g in collect(kind, a, b, dfs=True):
            assert sampler.probability(g) == Fraction(1, n)
        checked[kind] += 1
    note(f"{dict(checked)} instances")


FIRST_INSTANCES = [
    ("bipartite", [3, 3, 3, 2, 1], [5, 3, 2, 1, 1], 2.72e-3),
    ("directed", [2, 2, 1, 1, 1], [2, 2, 1, 1, 1], 3.88e-3),
    ("undirected", [2, 2, 2, 2, 1, 1], None, 3.38e-3),
]


@pytest.mark.criterion(7, "uniform KL within 3x the reference and below the efficient sampler's")
def test_empirical_uniformity(note):
    for kind, a, b, ref in FIRST_INSTANCES:
        support = count(kind, a, b)
        kls = []
        for cls in (UniformSampler, EfficientSampler):
            sampler = cls(kind, a, b)
            rng = make_rng(0)
            h = Histogram.of((sampler.sample(rng).graph for _ in range(5000)), support)
            kls.append(kl_uniform(h))
        uniform_kl, efficient_kl = kls
        note(f"{kind} {uniform_kl:.2e} vs {efficient_kl:.2e}")
        assert uniform_kl <= 3 * ref
        assert efficient_kl > uniform_kl


@pytest.mark.criterion(8, "coverage of the 15,732-graph space: 95% +/- 2 points at 55k (uniform) and 60k (efficient)")
def test_coverage(note):
    a, b = [7, 7, 6, 5, 4, 3, 2, 2], [7, 7, 6, 5, 4, 3, 3, 1]
    support = 15732
    uni = UniformSampler("bipartite", a, b)
    eff = EfficientSampler("bipartite", a, b)
    assert uni.total == support
    means = {}
    for name, sampler, draws in (("uniform", uni, 55_000), ("efficient", eff, 60_000)):
        ratios = []
        for rep in range(20):
            rng = make_rng(rep, 0)
            seen = {sampler.sample(rng).graph.edges for _ in range(draws)}
            ratios.append(coverage(Histogram(Counter(dict.fromkeys(seen, 1)), support)))
        means[name] = statistics.fmean(ratios)
        note(f"{name} mean {100 * means[name]:.2f}% (sd {100 * statistics.stdev(ratios):.2f})")
    assert means["uniform"] >= 0.93
    assert means["efficient"] >= 0.93


@pytest.mark.criterion(9, "importance-sampling estimates recover 1/5 within 3 standard errors at N = 50,000")
def test_importance_sampling(note):
    a = [2, 1, 1]
    sampler = EfficientSampler("bipartite", a, a)
    target = collect("bipartite", a, a)[0].key
    traces = sampler.sample_many(50_000, seed=0)
    f = [1.0 if t.graph.key == target else 0.0 for t in traces]
    res = importance_estimate(traces, f, total=5)
    note(f"hat {res.theta_hat:.4f} (se {res.se_hat:.4f}), tilde {res.theta_tilde:.4f} (se {res.se_tilde:.4f})")
    assert abs(res.theta_hat - 0.2) <= 3 * res.se_hat
    assert abs(res.theta_tilde - 0.2) <= 3 * res.se_tilde


def _reachable(a, b):
    mech = BipartiteMechanism(a, b)
    seen = set()
    todo = [mech.root()]
    while todo:
        key = todo.pop()
        if key is None or key is TERMINAL or key in seen:
            continue
        seen.add(key)
        for _, _, nxt in mech.options(key):
            todo.append(nxt)
    return mech, seen


@pytest.mark.criterion(10, "interval membership equals brute-force completability on every state, sides <= 6")
def test_interval_exactness(note):
    instances = states = 0
    for m in range(1, 7):
        for n in range(1, 7):
            by_sum: dict = {}
            for b in _sorted_seqs(n, m):
                by_sum.setdefault(sum(b), []).append(b)
            for a in _sorted_seqs(m, n):
                for b in by_sum.get(sum(a), []):
                    if not gale_ryser(a, b):
                        continue
                    instances += 1
                    mech, seen = _reachable(a, b)
                    for j, rem, alpha, counts in seen:
                        states += 1
                        a_state = [d for d in range(len(counts)) for _ in range(counts[d])]
                        b_rest = list(mech.bs[j + 1:])
                        try:
                            allowed = set(bipartite_interval(ConnectionState.build(a_state, rem, b_rest, alpha)))
                        except InfeasibleState:
                            allowed = set()
                        good = {F for F in range(counts[alpha] + 1)
                                if group_completable(list(counts), alpha, F, rem, b_rest)}
                        assert allowed == good, (a, b, j, rem, alpha, counts)
    note(f"{instances} instances, {states} states, 0 counterexamples")


def _round(sampler, rng, min_draws=3, min_seconds=0.25):
    draws = 0
    t = time.perf_counter()
    while draws < min_draws or time.perf_counter() - t < min_seconds:
        sampler.sample(rng)
        draws += 1
    return (time.perf_counter() - t) / draws


def _interleaved_medians(samplers, rounds=7, seed=0):
    """Median per-draw time of each sampler over alternating timing rounds."""
    rngs = [make_rng(seed, w) for w in range(len(samplers))]
    for s, rng in zip(samplers, rngs):
        _round(s, rng, min_draws=1, min_seconds=0.1)
    times = [[] for _ in samplers]
    for _ in range(rounds):
        for i, (s, rng) in enumerate(zip(samplers, rngs)):
            times[i].append(_round(s, rng))
    return [statistics.median(t) for t in times]


@pytest.mark.criterion(11, "per-draw time on the scaling family grows polynomially to n = 200; efficient never slower")
def test_scaling_shape(note):
    ns = [10, 25, 50, 100, 150, 200]
    uni_t, eff_t = [], []
    for n in ns:
        a, b = bipartite_family(n)
        uni = UniformSampler("bipartite", a, b)
        eff = EfficientSampler("bipartite", a, b)
        u, e = _interleaved_medians([uni, eff])
        uni_t.append(u)
        eff_t.append(e)
        note(f"n={n}: uniform {1e3 * u:.2f}ms efficient {1e3 * e:.2f}ms")
        del uni
        gc.collect()
    for u, e in zip(uni_t, eff_t):
        assert math.isfinite(u) and math.isfinite(e)
        assert e <= u
    gu, ge = growth_exponent(ns, uni_t), growth_exponent(ns, eff_t)
    note(f"log-log slope uniform {gu:.2f}, efficient {ge:.2f}")
    assert 0 < gu <= 4
    assert 0 < ge <= 4


@pytest.mark.criterion(12, "interbank-scale count exceeds 1e20 and both bipartite samplers give 10,000 valid draws")
def test_interbank(note):
    a = list(INTERBANK_1)
    table = build_table(a, a)
    assert table.total > 10**20
    uni = UniformSampler("bipartite", a, a, table)
    eff = EfficientSampler("bipartite", a, a)
    for sampler in (uni, eff):
        rng = make_rng(0)
        for _ in range(10_000):
            assert validate_graph(sampler.sample(rng).graph, a, a)
    note(f"count {table.total}")
