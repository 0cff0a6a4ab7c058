"""Uniformity and coverage diagnostics, plus the runtime benchmark harness."""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from .core import Graph, Kind, canonical_key
from .errors import UnknownSupport


@dataclass
class Histogram:
    """Occurrence counts of sampled graphs keyed by their canonical edge tuple."""

    counts: Counter = field(default_factory=Counter)
    support: int | None = None

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def add(self, g) -> None:
        self.counts[canonical_key(g) if isinstance(g, Graph) else g] += 1

    def update(self, graphs: Iterable) -> "Histogram":
        for g in graphs:
            self.add(g)
        return self

    def merge(self, other: "Histogram") -> "Histogram":
        if self.support is not None and other.support is not None and self.support != other.support:
            raise ValueError("histograms over different supports")
        support = self.support if self.support is not None else other.support
        return Histogram(self.counts + other.counts, support)

    @classmethod
    def of(cls, graphs: Iterable, support: int | None = None) -> "Histogram":
        return cls(Counter(), support).update(graphs)

    def _need_support(self) -> int:
        if self.support is None:
            raise UnknownSupport("the size of the graph space is needed")
        if self.support < 1:
            raise UnknownSupport("support must be at least 1")
        if self.distinct > self.support:
            raise ValueError(f"{self.distinct} distinct graphs exceed the support {self.support}")
        return self.support


def cv(h: Histogram) -> float:
    """Standard deviation over mean of per-graph counts, unseen graphs counted as zero."""
    support = h._need_support()
    total = h.total
    if total == 0:
        raise ValueError("empty histogram")
    mean = total / support
    sq = sum(c * c for c in h.counts.values())
    var = sq / support - mean * mean
    return math.sqrt(max(var, 0.0)) / mean


def kl_uniform(h: Histogram) -> float:
    """KL divergence in nats of the empirical distribution from uniform on the support."""
    support = h._need_support()
    total = h.total
    if total == 0:
        raise ValueError("empty histogram")
    out = 0.0
    for c in h.counts.values():
        p = c / total
        out += p * math.log(p * support)
    return max(out, 0.0)


def coverage(h: Histogram) -> float:
    """Fraction of the graph space seen at least once."""
    support = h._need_support()
    return h.distinct / support


@dataclass(frozen=True)
class MetricsReport:
    cv: float
    kl: float
    coverage: float
    distinct: int
    total: int
    support: int
    kl_units: str = "nats"

    def to_dict(self) -> dict:
        return asdict(self)


def report(h: Histogram) -> MetricsReport:
    support = h._need_support()
    if h.total == 0:
        return MetricsReport(0.0, 0.0, 0.0, 0, 0, support)
    return MetricsReport(cv(h), kl_uniform(h), coverage(h), h.distinct, h.total, support)


# benchmark families


def bipartite_family(n: int) -> tuple[list[int], list[int]]:
    """``a = b = (n-1, n-1, n-2, ..., 2, 1)`` for ``n >= 3``."""
    if n < 3:
        raise ValueError("the bipartite family starts at n = 3")
    a = [n - 1] + list(range(n - 1, 0, -1))
    return a, list(a)


def directed_family(n: int) -> tuple[list[int], list[int]]:
    """``a = (n-2, 1, 1, 2, ..., n-2)`` and ``b = (n-1, n-3, n-3, ..., 2, 1, 1)`` for ``n >= 4``."""
    if n < 4:
        raise ValueError("the directed family starts at n = 4")
    a = [n - 2, 1] + list(range(1, n - 1))
    b = [n - 1, n - 3] + list(range(n - 3, 0, -1)) + [1]
    return a, b


def undirected_family(n: int) -> list[int]:
    """Two hubs, ``c - 1`` nodes of degree ``c`` and ``l`` leaves, ``l = floor(log2 n)``."""
    if n < 8:
        raise ValueError("the undirected family starts at n = 8")
    l = int(math.floor(math.log2(n)))
    c = n - l - 1
    up = (l + 1) // 2
    return [c + up, c + (l - up)] + [c] * (c - 1) + [1] * l


FAMILIES = {"bip": Kind.BIPARTITE, "dir": Kind.DIRECTED, "undir": Kind.UNDIRECTED}


def family_instance(family: str, n: int):
    """``(kind, a, b)`` for member ``n`` of a built-in family."""
    if family == "bip":
        a, b = bipartite_family(n)
        return Kind.BIPARTITE, a, b
    if family == "dir":
        a, b = directed_family(n)
        return Kind.DIRECTED, a, b
    if family == "undir":
        return Kind.UNDIRECTED, undirected_family(n), None
    raise ValueError(f"unknown family {family!r}")


def load_custom(path) -> list[tuple[int, Kind, list[int], list[int] | None]]:
    """Instances from a JSON list of ``{"n", "kind", "a", "b"}`` records."""
    with open(path) as fh:
        rows = json.load(fh)
    out = []
    for i, row in enumerate(rows):
        kind = Kind.parse(row.get("kind", "bipartite"))
        a = list(row["a"])
        b = None if kind is Kind.UNDIRECTED else list(row.get("b", a))
        out.append((int(row.get("n", i)), kind, a, b))
    return out


@dataclass(frozen=True)
class BenchRow:
    family: str
    n: int
    algo: str
    reps: int
    mean_s: float
    sd_s: float
    setup_s: float


def _time(fn: Callable[[], object]) -> float:
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t


def bench(family: str, ns: Iterable[int], algos=("uniform", "efficient"), reps: int = 5, seed: int = 0,
          include_setup: bool = False, custom=None, draws: int = 1) -> list[BenchRow]:
    """Per-draw wall-clock times over ``reps`` replications for each ``n`` and algorithm.

    The uniform sampler's count table is built once per ``n``; its time is
    reported as ``setup_s`` and only folded into the per-draw figure with
    ``include_setup``.
    """
    from .sample import EfficientSampler, UniformSampler, make_rng

    if family == "custom":
        instances = list(custom or [])
    else:
        instances = [(n, *family_instance(family, n)) for n in ns]
    rows = []
    for n, kind, a, b in instances:
        for algo in algos:
            t = time.perf_counter()
            sampler = UniformSampler(kind, a, b) if algo == "uniform" else EfficientSampler(kind, a, b)
            setup = time.perf_counter() - t
            rng = make_rng(seed, 0)
            times = []
            for _ in range(reps):
                dt = _time(lambda: [sampler.sample(rng) for _ in range(draws)]) / draws
                times.append(dt + (setup if include_setup else 0.0))
            sd = statistics.stdev(times) if len(times) > 1 else 0.0
            rows.append(BenchRow(family, n, algo, reps, statistics.fmean(times), sd, setup))
    return rows


def write_csv(rows: list[BenchRow], path_or_fh) -> None:
    names = list(BenchRow.__dataclass_fields__)
    own = isinstance(path_or_fh, (str, bytes)) or hasattr(path_or_fh, "__fspath__")
    fh = open(path_or_fh, "w", newline="") if own else path_or_fh
    try:
        w = csv.writer(fh)
        w.writerow(names)
        for r in rows:
            w.writerow([getattr(r, k) for k in names])
    finally:
        if own:
            fh.close()


def growth_exponent(ns, times) -> float:
    """Least-squares slope of log time against log n."""
    fit = statistics.linear_regression([math.log(n) for n in ns], [math.log(t) for t in times])
    return fit.slope
