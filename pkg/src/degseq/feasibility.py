"""Realizability tests and the admissible range for each group's connection count."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import d_operation, z_vector
from .errors import InfeasibleState


def gale_ryser_violation(a: Sequence[int], b: Sequence[int]) -> int | None:
    """Index of the first failing cumulative inequality, or None if (a, b) is bipartite.

    Returns 0 when the degree sums differ, otherwise the 1-based ``r``.
    """
    if any(x < 0 for x in a) or any(x < 0 for x in b):
        return 0
    if sum(a) != sum(b):
        return 0
    bs = sorted(b, reverse=True)
    z = z_vector(a, len(bs))
    zs = bs_sum = 0
    for r in range(len(bs)):
        zs += z[r]
        bs_sum += bs[r]
        if zs < bs_sum:
            return r + 1
    if max(a, default=0) > len(bs):
        return len(bs)
    return None


def gale_ryser(a: Sequence[int], b: Sequence[int]) -> bool:
    return gale_ryser_violation(a, b) is None


def erdos_gallai_violation(d: Sequence[int]) -> int | None:
    """0 for an odd sum or negative entry, else the first failing 1-based k."""
    if any(x < 0 for x in d) or sum(d) % 2:
        return 0
    ds = sorted(d, reverse=True)
    n = len(ds)
    hist = [0] * (n + 2)
    for x in ds:
        hist[min(x, n)] += 1
    at_least = [0] * (n + 2)
    for k in range(n, -1, -1):
        at_least[k] = at_least[k + 1] + hist[k]
    prefix = [0]
    for x in ds:
        prefix.append(prefix[-1] + x)
    total = 0
    for k in range(1, n + 1):
        total += at_least[k]
        # the first `big` entries are >= k, so min(d_i, k) = k there
        big = min(k, at_least[k])
        head = k * big + prefix[k] - prefix[big]
        if prefix[k] > k * (k - 1) + total - head:
            return k
    return None


def erdos_gallai(d: Sequence[int]) -> bool:
    return erdos_gallai_violation(d) is None


def digraph_violation(out_deg: Sequence[int], in_deg: Sequence[int]) -> int | None:
    """Loopless digraph test on paired sequences.

    Pairs are sorted by in-degree then out-degree, both descending, and for
    every k the first k in-degrees must be covered by
    ``sum_{i<=k} min(out_i, k-1) + sum_{i>k} min(out_i, k)``.
    Returns 0 for a sum mismatch or negative entry, else the failing k.
    """
    if len(out_deg) != len(in_deg):
        raise ValueError("out- and in-degree sequences must have equal length")
    if any(x < 0 for x in out_deg) or any(x < 0 for x in in_deg):
        return 0
    if sum(out_deg) != sum(in_deg):
        return 0
    pairs = sorted(zip(in_deg, out_deg), key=lambda p: (-p[0], -p[1]))
    n = len(pairs)
    outs = [o for _, o in pairs]
    # cover[k] = #{i <= k : out_i >= k}; node i covers k in [i, out_i]
    cover = [0] * (n + 2)
    for i, o in enumerate(outs, start=1):
        if o >= i:
            cover[i] += 1
            cover[min(o, n) + 1] -= 1
    hist = [0] * (n + 2)
    for o in outs:
        hist[min(o, n)] += 1
    at_least = [0] * (n + 2)
    for k in range(n, -1, -1):
        at_least[k] = at_least[k + 1] + hist[k]
    lhs = 0
    total = 0
    running = 0
    for k in range(1, n + 1):
        lhs += pairs[k - 1][0]
        total += at_least[k]
        running += cover[k]
        if lhs > total - running:
            return k
    return None


def digraph_feasible(out_deg: Sequence[int], in_deg: Sequence[int]) -> bool:
    return digraph_violation(out_deg, in_deg) is None


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int
    d_left: int = 0
    d_now: int = 0
    d_right: int = 0

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __len__(self) -> int:
        return max(0, self.hi - self.lo + 1)


@dataclass(frozen=True)
class ConnectionState:
    """Snapshot while the active right-side node works through its groups.

    ``a_state`` holds the current left-side degrees, already decremented for
    nodes connected in earlier groups of this step. ``b_rest`` is the
    non-increasing list of right-side degrees still to be processed after the
    active node. ``alpha`` is the degree of the group being decided and ``k``
    its 1-based position among this step's groups.
    """

    a_state: tuple[int, ...]
    b_remaining: int
    b_rest: tuple[int, ...]
    alpha: int
    k: int = 1
    delta: int = 0
    z: tuple[int, ...] = field(default=())
    m_k: int = 0
    M_k: int = 0

    @classmethod
    def build(cls, a_state, b_remaining, b_rest, alpha, k=1, delta=0):
        a_state = tuple(a_state)
        b_rest = tuple(sorted(b_rest, reverse=True))
        z = z_vector(a_state, len(b_rest) + 1)
        m_k = sum(1 for x in a_state if x == alpha)
        M_k = sum(1 for x in a_state if x > alpha)
        return cls(a_state, b_remaining, b_rest, alpha, k, delta, z, m_k, M_k)


@dataclass(frozen=True)
class DirectedContext:
    """Self-loop bookkeeping for the active node on augmented sequences.

    ``counterpart_degree`` is the current degree of the active node's own
    left-side copy, or None once its loop is placed. ``n_one`` counts
    degree-one left nodes that still owe their loop. ``u_delta`` is the
    remaining room for connections made before the counterpart's group.
    """

    counterpart_degree: int | None
    n_one: int
    u_delta: int | None


def _split_sums(D: Sequence[int], alpha: int) -> tuple[int, int, int]:
    n = len(D)
    d_left = sum(D[: max(0, min(alpha - 1, n))])
    d_now = D[alpha - 1] if 1 <= alpha <= n else 0
    d_right = 0
    run = 0
    for h in range(alpha, n):
        run += D[h]
        if run < d_right:
            d_right = run
    return d_left, d_now, d_right


def capacity(z: Sequence[int], b_rest: Sequence[int], alpha: int) -> int:
    """``d_left + d_now + d_right`` for group degree ``alpha``.

    This equals the smallest prefix sum of ``D(z, b_rest)`` at positions
    ``alpha`` and beyond.
    """
    return sum(_split_sums(d_operation(z, b_rest), alpha))


def _raw_bipartite(state: ConnectionState) -> Interval:
    D = d_operation(state.z, state.b_rest)
    d_left, d_now, d_right = _split_sums(D, state.alpha)
    lo = max(state.b_remaining - state.M_k, 0)
    hi = min(state.m_k, d_left + d_now + d_right)
    return Interval(lo, hi, d_left, d_now, d_right)


def bipartite_interval(state: ConnectionState) -> Interval:
    """Admissible number of group-``alpha`` nodes the active node may take."""
    iv = _raw_bipartite(state)
    if iv.empty:
        raise InfeasibleState(f"empty interval [{iv.lo}, {iv.hi}] at degree {state.alpha}")
    return iv


def loop_reserve(z1: Sequence[int], b_rest: Sequence[int], counterpart_degree: int) -> int:
    """Initial ``u_delta``: room left before the counterpart group, minus its loop."""
    return capacity(z1, b_rest, counterpart_degree) - 1


def augmented_bounds(b_remaining, m_k, M_k, dsum, first, counterpart_degree, alpha, n_one, u_delta):
    """(lo, hi) for one group on augmented sequences.

    ``counterpart_degree`` is None once the active node's loop is in place.
    Groups below the counterpart's share the reserve ``u_delta``; the
    counterpart's own group must take at least the loop; in the first group
    the ``n_one`` unlooped degree-one nodes are off limits except the
    counterpart itself.
    """
    lo = max(b_remaining - M_k, 0)
    hi = min(m_k, dsum)
    if counterpart_degree is None or alpha > counterpart_degree:
        return lo, hi
    if alpha < counterpart_degree:
        if u_delta is not None:
            hi = min(hi, u_delta)
        if first:
            hi = min(hi, m_k - n_one)
        return lo, hi
    lo = max(lo, 1)
    if first:
        hi = min(hi, m_k - n_one + 1)
    return lo, hi


def directed_interval(state: ConnectionState, ctx: DirectedContext, strict: bool = True) -> Interval:
    """The bipartite range tightened for forced loops and reserved degree-one nodes.

    With ``strict=False`` an empty interval is returned instead of raised;
    the sequential mechanisms use that to drop dead branches.
    """
    base = _raw_bipartite(state)
    dsum = base.d_left + base.d_now + base.d_right
    lo, hi = augmented_bounds(
        state.b_remaining, state.m_k, state.M_k, dsum, state.k == 1,
        ctx.counterpart_degree, state.alpha, ctx.n_one, ctx.u_delta,
    )
    iv = Interval(lo, hi, base.d_left, base.d_now, base.d_right)
    if strict and iv.empty:
        raise InfeasibleState(f"empty interval [{lo}, {hi}] at degree {state.alpha}")
    return iv


def verify_directed_partial(a_aug: Sequence[int], b_aug: Sequence[int], self_loop_done: Sequence[bool]) -> bool:
    """Drop the owed loop from every unlooped node and test what remains."""
    out_deg = [x - (0 if done else 1) for x, done in zip(a_aug, self_loop_done)]
    in_deg = [x - (0 if done else 1) for x, done in zip(b_aug, self_loop_done)]
    if any(x < 0 for x in out_deg) or any(x < 0 for x in in_deg):
        return False
    return digraph_feasible(out_deg, in_deg)


def verify_undirected_partial(d_aug: Sequence[int], self_loop_done: Sequence[bool]) -> bool:
    resid = [x - (0 if done else 1) for x, done in zip(d_aug, self_loop_done)]
    if any(x < 0 for x in resid):
        return False
    return erdos_gallai(resid)
