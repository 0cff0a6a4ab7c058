import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degseq.errors import InfeasibleState
from degseq.feasibility import (
    ConnectionState,
    DirectedContext,
    augmented_bounds,
    bipartite_interval,
    capacity,
    digraph_feasible,
    digraph_violation,
    directed_interval,
    erdos_gallai,
    erdos_gallai_violation,
    gale_ryser,
    gale_ryser_violation,
    loop_reserve,
    verify_directed_partial,
    verify_undirected_partial,
)
from degseq.core import d_operation, z_vector

from oracles import group_completable, realizations


small_seq = st.lists(st.integers(0, 4), min_size=1, max_size=4)


@settings(max_examples=300, deadline=None)
@given(small_seq, small_seq)
def test_gale_ryser_agrees_with_exhaustive_listing(a, b):
    assert gale_ryser(a, b) == bool(realizations("bipartite", a, b))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, n - 1), min_size=n, max_size=n),
    st.lists(st.integers(0, n - 1), min_size=n, max_size=n))))
def test_digraph_test_agrees_with_exhaustive_listing(pair):
    a, b = pair
    assert digraph_feasible(a, b) == bool(realizations("directed", a, b))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
def test_erdos_gallai_agrees_with_exhaustive_listing(d):
    assert erdos_gallai(d) == bool(realizations("undirected", d))


def test_violation_indices():
    assert gale_ryser_violation([2, 1, 1], [2, 1, 1]) is None
    assert gale_ryser_violation([2, 1], [2]) == 0
    assert gale_ryser_violation([2, 2], [3, 1]) == 1
    assert gale_ryser_violation([3], [1, 1]) is not None
    assert erdos_gallai_violation([1, 1, 1]) == 0
    assert erdos_gallai_violation([3, 3, 1, 1]) == 2
    assert erdos_gallai_violation([-1, 1]) == 0
    assert digraph_violation([1, 0], [0, 2]) == 0
    assert digraph_violation([1, 1], [1, 1]) is None
    assert digraph_violation([2, 0, 0], [0, 1, 1]) is None
    assert digraph_violation([1, 0, 0], [1, 0, 0]) == 1
    with pytest.raises(ValueError):
        digraph_violation([1], [1, 0])


def test_empty_sequences_are_feasible():
    assert gale_ryser([], [])
    assert erdos_gallai([])
    assert digraph_feasible([], [])


def test_first_step_interval_on_small_example():
    st_ = ConnectionState.build([2, 1, 1], 2, [1, 1], alpha=1)
    iv = bipartite_interval(st_)
    assert (iv.lo, iv.hi) == (1, 2)
    assert list(iv) == [1, 2] and len(iv) == 2 and 2 in iv and 0 not in iv
    # once one degree-one node is taken, the degree-two node must take the rest
    st2 = ConnectionState.build([2, 0, 1], 1, [1, 1], alpha=2, k=2, delta=1)
    assert (bipartite_interval(st2).lo, bipartite_interval(st2).hi) == (1, 1)


def test_capacity_is_split_sum():
    z = z_vector([3, 3, 3, 2, 1], 5)
    rest = [3, 2, 1, 1]
    D = d_operation(z, rest)
    for alpha in range(1, 6):
        runs = [sum(D[:h]) for h in range(alpha, len(D) + 1)]
        assert capacity(z, rest, alpha) == min(runs)


def test_unreachable_state_raises():
    st_ = ConnectionState.build([1, 1], 2, [2], alpha=1)
    with pytest.raises(InfeasibleState):
        bipartite_interval(st_)


def _states(a, b):
    """Reachable (counts, alpha, rem, b_rest, a_state) tuples of the group process."""
    from degseq.mechanism import BipartiteMechanism, TERMINAL

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
    for j, rem, alpha, counts in seen:
        a_state = [d for d in range(len(counts)) for _ in range(counts[d])]
        yield list(counts), alpha, rem, list(mech.bs[j + 1:]), a_state


@settings(max_examples=60, deadline=None)
@given(small_seq.filter(any), small_seq.filter(any))
def test_interval_is_exactly_the_completable_set(a, b):
    if not gale_ryser(a, b):
        return
    for counts, alpha, rem, b_rest, a_state in _states(a, b):
        iv = bipartite_interval(ConnectionState.build(a_state, rem, b_rest, alpha))
        good = {F for F in range(counts[alpha] + 1) if group_completable(counts, alpha, F, rem, b_rest)}
        assert good == set(iv)


def test_augmented_bounds_forced_loop_and_reserve():
    # counterpart group: at least the loop, degree-one nodes reserved
    assert augmented_bounds(2, 3, 0, 5, True, 1, 1, 2, None) == (2, 2)
    # below the counterpart the reserve caps the range
    assert augmented_bounds(3, 4, 4, 9, False, 3, 2, 0, 1) == (0, 1)
    # after the loop only the plain bounds apply
    assert augmented_bounds(3, 4, 4, 9, False, None, 2, 0, 1) == (0, 4)


def test_directed_interval_strict_and_lenient():
    state = ConnectionState.build([1, 1], 2, [2], alpha=1)
    ctx = DirectedContext(counterpart_degree=None, n_one=0, u_delta=None)
    with pytest.raises(InfeasibleState):
        directed_interval(state, ctx)
    assert directed_interval(state, ctx, strict=False).empty


def test_loop_reserve():
    z = z_vector([3, 2, 2], 3)
    assert loop_reserve(z, [2, 2], 2) == capacity(z, [2, 2], 2) - 1


def test_partial_verification():
    assert verify_directed_partial([2, 2, 2], [2, 2, 2], [False] * 3)
    assert verify_directed_partial([3, 1, 1], [1, 1, 3], [True, False, False]) is False
    assert verify_undirected_partial([2, 2, 2], [False] * 3) is False
    assert verify_undirected_partial([3, 3, 3], [False] * 3)
    assert not verify_undirected_partial([0, 1], [False, False])
