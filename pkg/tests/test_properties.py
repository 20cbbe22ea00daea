"""Randomised invariants checked with hypothesis."""
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from morsetw import (Digraph, backward_edges, brute_force_matchings,
                     brute_force_orders, hasse_diagram, is_acyclic,
                     is_feedback_morse_matching, objective, order_of_matching,
                     solve_fmo, solve_omm, verify_gradient_field)
from morsetw.digraph import _reverse_all, forward_edges
from morsetw.generators import random_2_complex
from morsetw.oracle import all_matchings

SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])


@st.composite
def digraphs(draw, max_n=7, weights=st.integers(-3, 3)):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True,
                           max_size=min(len(pairs), 14))) if pairs else []
    w = draw(st.lists(weights, min_size=n, max_size=n))
    return Digraph(n, chosen, weights=w)


@st.composite
def digraph_and_order(draw):
    D = draw(digraphs())
    order = draw(st.permutations(range(D.n)))
    return D, tuple(order)


@SETTINGS
@given(digraph_and_order())
def test_reversing_backward_arcs_orients_forward(case):
    D, order = case
    pos = {v: i for i, v in enumerate(order)}
    reversed_arcs = _reverse_all(D, backward_edges(D, order))
    assert all(pos[u] < pos[v] for u, v in reversed_arcs)


@SETTINGS
@given(digraph_and_order())
def test_forward_backward_partition(case):
    D, order = case
    f, b = forward_edges(D, order), backward_edges(D, order)
    assert not f & b and f | b == frozenset(D.arcs)


@SETTINGS
@given(digraphs(max_n=6))
def test_round_trip_for_every_fmm(D):
    for M in all_matchings(D):
        if is_feedback_morse_matching(D, M):
            assert backward_edges(D, order_of_matching(D, M)) == frozenset(M)


@SETTINGS
@given(digraphs(max_n=6, weights=st.integers(0, 4)))
def test_objective_monotone_under_extension(D):
    ms = [frozenset(m) for m in all_matchings(D)]
    for m in ms:
        for bigger in ms:
            if m <= bigger:
                assert objective(D, bigger) <= objective(D, m)


@SETTINGS
@given(digraphs())
def test_dp_agrees_with_oracles(D):
    r = solve_fmo(D)
    o = brute_force_orders(D)
    assert (r.value if r.optimal else None) == o.value
    assert brute_force_matchings(D).value == o.value
    if r.optimal:
        r.check(D)
        assert is_acyclic(Digraph(D.n, _reverse_all(D, r.matching)))


@SETTINGS
@given(st.integers(3, 6), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_morse_equality_and_parity(nv, nt, seed):
    nt = min(nt, nv * (nv - 1) * (nv - 2) // 6)
    K = random_2_complex(nv, nt, seed=seed)
    res = solve_omm(K)
    assert verify_gradient_field(K, res.field)
    crit = res.field.critical
    assert res.value >= 1
    assert len(crit) % 2 == K.n_cells % 2
    H = hasse_diagram(K)
    assert all(K.dims[c] == K.dims[f] + 1 for f, c in H.arcs)
