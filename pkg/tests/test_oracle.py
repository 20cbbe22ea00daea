import random

import pytest

from morsetw import (CapExceeded, Digraph, brute_force_erasibility,
                     brute_force_matchings, brute_force_orders, greedy_erase)
from morsetw.generators import (bidirected_clique, directed_cycle,
                                random_2_complex, random_digraph,
                                sphere_boundary, square_grid_complex,
                                triangle_closure)
from morsetw.oracle import all_matchings

from _util import dg


def test_orders_examples():
    assert brute_force_orders(dg(["ab"])).value == 0
    assert not brute_force_orders(bidirected_clique(3)).feasible
    r = brute_force_orders(directed_cycle(3))
    assert r.value == 1 and r.count > 0


def test_matchings_examples():
    C = dg(["ab", "ba"])
    r = brute_force_matchings(C)
    assert r.value == 0 and r.count == 2
    assert brute_force_matchings(Digraph(2)).value == 2


def test_all_matchings_counts():
    # a path on 4 vertices has 5 matchings: {}, 3 singles, 1 pair
    P = Digraph(4, [(0, 1), (1, 2), (2, 3)])
    assert len(list(all_matchings(P))) == 5


@pytest.mark.parametrize("seed", range(40))
def test_oracles_agree(seed):
    D = random_digraph(6, 0.35, seed=seed, weights=(-3, 3))
    a, b = brute_force_orders(D), brute_force_matchings(D)
    assert a.value == b.value


def test_caps():
    with pytest.raises(CapExceeded):
        brute_force_orders(Digraph(11))
    with pytest.raises(CapExceeded):
        brute_force_matchings(bidirected_clique(7))
    with pytest.raises(CapExceeded):
        brute_force_erasibility(random_2_complex(7, 13, seed=0))


def test_greedy_examples():
    assert greedy_erase(square_grid_complex(2))[0]
    S = sphere_boundary()
    assert greedy_erase(S) == (False, [])
    for tri in range(S.n_cells):
        if S.dims[tri] == 2:
            ok, seq = greedy_erase(S, [tri])
            assert ok and len(seq) == 3


def test_greedy_accepts_vertex_tuples():
    K = triangle_closure()
    assert greedy_erase(K, [K.simplices[-1]]) == (True, [])


def test_erasibility_examples():
    assert brute_force_erasibility(square_grid_complex(2), 0).value == 0
    assert not brute_force_erasibility(sphere_boundary(), 0).feasible
    r = brute_force_erasibility(sphere_boundary(), 1)
    assert r.value == 1 and len(r.witness) == 1 and r.count == 4


@pytest.mark.parametrize("seed", range(25))
def test_greedy_confluence(seed):
    K = random_2_complex(6, 3 + seed % 6, seed=seed)
    rng = random.Random(seed)
    tris = [i for i, d in enumerate(K.dims) if d == 2]
    for removed in ([], rng.sample(tris, 1)):
        expect = greedy_erase(K, removed)[0]
        for _ in range(20):
            assert greedy_erase(K, removed, rng=rng)[0] == expect
