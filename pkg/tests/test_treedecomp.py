import random

import pytest

from morsetw import (DecompositionError, Digraph, InputError, NodeKind,
                     NiceTreeDecomposition, TreeDecomposition, heuristic_td,
                     naive_path_decomposition, nice_decomposition,
                     processed_subgraph, read_td_pace, to_nice,
                     validate_discipline, validate_td, write_td_pace)
from morsetw.generators import partial_ktree, random_digraph

from _util import dg

K = NodeKind


def test_validate_td_examples():
    P = dg(["ab", "bc"])
    a, b, c = P.index("a"), P.index("b"), P.index("c")
    whole = TreeDecomposition({0: {a, b, c}})
    assert validate_td(P, whole) and whole.width == 2
    path = TreeDecomposition({0: {a, b}, 1: {b, c}}, [(0, 1)])
    assert validate_td(P, path) and path.width == 1
    res = validate_td(P, TreeDecomposition({0: {a}, 1: {c}}, [(0, 1)]))
    assert not res
    # b is missing too; the first violated axiom is coverage
    assert res.rule in ("i", "ii")
    res = validate_td(P, TreeDecomposition({0: {a}, 1: {b}, 2: {c}},
                                           [(0, 1), (1, 2)]))
    assert not res and res.rule == "ii"


def test_validate_td_running_intersection():
    P = dg(["ab", "bc"])
    a, b, c = (P.index(x) for x in "abc")
    td = TreeDecomposition({0: {a, b}, 1: {c}, 2: {b, c}}, [(0, 1), (1, 2)])
    res = validate_td(P, td)
    assert not res and res.rule == "iii"


def test_heuristic_examples():
    tree = Digraph(6, [(0, 1), (0, 2), (2, 3), (2, 4), (5, 4)])
    clique = Digraph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    for strategy in ("min-fill", "min-degree"):
        assert heuristic_td(tree, strategy).width == 1
        assert heuristic_td(clique, strategy).width == 3
        assert heuristic_td(Digraph(5), strategy).width == 0
    with pytest.raises(InputError):
        heuristic_td(tree, "best")


def test_heuristics_deterministic():
    D = random_digraph(15, 0.3, seed=3)
    assert heuristic_td(D).bags == heuristic_td(D).bags


def test_to_nice_single_bag_chain():
    D = dg(["ab"])
    ntd = to_nice(TreeDecomposition({0: {0, 1}}), D)
    assert [ntd.describe(t, D) for t in range(len(ntd))] == [
        "LEAF", "INTRODUCE_VERTEX(a)", "INTRODUCE_VERTEX(b)",
        "INTRODUCE_EDGE(a,b)", "FORGET_VERTEX(b)", "FORGET_VERTEX(a)"]
    assert ntd.bags[ntd.root] == ()


def test_to_nice_disconnected_uses_chain():
    D = Digraph(2)
    ntd = to_nice(TreeDecomposition({0: {0}, 1: {1}}, [(0, 1)]), D)
    assert K.JOIN not in ntd.kinds
    assert validate_discipline(ntd, D)


def test_to_nice_rejects_invalid():
    D = dg(["ab"])
    with pytest.raises(DecompositionError):
        to_nice(TreeDecomposition({0: {0}, 1: {1}}, [(0, 1)]), D)


def test_naive_path_examples():
    D = dg(["ab", "bc"])
    ntd = naive_path_decomposition(D)
    counts = ntd.kind_counts()
    assert counts[K.INTRODUCE_VERTEX] == 3 and counts[K.FORGET_VERTEX] == 3
    assert counts[K.INTRODUCE_EDGE] == 2 and counts[K.LEAF] == 1
    assert len(ntd) == 9 and ntd.width == 2
    assert validate_discipline(ntd, D)
    empty = naive_path_decomposition(Digraph(0))
    assert empty.kinds == (K.LEAF,)
    assert validate_discipline(empty, Digraph(0))


def _rebuild(ntd, kinds, bags, vertices, arcs_, children):
    return NiceTreeDecomposition(kinds, bags, vertices, arcs_, children)


def _lists(ntd):
    return (list(ntd.kinds), list(ntd.bags), list(ntd.vertices),
            list(ntd.arcs), [list(c) for c in ntd.children])


def duplicate_node(ntd, t):
    """Insert a copy of single-child node ``t`` directly above it."""
    kinds, bags, verts, arcs_, kids = _lists(ntd)
    shift = [[c + 1 if c > t else c for c in cs] for cs in kids]
    p = ntd.parent[t]
    shift[p] = [t + 1 if c == t else c for c in shift[p]]
    kinds.insert(t + 1, kinds[t])
    bags.insert(t + 1, bags[t])
    verts.insert(t + 1, verts[t])
    arcs_.insert(t + 1, arcs_[t])
    shift.insert(t + 1, [t])
    return _rebuild(ntd, kinds, bags, verts, arcs_, shift)


def remove_node(ntd, t):
    """Splice out single-child node ``t``."""
    kinds, bags, verts, arcs_, kids = _lists(ntd)
    (child,) = kids[t]
    p = ntd.parent[t]
    kids[p] = [child if c == t else c for c in kids[p]]
    for lst in (kinds, bags, verts, arcs_, kids):
        del lst[t]
    kids = [[c - 1 if c > t else c for c in cs] for cs in kids]
    return _rebuild(ntd, kinds, bags, verts, arcs_, kids)


def _join_instance():
    D = dg(["ab", "ac", "bc", "ad", "db"])
    a, b, c, d = (D.index(x) for x in "abcd")
    td = TreeDecomposition({0: {a, b}, 1: {a, b, c}, 2: {a, b, d}},
                           [(0, 1), (0, 2)])
    return D, to_nice(td, D)


def test_discipline_duplicate_edge_is_t2():
    D, ntd = _join_instance()
    assert validate_discipline(ntd, D)
    t = ntd.kinds.index(K.INTRODUCE_EDGE)
    res = validate_discipline(duplicate_node(ntd, t), D)
    assert not res and res.rule == "T2"


def test_discipline_missing_join_edge_is_t5():
    D, ntd = _join_instance()
    (j,) = [t for t, k in enumerate(ntd.kinds) if k is K.JOIN]
    ab = D.arc("a", "b")
    right = ntd.children[j][1]
    (t,) = [s for s in ntd.subtree(right) if ntd.arcs[s] == ab]
    res = validate_discipline(remove_node(ntd, t), D)
    assert not res and res.rule == "T5"


def test_discipline_missing_edge_is_t2():
    D = dg(["ab"])
    ntd = naive_path_decomposition(D)
    t = ntd.kinds.index(K.INTRODUCE_EDGE)
    res = validate_discipline(remove_node(ntd, t), D)
    assert not res and res.rule == "T2"


def test_discipline_bad_arithmetic():
    D = dg(["ab"])
    kinds, bags, verts, arcs_, kids = _lists(naive_path_decomposition(D))
    bags[1] = (0, 1)
    res = validate_discipline(
        NiceTreeDecomposition(kinds, bags, verts, arcs_, kids), D)
    assert not res and res.rule == "arithmetic"


def test_post_order_enforced():
    with pytest.raises(DecompositionError):
        NiceTreeDecomposition([K.LEAF, K.LEAF], [(), ()], [None, None],
                              [None, None], [[1], []])


@pytest.mark.parametrize("seed", range(30))
def test_random_to_nice_is_disciplined(seed):
    rng = random.Random(seed)
    D = random_digraph(rng.randint(1, 25), rng.uniform(0.05, 0.4), seed=seed)
    for strategy in ("min-fill", "min-degree"):
        td = heuristic_td(D, strategy)
        assert validate_td(D, td)
        ntd = to_nice(td, D)
        assert validate_discipline(ntd, D)
        assert ntd.width == td.width


def test_partial_ktree_td_is_valid():
    D, td = partial_ktree(50, 3, seed=7)
    assert validate_td(D, td) and td.width <= 3
    assert validate_discipline(to_nice(td, D), D)


def test_processed_subgraph_examples():
    D, ntd = _join_instance()
    leaf = ntd.kinds.index(K.LEAF)
    assert processed_subgraph(ntd, D, leaf).n == 0
    root = processed_subgraph(ntd, D, ntd.root)
    assert root == D
    (j,) = [t for t, k in enumerate(ntd.kinds) if k is K.JOIN]
    left, right = (processed_subgraph(ntd, D, c) for c in ntd.children[j])
    whole = processed_subgraph(ntd, D, j)
    assert set(left.labels) & set(right.labels) == \
        {D.labels[v] for v in ntd.bags[j]}

    def lab_arcs(G):
        return {(G.labels[u], G.labels[v]) for u, v in G.arcs}
    assert lab_arcs(whole) == lab_arcs(left) | lab_arcs(right)


def test_pace_examples():
    td = read_td_pace("s td 1 2 2\nb 1 1 2\n")
    assert list(td.bags.values()) == [frozenset({0, 1})]
    D = dg(["ab"], vertices=["a", "b", "c"])
    with pytest.raises(DecompositionError):
        read_td_pace("s td 1 2 3\nb 1 1 2\n", D)


@pytest.mark.parametrize("text", [
    "b 1 1\n",
    "s td 1 1\n",
    "s td 1 2 2\nb 2 1 2\n",
    "s td 2 1 2\nb 1 1\nb 2 2\n",
    "s td 1 1 2\nb 1 1 2\n",
    "s td 1 2 2\nb 1 1 3\n",
    "s td 1 2 2\nb 1 x\n",
])
def test_pace_malformed(text):
    with pytest.raises(InputError):
        read_td_pace(text)


@pytest.mark.parametrize("seed", range(10))
def test_pace_round_trip(seed):
    D = random_digraph(12, 0.3, seed=seed)
    td = heuristic_td(D)
    text = write_td_pace(td, D.n)
    back = read_td_pace(text, D)
    assert sorted(map(sorted, back.bags.values())) == \
        sorted(map(sorted, td.bags.values()))
    assert write_td_pace(back, D.n) == text


def test_nice_decomposition_sources():
    D = random_digraph(8, 0.4, seed=1)
    for src in ("min-fill", "min-degree", "naive-path", heuristic_td(D)):
        assert validate_discipline(nice_decomposition(D, src), D)
