"""Deterministic instance families for tests, demos and benchmarks."""
from __future__ import annotations

import itertools
import random

from .complexes import RegularComplex
from .digraph import Digraph
from .errors import InputError
from .treedecomp import TreeDecomposition

DIGRAPH_FAMILIES = ("partial-ktree-digraph", "directed-cycle",
                    "bidirected-clique", "random-digraph")
COMPLEX_FAMILIES = ("triangle-closure", "sphere-boundary",
                    "square-grid-complex", "random-2-complex", "cycle-complex")


def directed_cycle(n: int) -> Digraph:
    if n < 2:
        raise InputError("a directed cycle needs n >= 2")
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def bidirected_clique(n: int) -> Digraph:
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def random_digraph(n: int, p: float, seed=0, weights=None) -> Digraph:
    """Each ordered pair ``(u, v)`` is an arc with probability ``p``.

    ``weights`` is ``None`` (all 1) or an integer range ``(lo, hi)``.
    """
    rng = random.Random(seed)
    arcs = [(u, v) for u in range(n) for v in range(n)
            if u != v and rng.random() < p]
    w = None
    if weights is not None:
        lo, hi = weights
        w = [rng.randint(lo, hi) for _ in range(n)]
    return Digraph(n, arcs, weights=w)


def partial_ktree(n: int, k: int, p: float = 0.7, seed=0, flip: float = 0.1):
    """Random partial k-tree digraph together with a width-``k`` decomposition.

    A random k-tree is grown on ``n`` vertices and each of its edges survives
    with probability ``p``. Surviving edges point forward along a hidden
    random ranking, except that roughly a fraction ``flip`` is reversed, which plants
    directed cycles. Reversed edges form a matching, so reversing them back
    is always a feedback Morse matching and the instance is feasible.
    """
    if k < 1 or n < k + 1:
        raise InputError("partial k-trees need k >= 1 and n >= k + 1")
    if not (0 <= p <= 1 and 0 <= flip <= 1):
        raise InputError("probabilities must lie in [0, 1]")
    rng = random.Random(seed)
    base = tuple(range(k + 1))
    edges = list(itertools.combinations(base, 2))
    bags = {0: base}
    tree = []
    cliques = [(c, 0) for c in itertools.combinations(base, k)]
    for v in range(k + 1, n):
        clique, home = cliques[rng.randrange(len(cliques))]
        t = len(bags)
        bags[t] = clique + (v,)
        tree.append((home, t))
        edges.extend((u, v) for u in clique)
        for drop in range(k):
            cliques.append((clique[:drop] + clique[drop + 1:] + (v,), t))
    rank = list(range(n))
    rng.shuffle(rank)
    arcs = []
    planted = set()
    for u, v in edges:
        if rng.random() >= p:
            continue
        if rank[u] > rank[v]:
            u, v = v, u
        if rng.random() < flip and u not in planted and v not in planted:
            planted.update((u, v))
            arcs.append((v, u))
        else:
            arcs.append((u, v))
    return Digraph(n, arcs), TreeDecomposition(bags, tree)


def triangle_closure() -> RegularComplex:
    return RegularComplex.from_simplices([("a", "b", "c")])


def sphere_boundary() -> RegularComplex:
    """Boundary of the tetrahedron, a triangulated 2-sphere."""
    return RegularComplex.from_simplices(
        itertools.combinations(("a", "b", "c", "d"), 3))


def cycle_complex(n: int = 3) -> RegularComplex:
    """The cycle graph on ``n`` vertices as a 1-complex."""
    if n < 3:
        raise InputError("a cycle complex needs n >= 3")
    return RegularComplex.from_simplices(
        [(str(i), str((i + 1) % n)) for i in range(n)])


def square_grid_complex(rows: int = 2, cols: int = None) -> RegularComplex:
    """Triangulated ``rows x cols`` square, each unit square cut diagonally."""
    cols = rows if cols is None else cols
    if rows < 1 or cols < 1:
        raise InputError("grid dimensions must be positive")

    def vid(i, j):
        return str(i * (cols + 1) + j)

    tris = []
    for i in range(rows):
        for j in range(cols):
            a, b = vid(i, j), vid(i, j + 1)
            c, d = vid(i + 1, j), vid(i + 1, j + 1)
            tris += [(a, b, d), (a, c, d)]
    return RegularComplex.from_simplices(tris)


def random_2_complex(n_vertices: int, n_triangles: int, seed=0
                     ) -> RegularComplex:
    """Closure of ``n_triangles`` distinct random triangles."""
    pool = list(itertools.combinations(range(n_vertices), 3))
    if not 1 <= n_triangles <= len(pool):
        raise InputError("triangle count out of range")
    rng = random.Random(seed)
    tris = rng.sample(pool, n_triangles)
    return RegularComplex.from_simplices(
        [tuple(str(v) for v in t) for t in tris])


def generate(family: str, n: int = 3, k: int = 2, p: float = 0.7, seed=0,
             triangles: int = 6):
    """Dispatch by family name; returns a Digraph, a RegularComplex, or a
    ``(Digraph, TreeDecomposition)`` pair for partial k-trees."""
    if family == "partial-ktree-digraph":
        return partial_ktree(n, k, p, seed)
    if family == "directed-cycle":
        return directed_cycle(n)
    if family == "bidirected-clique":
        return bidirected_clique(n)
    if family == "random-digraph":
        return random_digraph(n, p, seed)
    if family == "triangle-closure":
        return triangle_closure()
    if family == "sphere-boundary":
        return sphere_boundary()
    if family == "cycle-complex":
        return cycle_complex(n)
    if family == "square-grid-complex":
        return square_grid_complex(n)
    if family == "random-2-complex":
        return random_2_complex(n, triangles, seed)
    raise InputError(f"unknown family {family!r}")
