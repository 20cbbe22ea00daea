"""Exhaustive reference solvers used to validate the dynamic program.

These are deliberately naive: every order (or every matching, or every
triangle subset) is enumerated and filtered by the definition.
"""
from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass

import numpy as np

from .digraph import Digraph, matched_vertices, objective
from .errors import CapExceeded

MAX_ORDER_VERTICES = 10
MAX_MATCHING_ARCS = 40
MAX_ERASIBILITY_TRIANGLES = 12


@dataclass(frozen=True)
class OracleResult:
    value: object = None
    order: tuple | None = None
    matching: frozenset | None = None
    witness: frozenset | None = None
    count: int = 0

    @property
    def feasible(self) -> bool:
        return self.value is not None


@functools.lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
    return perms.reshape(len(perms), n)


@functools.lru_cache(maxsize=None)
def _positions(n: int) -> np.ndarray:
    return np.argsort(_permutations(n), axis=1).astype(np.int8)


def brute_force_orders(D: Digraph, weights=None,
                       cap: int = MAX_ORDER_VERTICES) -> OracleResult:
    """Minimise unmatched weight over all ``n!`` vertex orders.

    An order counts only if its backward arcs form a matching. The witness is
    the lexicographically first optimal order.
    """
    n = D.n
    if n > cap:
        raise CapExceeded(f"{n} vertices exceed the order-oracle cap {cap}",
                          size=n, cap=cap)
    w = list(D.weights if weights is None else weights)
    perms = _permutations(n)
    pos = _positions(n)
    if D.m:
        tails = np.array([u for u, _ in D.arcs])
        heads = np.array([v for _, v in D.arcs])
        backward = pos[:, heads] < pos[:, tails]
        incidence = np.zeros((D.m, n), dtype=np.float32)
        incidence[np.arange(D.m), tails] = 1
        incidence[np.arange(D.m), heads] = 1
        degree = backward.astype(np.float32) @ incidence
    else:
        backward = np.zeros((len(perms), 0), dtype=bool)
        degree = np.zeros((len(perms), n), dtype=np.float32)
    valid = (degree <= 1).all(axis=1)
    if not valid.any():
        return OracleResult()
    cost = (degree == 0).astype(np.float64) @ np.asarray(w, dtype=np.float64)
    cost = np.where(valid, cost, np.inf)
    best = cost.min()
    winners = np.flatnonzero(cost == best)
    first = int(winners[0])
    order = tuple(int(x) for x in perms[first])
    matching = frozenset(a for a, b in zip(D.arcs, backward[first]) if b)
    return OracleResult(objective(D, matching, w), order, matching,
                        count=len(winners))


def _is_acyclic_masks(out: list) -> bool:
    remaining = (1 << len(out)) - 1
    while remaining:
        reach = 0
        r = remaining
        while r:
            low = r & -r
            reach |= out[low.bit_length() - 1]
            r ^= low
        sources = remaining & ~reach
        if not sources:
            return False
        remaining &= ~sources
    return True


def all_matchings(D: Digraph):
    """Yield every matching of ``D`` (as a tuple of arcs), empty one first."""
    arcs = D.arcs

    def extend(start, used, chosen):
        yield tuple(chosen)
        for i in range(start, len(arcs)):
            u, v = arcs[i]
            if used >> u & 1 or used >> v & 1:
                continue
            chosen.append(arcs[i])
            yield from extend(i + 1, used | (1 << u) | (1 << v), chosen)
            chosen.pop()

    yield from extend(0, 0, [])


def brute_force_matchings(D: Digraph, weights=None,
                          cap: int = MAX_MATCHING_ARCS) -> OracleResult:
    """Minimise unmatched weight over all matchings whose reversal is acyclic."""
    if D.m > cap:
        raise CapExceeded(f"{D.m} arcs exceed the matching-oracle cap {cap}",
                          size=D.m, cap=cap)
    w = D.weights if weights is None else weights
    base = [0] * D.n
    for u, v in D.arcs:
        base[u] |= 1 << v
    best, best_m, count = None, None, 0
    for chosen in all_matchings(D):
        out = list(base)
        for u, v in chosen:
            out[u] &= ~(1 << v)
            out[v] |= 1 << u
        if not _is_acyclic_masks(out):
            continue
        covered = matched_vertices(chosen)
        val = sum(w[v] for v in range(D.n) if v not in covered)
        if best is None or val < best:
            best, best_m, count = val, frozenset(chosen), 1
        elif val == best:
            count += 1
    if best is None:
        return OracleResult()
    return OracleResult(best, matching=best_m, count=count)


def brute_force_states(D: Digraph, bag, weights=None,
                       cap: int = MAX_ORDER_VERTICES) -> dict:
    """Restricted optimum for every reachable bag state of ``D``.

    Enumerates all orders of ``D`` whose backward arcs form a matching and
    files each under ``(order restricted to bag, matched vertices in bag)``,
    keeping the least weight of unmatched vertices outside ``bag``. States
    missing from the result have no compatible order.
    """
    if D.n > cap:
        raise CapExceeded(f"{D.n} vertices exceed the order-oracle cap {cap}",
                          size=D.n, cap=cap)
    w = D.weights if weights is None else weights
    bag = frozenset(bag)
    best = {}
    for order in itertools.permutations(range(D.n)):
        pos = {v: i for i, v in enumerate(order)}
        back = [(u, v) for u, v in D.arcs if pos[v] < pos[u]]
        covered = matched_vertices(back)
        if len(covered) != 2 * len(back):
            continue
        key = (tuple(v for v in order if v in bag), frozenset(covered & bag))
        val = sum(w[v] for v in range(D.n) if v not in bag and v not in covered)
        if key not in best or val < best[key]:
            best[key] = val
    return best


# -- erasibility -------------------------------------------------------------

def _triangles(K):
    return [s for s in K.simplices if len(s) == 3]


def greedy_erase(K, removed=(), rng: random.Random | None = None):
    """Delete ``removed`` triangles, then collapse free edges until stuck.

    ``K`` is a simplicial complex of dimension at most 2; triangles may be
    given as cell ids or vertex tuples. The free edge collapsed next is the
    lowest one, or a random one when ``rng`` is supplied. Returns
    ``(erased, sequence)`` where ``sequence`` lists ``(edge, triangle)``
    vertex tuples.
    """
    removed = {K.simplices[s] if isinstance(s, int) else tuple(s)
               for s in removed}
    alive = set(_triangles(K)) - removed
    cofaces = {}
    for tri in alive:
        for e in itertools.combinations(tri, 2):
            cofaces.setdefault(e, set()).add(tri)
    free = {e for e, ts in cofaces.items() if len(ts) == 1}
    sequence = []
    while free:
        if rng is None:
            e = min(free)
        else:
            e = rng.choice(sorted(free))
        free.discard(e)
        (tri,) = cofaces.pop(e)
        alive.discard(tri)
        sequence.append((e, tri))
        for f in itertools.combinations(tri, 2):
            if f == e:
                continue
            ts = cofaces[f]
            ts.discard(tri)
            if len(ts) == 1:
                free.add(f)
            else:
                free.discard(f)
    return not alive, sequence


def brute_force_erasibility(K, budget=None,
                            cap: int = MAX_ERASIBILITY_TRIANGLES
                            ) -> OracleResult:
    """Smallest triangle set whose deletion leaves ``K`` erasible.

    Subsets are tried by increasing size, stopping after ``budget`` (all sizes
    when ``None``). ``value`` is the least size found, ``witness`` the first
    such set in lexicographic order and ``count`` the number of optimal sets.
    """
    tris = _triangles(K)
    if len(tris) > cap:
        raise CapExceeded(f"{len(tris)} triangles exceed the cap {cap}",
                          size=len(tris), cap=cap)
    top = len(tris) if budget is None else min(budget, len(tris))
    for size in range(top + 1):
        hits = [c for c in itertools.combinations(tris, size)
                if greedy_erase(K, c)[0]]
        if hits:
            index = K.index_of_simplex
            return OracleResult(size, witness=frozenset(index(t) for t in hits[0]),
                                count=len(hits))
    return OracleResult()
