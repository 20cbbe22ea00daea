"""Digraphs, vertex orders, matchings and the feedback Morse objective.

Vertices are dense integer ids ``0..n-1``; string labels are kept for I/O.
An order is a tuple of vertex ids, a matching is a frozenset of ``(tail, head)``
arcs. Everything here is immutable and side-effect free.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (ContractViolation, InputError, NotFeedbackMorseMatching,
                     SelfLoopError)

Arc = tuple[int, int]


class Digraph:
    """A simple digraph with per-vertex real weights.

    Antiparallel pairs ``u->v`` / ``v->u`` are allowed, parallel arcs and
    self-loops are not.
    """

    __slots__ = ("n", "arcs", "labels", "weights", "out_nbrs", "in_nbrs",
                 "_arc_set", "_index")

    def __init__(self, n: int, arcs: Iterable[Arc] = (), labels=None,
                 weights=None):
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        self.n = n
        arc_list = []
        seen = set()
        for u, v in arcs:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"arc ({u}, {v}) references an unknown vertex")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise InputError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))
            arc_list.append((u, v))
        arc_list.sort()
        self.arcs: tuple[Arc, ...] = tuple(arc_list)
        self._arc_set = frozenset(seen)
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = tuple(str(x) for x in labels)
        if len(labels) != n or len(set(labels)) != n:
            raise InputError("labels must be n distinct strings")
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}
        if weights is None:
            weights = [1] * n
        weights = tuple(weights)
        if len(weights) != n:
            raise InputError("exactly one weight per vertex is required")
        for x in weights:
            if x != x or x in (float("inf"), float("-inf")):
                raise InputError("weights must be finite reals")
        self.weights = weights
        out_nbrs = [[] for _ in range(n)]
        in_nbrs = [[] for _ in range(n)]
        for u, v in self.arcs:
            out_nbrs[u].append(v)
            in_nbrs[v].append(u)
        self.out_nbrs = tuple(tuple(x) for x in out_nbrs)
        self.in_nbrs = tuple(tuple(x) for x in in_nbrs)

    @classmethod
    def from_arcs(cls, arcs, vertices=None, weights=None) -> "Digraph":
        """Build from label pairs; vertex ids follow ``vertices`` or first
        appearance in ``arcs``. ``weights`` may be a dict keyed by label."""
        arcs = [(str(a), str(b)) for a, b in arcs]
        if vertices is None:
            vertices = []
            for a, b in arcs:
                for x in (a, b):
                    if x not in vertices:
                        vertices.append(x)
        labels = [str(x) for x in vertices]
        index = {lab: i for i, lab in enumerate(labels)}
        try:
            id_arcs = [(index[a], index[b]) for a, b in arcs]
        except KeyError as exc:
            raise InputError(f"arc references unknown vertex {exc}") from None
        if isinstance(weights, dict):
            weights = [weights.get(lab, 1) for lab in labels]
        return cls(len(labels), id_arcs, labels=labels, weights=weights)

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise InputError(f"unknown vertex label {label!r}") from None

    def arc(self, tail, head) -> Arc:
        """Arc given by labels, as an id pair."""
        return (self.index(tail), self.index(head))

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._arc_set

    @property
    def m(self) -> int:
        return len(self.arcs)

    def with_weights(self, weights) -> "Digraph":
        return Digraph(self.n, self.arcs, self.labels, weights)

    def undirected_neighbors(self) -> list[set[int]]:
        nbrs = [set() for _ in range(self.n)]
        for u, v in self.arcs:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return (self.n == other.n and self.arcs == other.arcs
                and self.labels == other.labels
                and self.weights == other.weights)

    def __hash__(self):
        return hash((self.n, self.arcs, self.labels))

    def __repr__(self):
        return f"Digraph(n={self.n}, m={self.m})"


def _check_order(D: Digraph, order: Sequence[int]) -> dict[int, int]:
    pos = {}
    for i, v in enumerate(order):
        pos[v] = i
    if len(order) != D.n or len(pos) != D.n or not all(
            isinstance(v, int) and 0 <= v < D.n for v in pos):
        raise ContractViolation("order is not a permutation of the vertices")
    return pos


def _check_arcs(D: Digraph, arcs) -> frozenset:
    arcs = frozenset((int(u), int(v)) for u, v in arcs)
    for a in arcs:
        if not D.has_arc(*a):
            raise ContractViolation(f"arc {a} is not an arc of the digraph")
    return arcs


def positions(order: Sequence[int]) -> dict[int, int]:
    return {v: i for i, v in enumerate(order)}


def backward_edges(D: Digraph, order: Sequence[int]) -> frozenset:
    """Arcs whose head precedes their tail in ``order``."""
    pos = _check_order(D, order)
    return frozenset((u, v) for u, v in D.arcs if pos[v] < pos[u])


def forward_edges(D: Digraph, order: Sequence[int]) -> frozenset:
    pos = _check_order(D, order)
    return frozenset((u, v) for u, v in D.arcs if pos[u] < pos[v])


def matched_vertices(arcs) -> set[int]:
    out = set()
    for u, v in arcs:
        out.add(u)
        out.add(v)
    return out


def is_matching(D: Digraph, arcs) -> bool:
    """True iff no two arcs share an endpoint."""
    arcs = _check_arcs(D, arcs)
    seen = set()
    for u, v in arcs:
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return True


def reverse_matched(D: Digraph, matching) -> Digraph:
    """Reverse every arc of ``matching``; coincident arcs are merged."""
    matching = _check_arcs(D, matching)
    if not is_matching(D, matching):
        raise ContractViolation("arc set is not a matching")
    new_arcs = set(D.arcs) - matching
    new_arcs |= {(v, u) for u, v in matching}
    return Digraph(D.n, new_arcs, D.labels, D.weights)


def _reverse_all(D: Digraph, arcs) -> list[Arc]:
    # Like reverse_matched but tolerant of non-matchings.
    new_arcs = set(D.arcs) - set(arcs)
    new_arcs |= {(v, u) for u, v in arcs}
    return sorted(new_arcs)


def topological_order(n: int, arcs: Iterable[Arc]):
    """Smallest-id-first Kahn order, or ``None`` when a cycle exists."""
    out = [[] for _ in range(n)]
    indeg = [0] * n
    for u, v in set(arcs):
        out[u].append(v)
        indeg[v] += 1
    heap = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != n:
        return None
    return tuple(order)


def is_acyclic(D: Digraph, witness: bool = False):
    """Acyclicity test; with ``witness=True`` returns ``(flag, order)``."""
    order = topological_order(D.n, D.arcs)
    if witness:
        return order is not None, order
    return order is not None


def is_feedback_morse_matching(D: Digraph, arcs) -> bool:
    arcs = _check_arcs(D, arcs)
    if not is_matching(D, arcs):
        return False
    return topological_order(D.n, _reverse_all(D, arcs)) is not None


def order_of_matching(D: Digraph, matching) -> tuple[int, ...]:
    """A vertex order whose backward arcs are exactly ``matching``."""
    matching = _check_arcs(D, matching)
    if not is_matching(D, matching):
        raise NotFeedbackMorseMatching("arc set is not a matching")
    order = topological_order(D.n, _reverse_all(D, matching))
    if order is None:
        raise NotFeedbackMorseMatching(
            "reversing the matching leaves a directed cycle")
    return order


def objective(D: Digraph, matching, weights=None):
    """Total weight of vertices incident to no arc of ``matching``."""
    matching = _check_arcs(D, matching)
    w = D.weights if weights is None else weights
    covered = matched_vertices(matching)
    return sum(w[v] for v in range(D.n) if v not in covered)


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"


@dataclass(frozen=True)
class SolveResult:
    status: Status
    value: float | None = None
    order: tuple[int, ...] | None = None
    matching: frozenset = frozenset()
    unmatched: frozenset = frozenset()
    stats: object = field(default=None, compare=False, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def check(self, D: Digraph, weights=None) -> None:
        """Raise ``AssertionError`` unless the result is self-consistent."""
        if not self.optimal:
            return
        assert backward_edges(D, self.order) == self.matching
        assert is_feedback_morse_matching(D, self.matching)
        assert objective(D, self.matching, weights) == self.value
        assert self.unmatched == frozenset(
            range(D.n)) - matched_vertices(self.matching)


# -- .dg text format ---------------------------------------------------------

def parse_dg(text: str) -> Digraph:
    """Parse the ``.dg`` format (see README for the grammar)."""
    header = None
    labels, weights, arcs = [], [], []
    index = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        where = f"line {lineno}"
        if tag == "p":
            if header is not None or len(parts) != 4 or parts[1] != "fmm":
                raise InputError(f"{where}: expected 'p fmm <n> <m>'")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise InputError(f"{where}: non-integer header") from None
        elif header is None:
            raise InputError(f"{where}: content before 'p fmm' header")
        elif tag == "v":
            if len(parts) not in (2, 3):
                raise InputError(f"{where}: expected 'v <label> [weight]'")
            if arcs:
                raise InputError(f"{where}: vertex line after arc lines")
            lab = parts[1]
            if lab in index:
                raise InputError(f"{where}: duplicate vertex {lab!r}")
            try:
                wt = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise InputError(f"{where}: bad weight {parts[2]!r}") from None
            index[lab] = len(labels)
            labels.append(lab)
            weights.append(wt)
        elif tag == "a":
            if len(parts) != 3:
                raise InputError(f"{where}: expected 'a <tail> <head>'")
            try:
                arcs.append((index[parts[1]], index[parts[2]]))
            except KeyError as exc:
                raise InputError(f"{where}: unknown vertex {exc}") from None
        else:
            raise InputError(f"{where}: unknown line type {tag!r}")
    if header is None:
        raise InputError("missing 'p fmm' header")
    n, m = header
    if n != len(labels) or m != len(arcs):
        raise InputError(
            f"header announces n={n}, m={m} but found {len(labels)} vertices "
            f"and {len(arcs)} arcs")
    try:
        return Digraph(n, arcs, labels=labels, weights=weights)
    except SelfLoopError:
        raise
    except InputError as exc:
        raise InputError(str(exc)) from None


def _fmt_weight(x) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def format_dg(D: Digraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.append(f"c {comment}")
    lines.append(f"p fmm {D.n} {D.m}")
    for v in range(D.n):
        lines.append(f"v {D.labels[v]} {_fmt_weight(D.weights[v])}")
    for u, v in D.arcs:
        lines.append(f"a {D.labels[u]} {D.labels[v]}")
    return "\n".join(lines) + "\n"
