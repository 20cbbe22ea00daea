"""Tree decompositions of the underlying undirected graph of a digraph.

Plain decompositions (``TreeDecomposition``) are what heuristics produce and
what PACE ``.td`` files hold. The dynamic program runs on a rooted
``NiceTreeDecomposition`` whose nodes are stored in DFS post-order, so a
node's subtree is the contiguous index range ``[lo[t], t]`` and the root is
the last node.
"""
from __future__ import annotations

import bisect
import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .digraph import Digraph
from .errors import DecompositionError, InputError


@dataclass(frozen=True)
class Validation:
    """Outcome of a validity check; falsy when a rule is violated."""

    ok: bool
    rule: str | None = None
    message: str = ""

    def __bool__(self):
        return self.ok

    @classmethod
    def fail(cls, rule, message):
        return cls(False, rule, message)


VALID = Validation(True)


class TreeDecomposition:
    """Bags keyed by node id plus an undirected tree over the node ids."""

    def __init__(self, bags: dict, edges: Iterable = ()):
        self.bags = {int(k): frozenset(v) for k, v in bags.items()}
        self.edges = tuple(sorted(
            (min(a, b), max(a, b)) for a, b in edges))
        adj = {t: [] for t in self.bags}
        for a, b in self.edges:
            if a not in adj or b not in adj:
                raise InputError(f"tree edge ({a}, {b}) references a missing bag")
            adj[a].append(b)
            adj[b].append(a)
        self.adj = {t: sorted(nb) for t, nb in adj.items()}

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def is_tree(self) -> bool:
        if not self.bags:
            return True
        if len(self.edges) != len(self.bags) - 1:
            return False
        start = min(self.bags)
        seen = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for s in self.adj[t]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return len(seen) == len(self.bags)

    def __repr__(self):
        return f"TreeDecomposition(bags={len(self.bags)}, width={self.width})"


def validate_td(G: Digraph, td: TreeDecomposition) -> Validation:
    """Check the three tree-decomposition axioms against ``G``.

    Rules reported: ``tree`` (the bag graph is not a tree), ``i`` (vertex
    coverage), ``ii`` (edge coverage), ``iii`` (connected occurrence).
    """
    if not td.is_tree():
        return Validation.fail("tree", "bag graph is not a tree")
    for t, bag in td.bags.items():
        bad = [v for v in bag if not 0 <= v < G.n]
        if bad:
            return Validation.fail("i", f"bag {t} holds unknown vertex {bad[0]}")
    occ = [[] for _ in range(G.n)]
    for t, bag in td.bags.items():
        for v in bag:
            occ[v].append(t)
    for v in range(G.n):
        if not occ[v]:
            return Validation.fail("i", f"vertex {G.labels[v]} is in no bag")
    for u, v in G.arcs:
        if not any(v in td.bags[t] for t in occ[u]):
            return Validation.fail(
                "ii", f"edge {G.labels[u]}-{G.labels[v]} is in no bag")
    for v in range(G.n):
        nodes = set(occ[v])
        start = occ[v][0]
        seen = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for s in td.adj[t]:
                if s in nodes and s not in seen:
                    seen.add(s)
                    stack.append(s)
        if len(seen) != len(nodes):
            return Validation.fail(
                "iii", f"bags containing {G.labels[v]} are disconnected")
    return VALID


# -- heuristics ---------------------------------------------------------------

STRATEGIES = ("min-fill", "min-degree")


def _fill_in(nbrs, v):
    nb = list(nbrs[v])
    missing = 0
    for i, a in enumerate(nb):
        na = nbrs[a]
        for b in nb[i + 1:]:
            if b not in na:
                missing += 1
    return missing


def elimination_order(G: Digraph, strategy: str = "min-fill") -> list[int]:
    """Greedy elimination order; ties broken by degree, then by id."""
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}")
    nbrs = G.undirected_neighbors()
    alive = set(range(G.n))
    order = []
    while alive:
        if strategy == "min-fill":
            v = min(alive, key=lambda x: (_fill_in(nbrs, x), len(nbrs[x]), x))
        else:
            v = min(alive, key=lambda x: (len(nbrs[x]), x))
        nb = nbrs[v]
        for a in nb:
            nbrs[a] |= nb
            nbrs[a].discard(a)
            nbrs[a].discard(v)
        alive.discard(v)
        order.append(v)
    return order


def td_from_elimination(G: Digraph, order: list[int]) -> TreeDecomposition:
    """One bag per eliminated vertex; component trees are chained."""
    if G.n == 0:
        return TreeDecomposition({0: ()})
    nbrs = G.undirected_neighbors()
    rank = {v: i for i, v in enumerate(order)}
    bags, edges, roots = {}, [], []
    for i, v in enumerate(order):
        later = set(nbrs[v])
        bags[i] = frozenset(later | {v})
        for a in later:
            nbrs[a] |= later
            nbrs[a].discard(a)
            nbrs[a].discard(v)
        if later:
            edges.append((i, min(rank[a] for a in later)))
        else:
            roots.append(i)
    edges.extend(zip(roots, roots[1:]))
    return TreeDecomposition(bags, edges)


def heuristic_td(G: Digraph, strategy: str = "min-fill") -> TreeDecomposition:
    return td_from_elimination(G, elimination_order(G, strategy))


# -- nice decompositions -------------------------------------------------------

class NodeKind(enum.Enum):
    LEAF = "leaf"
    INTRODUCE_VERTEX = "introduce"
    INTRODUCE_EDGE = "introduce_edge"
    FORGET_VERTEX = "forget"
    JOIN = "join"


class _Node:
    __slots__ = ("kind", "bag", "vertex", "arc", "children")

    def __init__(self, kind, bag, vertex=None, arc=None, children=()):
        self.kind = kind
        self.bag = frozenset(bag)
        self.vertex = vertex
        self.arc = arc
        self.children = list(children)


class NiceTreeDecomposition:
    """Rooted nice decomposition with introduce-edge nodes, in post-order."""

    def __init__(self, kinds, bags, vertices, arcs, children):
        self.kinds = tuple(kinds)
        self.bags = tuple(tuple(sorted(b)) for b in bags)
        self.vertices = tuple(vertices)
        self.arcs = tuple(arcs)
        self.children = tuple(tuple(c) for c in children)
        size = len(self.kinds)
        parent = [-1] * size
        lo = list(range(size))
        for t in range(size):
            for c in self.children[t]:
                if not 0 <= c < t:
                    raise DecompositionError(
                        "nodes must be stored in post-order", "arithmetic")
                if parent[c] != -1:
                    raise DecompositionError(
                        f"node {c} has two parents", "arithmetic")
                parent[c] = t
                lo[t] = min(lo[t], lo[c])
        roots = [t for t in range(size) if parent[t] == -1]
        if size and roots != [size - 1]:
            raise DecompositionError("decomposition is not a single rooted tree",
                                     "arithmetic")
        self.parent = tuple(parent)
        self.lo = tuple(lo)

    @property
    def root(self) -> int:
        return len(self.kinds) - 1

    def __len__(self):
        return len(self.kinds)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff ``b`` lies in the subtree of ``a`` (``a`` included)."""
        return self.lo[a] <= b <= a

    def subtree(self, t: int) -> range:
        return range(self.lo[t], t + 1)

    def kind_counts(self) -> dict:
        counts = {k: 0 for k in NodeKind}
        for k in self.kinds:
            counts[k] += 1
        return counts

    def describe(self, t: int, G: Digraph | None = None) -> str:
        lab = (lambda v: G.labels[v]) if G is not None else str
        k = self.kinds[t]
        if k in (NodeKind.INTRODUCE_VERTEX, NodeKind.FORGET_VERTEX):
            return f"{k.name}({lab(self.vertices[t])})"
        if k is NodeKind.INTRODUCE_EDGE:
            u, v = self.arcs[t]
            return f"{k.name}({lab(u)},{lab(v)})"
        return k.name

    def __repr__(self):
        return f"NiceTreeDecomposition(nodes={len(self)}, width={self.width})"

    @classmethod
    def _from_root(cls, root: _Node) -> "NiceTreeDecomposition":
        order = []
        stack = [(root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            stack.append((node, True))
            for c in reversed(node.children):
                stack.append((c, False))
        index = {id(nd): i for i, nd in enumerate(order)}
        return cls([nd.kind for nd in order], [nd.bag for nd in order],
                   [nd.vertex for nd in order], [nd.arc for nd in order],
                   [[index[id(c)] for c in nd.children] for nd in order])


def _forget_chain(top: _Node, vertices) -> _Node:
    bag = set(top.bag)
    for v in sorted(vertices, reverse=True):
        bag.discard(v)
        top = _Node(NodeKind.FORGET_VERTEX, bag, vertex=v, children=[top])
    return top


def _introduce_chain(top: _Node, vertices) -> _Node:
    bag = set(top.bag)
    for v in sorted(vertices):
        bag.add(v)
        top = _Node(NodeKind.INTRODUCE_VERTEX, bag, vertex=v, children=[top])
    return top


def _splice_under(top: _Node, below: _Node) -> _Node:
    """Replace the leftmost leaf under ``top`` by the empty-bag ``below``."""
    if top.kind is NodeKind.LEAF:
        return below
    node = top
    while True:
        child = node.children[0]
        if child.kind is NodeKind.LEAF:
            node.children[0] = below
            return top
        node = child


def _insert_edge_nodes(root: _Node, G: Digraph) -> _Node:
    # Canonical rule: an arc fires right above the introduce node of
    # whichever endpoint enters the bag second.
    def edge_chain(node):
        child = node.children[0]
        v = node.vertex
        fired = []
        for w in child.bag:
            if G.has_arc(v, w):
                fired.append((v, w))
            if G.has_arc(w, v):
                fired.append((w, v))
        top = node
        for a in sorted(fired):
            top = _Node(NodeKind.INTRODUCE_EDGE, node.bag, arc=a, children=[top])
        return top

    sentinel = _Node(NodeKind.LEAF, (), children=[root])
    stack = [sentinel]
    while stack:
        node = stack.pop()
        for i, c in enumerate(node.children):
            stack.append(c)
            if c.kind is NodeKind.INTRODUCE_VERTEX:
                node.children[i] = edge_chain(c)
    return sentinel.children[0]


def to_nice(td: TreeDecomposition, G: Digraph,
            root: int | None = None) -> NiceTreeDecomposition:
    """Convert a valid decomposition into a disciplined nice decomposition.

    Bags are never enlarged, so the width is unchanged. Subtrees that share no
    vertex with their parent bag are chained through an empty bag instead of
    being joined.
    """
    check = validate_td(G, td)
    if not check:
        raise DecompositionError(f"invalid tree decomposition: {check.message}",
                                 check.rule)
    if root is None:
        root = min(td.bags)
    parent = {root: None}
    bfs = [root]
    queue = deque([root])
    while queue:
        t = queue.popleft()
        for s in td.adj[t]:
            if s not in parent:
                parent[s] = t
                bfs.append(s)
                queue.append(s)
    kids = {t: [] for t in td.bags}
    for t in bfs[1:]:
        kids[parent[t]].append(t)

    built = {}
    for t in reversed(bfs):
        X = td.bags[t]
        attached, detached = [], []
        for c in sorted(kids[t]):
            top = _forget_chain(built.pop(c), td.bags[c] - X)
            (attached if top.bag else detached).append(top)
        below = None
        for top in detached:
            below = top if below is None else _splice_under(top, below)
        # Join on the shared part only; the rest of X enters above the join.
        shared = frozenset().union(*(top.bag for top in attached))
        attached = [_introduce_chain(top, shared - top.bag) for top in attached]
        if attached:
            if below is not None:
                attached[0] = _splice_under(attached[0], below)
            top = attached[0]
            for other in attached[1:]:
                top = _Node(NodeKind.JOIN, shared, children=[top, other])
        else:
            top = below if below is not None else _Node(NodeKind.LEAF, ())
        built[t] = _introduce_chain(top, X - shared)
    top = _forget_chain(built[root], td.bags[root])
    top = _insert_edge_nodes(top, G)
    return NiceTreeDecomposition._from_root(top)


def naive_path_decomposition(G: Digraph) -> NiceTreeDecomposition:
    """Introduce every vertex, then every arc, then forget every vertex."""
    top = _introduce_chain(_Node(NodeKind.LEAF, ()), range(G.n))
    for a in G.arcs:
        top = _Node(NodeKind.INTRODUCE_EDGE, top.bag, arc=a, children=[top])
    bag = set(top.bag)
    for v in range(G.n):
        bag.discard(v)
        top = _Node(NodeKind.FORGET_VERTEX, bag, vertex=v, children=[top])
    return NiceTreeDecomposition._from_root(top)


def nice_decomposition(G: Digraph, source="min-fill") -> NiceTreeDecomposition:
    """Disciplined decomposition from a strategy name or a plain decomposition."""
    if isinstance(source, TreeDecomposition):
        return to_nice(source, G)
    if source == "naive-path":
        return naive_path_decomposition(G)
    return to_nice(heuristic_td(G, source), G)


# -- discipline ----------------------------------------------------------------

def _check_arithmetic(ntd: NiceTreeDecomposition, G: Digraph) -> Validation:
    fail = Validation.fail
    for t, kind in enumerate(ntd.kinds):
        bag = set(ntd.bags[t])
        kids = ntd.children[t]
        child_bag = set(ntd.bags[kids[0]]) if kids else None
        where = f"node {t} ({ntd.describe(t, G)})"
        if any(not 0 <= v < G.n for v in bag):
            return fail("arithmetic", f"{where}: unknown vertex in bag")
        if kind is NodeKind.LEAF:
            if kids or bag:
                return fail("arithmetic", f"{where}: leaf must be empty")
        elif kind is NodeKind.JOIN:
            if len(kids) != 2 or any(set(ntd.bags[c]) != bag for c in kids):
                return fail("arithmetic",
                            f"{where}: join needs two children with its bag")
        elif len(kids) != 1:
            return fail("arithmetic", f"{where}: expected exactly one child")
        elif kind is NodeKind.INTRODUCE_VERTEX:
            v = ntd.vertices[t]
            if v in child_bag or bag != child_bag | {v}:
                return fail("arithmetic", f"{where}: bad introduce")
        elif kind is NodeKind.FORGET_VERTEX:
            v = ntd.vertices[t]
            if v not in child_bag or bag != child_bag - {v}:
                return fail("arithmetic", f"{where}: bad forget")
        elif kind is NodeKind.INTRODUCE_EDGE:
            arc = ntd.arcs[t]
            if arc is None or not G.has_arc(*arc):
                return fail("arithmetic", f"{where}: not an arc of the graph")
            if bag != child_bag or not set(arc) <= bag:
                return fail("arithmetic",
                            f"{where}: endpoints outside bag or bag changed")
    if ntd.bags and ntd.bags[ntd.root]:
        return fail("arithmetic", "root bag must be empty")
    return VALID


def validate_discipline(ntd: NiceTreeDecomposition, G: Digraph) -> Validation:
    """Check node-type arithmetic and the edge discipline T1 to T5."""
    if len(ntd) == 0:
        return Validation.fail("arithmetic", "empty decomposition")
    res = _check_arithmetic(ntd, G)
    if not res:
        return res
    fail = Validation.fail
    size = len(ntd)
    bagsets = [frozenset(b) for b in ntd.bags]

    # T1: each vertex's occurrence set has exactly one topmost node.
    tops = [0] * G.n
    for t in range(size):
        p = ntd.parent[t]
        for v in bagsets[t]:
            if p == -1 or v not in bagsets[p]:
                tops[v] += 1
    for v in range(G.n):
        if tops[v] != 1:
            what = "appears in no bag" if tops[v] == 0 else "is disconnected"
            return fail("T1", f"vertex {G.labels[v]} {what}")

    intro = {}
    forget = {}
    for t, kind in enumerate(ntd.kinds):
        if kind is NodeKind.INTRODUCE_EDGE:
            intro.setdefault(ntd.arcs[t], []).append(t)
        elif kind is NodeKind.FORGET_VERTEX:
            forget.setdefault(ntd.vertices[t], []).append(t)

    # T2: at least one introduction, never two on one root-to-node path.
    # Subtrees are post-order intervals, so nesting shows up between
    # neighbours in index order.
    for a in G.arcs:
        nodes = intro.get(a)
        if not nodes:
            return fail("T2", f"arc {G.labels[a[0]]}->{G.labels[a[1]]} "
                              "is never introduced")
        for x, y in zip(nodes, nodes[1:]):
            if ntd.is_ancestor(y, x):
                return fail("T2", f"arc {G.labels[a[0]]}->{G.labels[a[1]]} "
                                  f"introduced twice on a path (nodes {x}, {y})")

    # T3: unique forget, every introduce-edge bag holding v strictly below it.
    for v in range(G.n):
        nodes = forget.get(v, [])
        if len(nodes) != 1:
            return fail("T3", f"vertex {G.labels[v]} forgotten "
                              f"{len(nodes)} times")
    for nodes in intro.values():
        for t in nodes:
            for v in bagsets[t]:
                f = forget[v][0]
                if not (ntd.is_ancestor(f, t) and f != t):
                    return fail("T3", f"node {t} holds {G.labels[v]} but is "
                                      "not below its forget node")

    # T4 with bitsets: processed vertices W and the neighbourhood of the
    # already-forgotten part.
    nbr_mask = [0] * G.n
    for u, v in G.arcs:
        nbr_mask[u] |= 1 << v
        nbr_mask[v] |= 1 << u
    W = [0] * size
    NF = [0] * size
    for t in range(size):
        bag_mask = 0
        for v in bagsets[t]:
            bag_mask |= 1 << v
        kids = ntd.children[t]
        w, nf = bag_mask, 0
        for c in kids:
            w |= W[c]
            nf |= NF[c]
        if ntd.kinds[t] is NodeKind.FORGET_VERTEX:
            nf |= nbr_mask[ntd.vertices[t]]
        W[t], NF[t] = w, nf
        if ntd.kinds[t] is NodeKind.JOIN:
            s, s2 = kids
            if W[s] & W[s2] != bag_mask:
                return fail("T4", f"join {t}: child vertex sets meet outside "
                                  "the bag")
            if NF[s] & (W[s2] & ~bag_mask) or NF[s2] & (W[s] & ~bag_mask):
                return fail("T4", f"join {t}: edge between forgotten parts")

    # T5: bag-internal arcs at a join are introduced under both children.
    for t, kind in enumerate(ntd.kinds):
        if kind is not NodeKind.JOIN:
            continue
        bag = ntd.bags[t]
        for i, x in enumerate(bag):
            for y in bag[i + 1:]:
                for a in ((x, y), (y, x)):
                    if not G.has_arc(*a):
                        continue
                    nodes = intro[a]
                    for c in ntd.children[t]:
                        k = bisect.bisect_left(nodes, ntd.lo[c])
                        if k == len(nodes) or nodes[k] > c:
                            return fail(
                                "T5", f"join {t}: arc {G.labels[a[0]]}->"
                                      f"{G.labels[a[1]]} missing under child {c}")
    return VALID


def processed_subgraph(ntd: NiceTreeDecomposition, G: Digraph,
                       t: int) -> Digraph:
    """Vertices seen in the subtree of ``t`` with the arcs introduced there.

    Vertex labels and weights are those of ``G``; map back with
    ``G.index(sub.labels[i])``.
    """
    verts = set()
    arcs = set()
    for s in ntd.subtree(t):
        verts.update(ntd.bags[s])
        if ntd.kinds[s] is NodeKind.INTRODUCE_EDGE:
            arcs.add(ntd.arcs[s])
    verts = sorted(verts)
    local = {v: i for i, v in enumerate(verts)}
    return Digraph(len(verts), [(local[u], local[v]) for u, v in arcs],
                   labels=[G.labels[v] for v in verts],
                   weights=[G.weights[v] for v in verts])


# -- PACE .td ----------------------------------------------------------------

def read_td_pace(text: str, G: Digraph | None = None) -> TreeDecomposition:
    """Parse PACE-2017 ``.td``; vertex ``i`` in the file is id ``i - 1``.

    With ``G`` given the result is validated and errors are raised for
    violations.
    """
    header = None
    bags = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        where = f"line {lineno}"
        try:
            if parts[0] == "s":
                if header is not None or len(parts) != 5 or parts[1] != "td":
                    raise InputError(f"{where}: malformed 's td' header")
                header = tuple(int(x) for x in parts[2:])
            elif header is None:
                raise InputError(f"{where}: content before 's td' header")
            elif parts[0] == "b":
                if len(parts) < 2:
                    raise InputError(f"{where}: malformed bag line")
                i = int(parts[1])
                if not 1 <= i <= header[0]:
                    raise InputError(f"{where}: bag index {i} out of range")
                if i in bags:
                    raise InputError(f"{where}: duplicate bag {i}")
                verts = [int(x) for x in parts[2:]]
                if any(not 1 <= v <= header[2] for v in verts):
                    raise InputError(f"{where}: vertex out of range")
                bags[i] = frozenset(v - 1 for v in verts)
            else:
                if len(parts) != 2:
                    raise InputError(f"{where}: malformed tree edge")
                a, b = int(parts[0]), int(parts[1])
                if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                    raise InputError(f"{where}: bag index out of range")
                edges.append((a, b))
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"{where}: non-integer field") from None
    if header is None:
        raise InputError("missing 's td' header")
    n_bags, max_size, n = header
    for i in range(1, n_bags + 1):
        bags.setdefault(i, frozenset())
    if max(map(len, bags.values()), default=0) > max_size:
        raise InputError("a bag exceeds the declared maximum bag size")
    td = TreeDecomposition(bags, edges)
    if not td.is_tree():
        raise InputError("bag tree is disconnected or cyclic")
    if G is not None:
        if G.n != n:
            raise InputError(f"decomposition is for {n} vertices, graph has {G.n}")
        check = validate_td(G, td)
        if not check:
            raise DecompositionError(
                f"invalid tree decomposition: {check.message}", check.rule)
    return td


def write_td_pace(td: TreeDecomposition, n: int) -> str:
    ids = {t: i for i, t in enumerate(sorted(td.bags), 1)}
    max_size = max((len(b) for b in td.bags.values()), default=0)
    lines = [f"s td {len(ids)} {max_size} {n}"]
    for t, i in ids.items():
        verts = " ".join(str(v + 1) for v in sorted(td.bags[t]))
        lines.append(f"b {i} {verts}".rstrip())
    for a, b in td.edges:
        lines.append(f"{ids[a]} {ids[b]}")
    return "\n".join(lines) + "\n"
