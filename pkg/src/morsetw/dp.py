"""Order/mask dynamic program for feedback Morse orders on a nice decomposition.

A state at node ``t`` is ``(g, mask)``: ``g`` orders the bag and bit ``i`` of
``mask`` says that ``g[i]`` is already matched by an arc introduced below
``t``. A node's value for a state is the least weight of unmatched forgotten
vertices over all compatible orders of the processed subgraph; infeasible
states are absent from the table.

Tables are column arrays, one row per state. An order is stored as one
integer: the digits, base ``b``, are the bag-local slots of its vertices,
most significant first, so numeric order is lexicographic order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .digraph import (Digraph, SolveResult, Status, backward_edges,
                      matched_vertices, objective, order_of_matching)
from .errors import CapExceeded, DecompositionError
from .treedecomp import (NiceTreeDecomposition, NodeKind, nice_decomposition,
                         validate_discipline)

DEFAULT_BAG_CAP = 14
_JOIN_CHUNK = 1 << 20


def _powers(b: int) -> np.ndarray:
    return np.int64(b) ** np.arange(b - 1, -1, -1, dtype=np.int64)


def encode(slots: np.ndarray) -> np.ndarray:
    """Row-wise slot matrix (values ``0..b-1``) to order codes."""
    b = slots.shape[1]
    if b == 0:
        return np.zeros(len(slots), dtype=np.int64)
    return slots.astype(np.int64) @ _powers(b)


def decode(codes: np.ndarray, b: int) -> np.ndarray:
    """Inverse of :func:`encode`; returns an int8 slot matrix."""
    out = np.empty((len(codes), b), dtype=np.int8)
    rest = codes.copy()
    for j in range(b - 1, -1, -1):
        out[:, j] = rest % b
        rest //= b
    return out


class Table:
    """States of one node: ``codes[r]`` encodes the bag order of row ``r``,
    ``masks[r]`` holds its matched bits by position and ``values[r]`` its
    cost. ``back`` (and ``back_right`` at joins) index the chosen child rows."""

    __slots__ = ("bag", "codes", "masks", "values", "back", "back_right")

    def __init__(self, bag, codes, masks, values, back=None, back_right=None):
        self.bag = tuple(bag)
        self.codes = codes
        self.masks = masks
        self.values = values
        self.back = back
        self.back_right = back_right

    def __len__(self):
        return len(self.masks)

    @property
    def slots(self) -> np.ndarray:
        return decode(self.codes, len(self.bag))

    @property
    def orders(self) -> np.ndarray:
        """Vertex-id matrix, one order per row."""
        return np.asarray(self.bag, dtype=np.int64)[self.slots]

    def order(self, r: int) -> tuple:
        return tuple(self.bag[s] for s in decode(self.codes[r:r + 1],
                                                 len(self.bag))[0])

    @classmethod
    def from_dict(cls, entries: dict, dtype=np.int64) -> "Table":
        """Build from ``{(order, matched vertex set): value}``."""
        rows = sorted(entries.items(), key=lambda kv: (kv[0][0],
                                                       sorted(kv[0][1])))
        if not rows:
            raise ValueError("use an explicit bag for an empty table")
        bag = tuple(sorted(rows[0][0][0]))
        slot = {x: i for i, x in enumerate(bag)}
        slots = np.array([[slot[x] for x in g] for (g, _), _ in rows],
                         dtype=np.int8).reshape(len(rows), len(bag))
        masks = np.array([sum(1 << i for i, x in enumerate(g) if x in U)
                          for (g, U), _ in rows], dtype=np.int64)
        values = np.array([v for _, v in rows], dtype=dtype)
        return cls(bag, encode(slots), masks, values)

    def as_dict(self) -> dict:
        """``{(order, matched vertex set): value}`` with Python scalars."""
        out = {}
        for g, m, v in zip(self.orders.tolist(), self.masks.tolist(),
                           self.values.tolist()):
            out[(tuple(g), frozenset(x for i, x in enumerate(g)
                                     if m >> i & 1))] = v
        return out

    def get(self, order, matched):
        """Value of one state, or ``None`` when it is infeasible."""
        return self.as_dict().get((tuple(order), frozenset(matched)))


def _first_per_group(keys_primary: list, tiebreak: list) -> np.ndarray:
    """Row index of the best row per distinct primary key.

    Rows are ranked by ``tiebreak`` keys (most significant first) within
    each group; ``np.lexsort`` wants the most significant key last.
    """
    order = np.lexsort(tuple(reversed(keys_primary + tiebreak)))
    if len(order) == 0:
        return order
    change = np.zeros(len(order), dtype=bool)
    change[0] = True
    for key in keys_primary:
        k = key[order]
        change[1:] |= k[1:] != k[:-1]
    return order[change]


def leaf_init(dtype=np.int64) -> Table:
    return Table((), np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64),
                 np.zeros(1, dtype=dtype))


def introduce_vertex_step(child: Table, v: int) -> Table:
    """Insert ``v`` unmatched at every position of every child order."""
    bag = tuple(sorted(child.bag + (v,)))
    sv = bag.index(v)
    slots = child.slots
    slots[slots >= sv] += 1
    b = slots.shape[1]
    codes, masks = [], []
    for i in range(b + 1):
        codes.append(encode(np.insert(slots, i, sv, axis=1)))
        masks.append((child.masks & ((1 << i) - 1))
                     | ((child.masks >> i) << (i + 1)))
    rows = np.arange(len(child), dtype=np.int64)
    return Table(bag, np.concatenate(codes), np.concatenate(masks),
                 np.tile(child.values, b + 1), np.tile(rows, b + 1))


def _position(slots: np.ndarray, s: int) -> np.ndarray:
    return (slots == s).argmax(axis=1).astype(np.int64)


def introduce_edge_step(child: Table, u: int, v: int) -> Table:
    """Arc ``u -> v`` is kept when forward; when backward it must match both
    endpoints, which therefore have to be free in the child."""
    slots = child.slots
    pu = _position(slots, child.bag.index(u))
    pv = _position(slots, child.bag.index(v))
    both = (np.int64(1) << pu) | (np.int64(1) << pv)
    backward = pv < pu
    keep = ~backward | (child.masks & both == 0)
    masks = np.where(backward, child.masks | both, child.masks)
    rows = np.flatnonzero(keep)
    return Table(child.bag, child.codes[rows], masks[rows],
                 child.values[rows], rows)


def forget_vertex_step(child: Table, v: int, weight) -> Table:
    """Drop ``v`` from the bag, paying ``weight`` if it stayed unmatched.

    Among child states projecting to the same parent state the cheapest
    wins; ties go to the lexicographically smallest child (order, mask).
    """
    sv = child.bag.index(v)
    slots = child.slots
    s, b = slots.shape
    col = _position(slots, sv)
    matched = (child.masks >> col) & 1
    values = child.values + np.where(matched == 1, 0, weight).astype(
        child.values.dtype)
    rest = slots[slots != sv].reshape(s, b - 1)
    rest[rest > sv] -= 1
    codes = encode(rest)
    del slots, rest
    masks = (child.masks & ((np.int64(1) << col) - 1)) \
        | ((child.masks >> (col + 1)) << col)
    rows = _first_per_group([codes, masks],
                            [values, child.codes, child.masks])
    bag = child.bag[:sv] + child.bag[sv + 1:]
    return Table(bag, codes[rows], masks[rows], values[rows], rows)


def bag_internal_forced_set(G: Digraph, order):
    """Endpoints of arcs inside the bag that run backward in ``order``.

    Returns ``(vertices, conflict)``; ``conflict`` is true when two such arcs
    share an endpoint, which makes every state with this order infeasible.
    """
    pos = {x: i for i, x in enumerate(order)}
    forced = set()
    conflict = False
    for u in order:
        for v in G.out_nbrs[u]:
            if v in pos and pos[v] < pos[u]:
                if u in forced or v in forced:
                    conflict = True
                forced.update((u, v))
    return frozenset(forced), conflict


def _forced_masks(bag, codes: np.ndarray, bag_arcs):
    """Vectorised forced set (as position masks) and conflict flags."""
    forced = np.zeros(len(codes), dtype=np.int64)
    conflict = np.zeros(len(codes), dtype=bool)
    if not bag_arcs:
        return forced, conflict
    pos = np.argsort(decode(codes, len(bag)), axis=1).astype(np.int64)
    slot = {x: i for i, x in enumerate(bag)}
    for u, v in bag_arcs:
        pu, pv = pos[:, slot[u]], pos[:, slot[v]]
        both = np.where(pv < pu, (np.int64(1) << pu) | (np.int64(1) << pv), 0)
        conflict |= (forced & both) != 0
        forced |= both
    return forced, conflict


def _join_chunk(left, right, li, ri, forced_row):
    """Filter candidate pairs and keep the best pair per parent state."""
    a = left.masks[li]
    bm = right.masks[ri]
    f = forced_row
    good = (bm & f == f) & ((a & ~f) & bm == 0)
    li, ri, a, bm = li[good], ri[good], a[good], bm[good]
    masks = a | bm
    values = left.values[li] + right.values[ri]
    codes = left.codes[li]
    keep = _first_per_group([codes, masks], [values, a])
    return codes[keep], masks[keep], values[keep], li[keep], ri[keep]


def _drain(chunks: list) -> np.ndarray:
    out = np.concatenate(chunks)
    chunks.clear()
    return out


def join_step(left: Table, right: Table, bag_arcs) -> Table:
    """Merge two children that share the bag and the order ``g``.

    Outside the forced set a bag vertex is matched in at most one child, so a
    left mask ``A`` and right mask ``B`` combine iff both contain the forced
    set and ``A - forced`` is disjoint from ``B``. Ties go to the smallest
    left mask.
    """
    bag = left.bag
    assert right.bag == bag
    lsort = np.argsort(left.codes, kind="stable")
    rsort = np.argsort(right.codes, kind="stable")
    lcodes = left.codes[lsort]
    rcodes = right.codes[rsort]
    ucodes, gstart, gcount = np.unique(lcodes, return_index=True,
                                       return_counts=True)
    rlo = np.searchsorted(rcodes, ucodes, side="left")
    rcount = np.searchsorted(rcodes, ucodes, side="right") - rlo
    forced, conflict = _forced_masks(bag, ucodes, bag_arcs)
    group = np.repeat(np.arange(len(ucodes)), gcount)
    row_forced = forced[group]
    usable = ~conflict[group] & (left.masks[lsort] & row_forced == row_forced)
    row_pairs = np.where(usable, rcount[group], 0)
    group_pairs = np.add.reduceat(row_pairs, gstart) if len(gstart) else         np.zeros(0, dtype=np.int64)
    cum = np.cumsum(group_pairs)

    parts = []
    g0 = 0
    while g0 < len(ucodes):
        # Whole order groups per chunk, so chunks never share a parent state.
        base = cum[g0 - 1] if g0 else 0
        g1 = max(int(np.searchsorted(cum, base + _JOIN_CHUNK, side="right")),
                 g0 + 1)
        r0 = gstart[g0]
        r1 = gstart[g1] if g1 < len(gstart) else len(lcodes)
        counts = row_pairs[r0:r1]
        if counts.sum():
            li = np.repeat(lsort[r0:r1], counts)
            offsets = np.repeat(np.cumsum(counts) - counts, counts)
            gr = np.repeat(group[r0:r1], counts)
            ri = rsort[rlo[gr] + np.arange(len(li)) - offsets]
            parts.append(_join_chunk(left, right, li, ri, forced[gr]))
        g0 = g1
    if parts:
        # Column by column, dropping each source as soon as it is copied.
        columns = [list(c) for c in zip(*parts)]
        del parts
        codes, masks, values, li, ri = (_drain(c) for c in columns)
    else:
        codes = masks = li = ri = np.zeros(0, dtype=np.int64)
        values = np.zeros(0, dtype=left.values.dtype)
    return Table(bag, codes, masks, values, li, ri)


@dataclass
class StateStats:
    """Realised table sizes of one solve."""

    counts: list
    bag_sizes: list
    kinds: list = field(repr=False, default_factory=list)

    @property
    def max_bag_size(self) -> int:
        return max(self.bag_sizes, default=0)

    @property
    def peak_states(self) -> int:
        return max(self.counts, default=0)

    @property
    def total_states(self) -> int:
        return sum(self.counts)

    def violations(self) -> list:
        """Nodes whose table exceeds ``b! * 2**b`` for bag size ``b``."""
        return [t for t, (c, b) in enumerate(zip(self.counts, self.bag_sizes))
                if c > math.factorial(b) * 2 ** b]

    def check_bound(self) -> None:
        bad = self.violations()
        assert not bad, f"state bound violated at nodes {bad[:5]}"

    def to_dict(self) -> dict:
        return {"nodes": len(self.counts), "max_bag_size": self.max_bag_size,
                "peak_states": self.peak_states,
                "total_states": self.total_states, "counts": self.counts,
                "bag_sizes": self.bag_sizes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def state_stats(run: "DPRun") -> StateStats:
    stats = StateStats(list(run.counts),
                       [len(b) for b in run.ntd.bags],
                       [k.value for k in run.ntd.kinds])
    stats.check_bound()
    return stats


def _value_dtype(weights):
    if all(float(w).is_integer() for w in weights):
        return np.int64
    return np.float64


class DPRun:
    """All node tables of one bottom-up evaluation."""

    def __init__(self, G: Digraph, ntd: NiceTreeDecomposition, weights=None,
                 keep_tables: bool = True):
        self.graph = G
        self.ntd = ntd
        self.weights = tuple(G.weights if weights is None else weights)
        self.dtype = _value_dtype(self.weights)
        self.keep_tables = keep_tables
        self.tables: list[Table] = []
        self.counts: list[int] = []
        self._evaluate()

    def _bag_arcs(self, t: int) -> list:
        G = self.graph
        bag = self.ntd.bags[t]
        arcs = []
        for i, x in enumerate(bag):
            for y in bag[i + 1:]:
                if G.has_arc(x, y):
                    arcs.append((x, y))
                if G.has_arc(y, x):
                    arcs.append((y, x))
        return arcs

    def _evaluate(self) -> None:
        ntd = self.ntd
        tables = self.tables
        for t, kind in enumerate(ntd.kinds):
            kids = ntd.children[t]
            if kind is NodeKind.LEAF:
                table = leaf_init(self.dtype)
            elif kind is NodeKind.INTRODUCE_VERTEX:
                table = introduce_vertex_step(tables[kids[0]], ntd.vertices[t])
            elif kind is NodeKind.INTRODUCE_EDGE:
                table = introduce_edge_step(tables[kids[0]], *ntd.arcs[t])
            elif kind is NodeKind.FORGET_VERTEX:
                v = ntd.vertices[t]
                w = self.weights[v]
                if self.dtype is np.int64:
                    w = int(w)
                table = forget_vertex_step(tables[kids[0]], v, w)
            else:
                table = join_step(tables[kids[0]], tables[kids[1]],
                                  self._bag_arcs(t))
            tables.append(table)
            self.counts.append(len(table))
            if not self.keep_tables:
                for c in kids:
                    tables[c] = self._slim(c)

    def _slim(self, t: int) -> Table:
        # Reconstruction needs only backpointers, plus orders where an arc
        # is introduced.
        tb = self.tables[t]
        edge = self.ntd.kinds[t] is NodeKind.INTRODUCE_EDGE
        narrow = (lambda a: None if a is None else a.astype(np.int32))
        return Table(tb.bag, tb.codes if edge else None, None, None,
                     narrow(tb.back), narrow(tb.back_right))

    @property
    def value(self):
        root = self.tables[self.ntd.root]
        return root.values[0].item() if len(root) else None

    def table(self, t: int) -> dict:
        """Node table as ``{(order, matched vertex set): value}``; needs
        ``keep_tables``."""
        if not self.keep_tables and t != self.ntd.root:
            raise ValueError("tables were discarded; use keep_tables=True")
        return self.tables[t].as_dict()

    def chosen_rows(self) -> dict:
        """Replay backpointers from the root; node -> chosen row."""
        ntd = self.ntd
        if not len(self.tables[ntd.root]):
            return {}
        chosen = {}
        stack = [(ntd.root, 0)]
        while stack:
            t, r = stack.pop()
            chosen[t] = r
            table = self.tables[t]
            kids = ntd.children[t]
            if ntd.kinds[t] is NodeKind.JOIN:
                stack.append((kids[0], int(table.back[r])))
                stack.append((kids[1], int(table.back_right[r])))
            elif kids:
                stack.append((kids[0], int(table.back[r])))
        return chosen

    def matching(self) -> frozenset:
        """Arcs that the chosen states route through the backward branch."""
        matched = set()
        ntd = self.ntd
        for t, r in self.chosen_rows().items():
            if ntd.kinds[t] is NodeKind.INTRODUCE_EDGE:
                u, v = ntd.arcs[t]
                g = self.tables[t].order(r)
                if g.index(v) < g.index(u):
                    matched.add((u, v))
        return frozenset(matched)

    def result(self) -> SolveResult:
        stats = state_stats(self)
        value = self.value
        if value is None:
            return SolveResult(Status.INFEASIBLE, stats=stats)
        G = self.graph
        matching = self.matching()
        order = order_of_matching(G, matching)
        assert backward_edges(G, order) == matching
        value = objective(G, matching, self.weights)
        assert value == self.value, \
            "reconstructed matching does not realise the optimum"
        unmatched = frozenset(range(G.n)) - matched_vertices(matching)
        return SolveResult(Status.OPTIMAL, value, order, matching, unmatched,
                           stats=stats)


def check_bag_cap(ntd: NiceTreeDecomposition, bag_cap: int) -> None:
    size = ntd.width + 1
    if size > bag_cap:
        raise CapExceeded(
            f"largest bag has {size} vertices (width {ntd.width}), "
            f"cap is {bag_cap}", size=size, cap=bag_cap)


def run_dp(G: Digraph, ntd: NiceTreeDecomposition | None = None,
           weights=None, bag_cap: int = DEFAULT_BAG_CAP,
           validate: bool = True, keep_tables: bool = True) -> DPRun:
    if ntd is None:
        ntd = nice_decomposition(G)
    check_bag_cap(ntd, bag_cap)
    if validate:
        check = validate_discipline(ntd, G)
        if not check:
            raise DecompositionError(
                f"decomposition violates {check.rule}: {check.message}",
                check.rule)
    return DPRun(G, ntd, weights, keep_tables)


def solve_fmo(G: Digraph, ntd=None, weights=None,
              bag_cap: int = DEFAULT_BAG_CAP, validate: bool = True
              ) -> SolveResult:
    """Optimal feedback Morse order of ``G``.

    ``ntd`` is a disciplined nice decomposition, a plain
    ``TreeDecomposition``, a strategy name (``"min-fill"``, ``"min-degree"``,
    ``"naive-path"``) or ``None`` for min-fill. The returned order's backward
    arcs are the returned matching and its unmatched weight is the value.
    """
    if not isinstance(ntd, NiceTreeDecomposition):
        ntd = nice_decomposition(G, "min-fill" if ntd is None else ntd)
    return run_dp(G, ntd, weights, bag_cap, validate,
                  keep_tables=False).result()
