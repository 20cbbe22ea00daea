"""Regular complexes, Hasse diagrams, optimal Morse matchings, erasibility.

Cells are numbered ``0..N-1`` by ``(dimension, vertex tuple)`` and the Hasse
diagram uses the same numbering, so solver vertex ``i`` is cell ``i``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .digraph import Digraph, topological_order
from .dp import DEFAULT_BAG_CAP, solve_fmo
from .errors import ContractViolation, InputError
from .oracle import greedy_erase


def _vertex_key(label: str):
    try:
        return (0, int(label), label)
    except ValueError:
        return (1, 0, label)


class RegularComplex:
    """Cells graded by dimension with their cover relations.

    For simplicial complexes ``simplices[i]`` is the sorted tuple of vertex
    indices of cell ``i`` (indices into ``vertex_labels``); for explicit
    regular CW input it is ``None``.
    """

    def __init__(self, dims, covers, labels, weights=None, simplices=None,
                 vertex_labels=None):
        self.dims = tuple(dims)
        self.labels = tuple(labels)
        self.simplices = None if simplices is None else tuple(simplices)
        self.vertex_labels = None if vertex_labels is None else tuple(vertex_labels)
        n = len(self.dims)
        if len(self.labels) != n or len(set(self.labels)) != n:
            raise InputError("cell ids must be unique")
        covers = sorted(set(covers))
        for f, c in covers:
            if not (0 <= f < n and 0 <= c < n):
                raise InputError(f"cover ({f}, {c}) references an unknown cell")
            if self.dims[c] != self.dims[f] + 1:
                raise InputError(
                    f"cover {self.labels[f]} < {self.labels[c]} does not step "
                    "dimension by one")
        self.covers = tuple(covers)
        if weights is None:
            weights = [1] * n
        self.weights = tuple(weights)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if self.simplices is not None:
            self._simplex_index = {s: i for i, s in enumerate(self.simplices)}

    @classmethod
    def from_simplices(cls, maximal, weights=None) -> "RegularComplex":
        """Downward closure of the given simplices (iterables of labels).

        ``weights`` maps a cell, given as a label tuple or a comma-joined
        string, to its weight; unlisted cells weigh 1.
        """
        maximal = [tuple(str(x) for x in s) for s in maximal]
        vlabels = sorted({x for s in maximal for x in s}, key=_vertex_key)
        vindex = {x: i for i, x in enumerate(vlabels)}
        cells = set()
        for s in maximal:
            if not s or len(set(s)) != len(s):
                raise InputError(f"malformed simplex {s}")
            s = tuple(sorted(vindex[x] for x in s))
            for k in range(1, len(s) + 1):
                cells.update(itertools.combinations(s, k))
        simplices = sorted(cells, key=lambda s: (len(s), s))
        index = {s: i for i, s in enumerate(simplices)}
        covers = []
        for i, s in enumerate(simplices):
            if len(s) > 1:
                for j in range(len(s)):
                    covers.append((index[s[:j] + s[j + 1:]], i))
        labels = [",".join(vlabels[v] for v in s) for s in simplices]
        w = [1] * len(simplices)
        for spec, val in (weights or {}).items():
            if isinstance(spec, str):
                spec = spec.split(",")
            try:
                key = tuple(sorted(vindex[str(x)] for x in spec))
                w[index[key]] = val
            except KeyError:
                raise InputError(f"weight for unknown cell {spec!r}") from None
        return cls([len(s) - 1 for s in simplices], covers, labels, w,
                   simplices, vlabels)

    @property
    def n_cells(self) -> int:
        return len(self.dims)

    @property
    def dimension(self) -> int:
        return max(self.dims, default=-1)

    @property
    def is_simplicial(self) -> bool:
        return self.simplices is not None

    def cells_of_dim(self, d: int) -> list:
        return [i for i, x in enumerate(self.dims) if x == d]

    def index(self, label) -> int:
        if isinstance(label, (tuple, list)):
            label = ",".join(str(x) for x in label)
        if label in self._index:
            return self._index[label]
        if self.is_simplicial:
            try:
                vindex = {x: i for i, x in enumerate(self.vertex_labels)}
                return self.index_of_simplex(
                    tuple(vindex[x] for x in str(label).split(",")))
            except KeyError:
                pass
        raise ContractViolation(f"unknown cell {label!r}")

    def index_of_simplex(self, simplex) -> int:
        try:
            return self._simplex_index[tuple(sorted(simplex))]
        except (KeyError, AttributeError):
            raise ContractViolation(f"unknown simplex {simplex!r}") from None

    def f_vector(self) -> list:
        f = [0] * (self.dimension + 1)
        for d in self.dims:
            f[d] += 1
        return f

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.dims)

    def with_weights(self, weights) -> "RegularComplex":
        return RegularComplex(self.dims, self.covers, self.labels, weights,
                              self.simplices, self.vertex_labels)

    def __repr__(self):
        return f"RegularComplex(f={self.f_vector()})"


def load_complex(text: str) -> RegularComplex:
    """Parse the ``.sc`` format: simplicial (``p sc``) or explicit (``p cw``)."""
    mode = None
    maximal, seen = [], set()
    weights = {}
    cells, cell_ids, covers = [], {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag, where = parts[0], f"line {lineno}"
        if tag == "p":
            if mode is not None or len(parts) != 2 or parts[1] not in ("sc", "cw"):
                raise InputError(f"{where}: expected 'p sc' or 'p cw'")
            mode = parts[1]
        elif mode is None:
            raise InputError(f"{where}: content before the 'p' header")
        elif tag == "w":
            if len(parts) != 3:
                raise InputError(f"{where}: expected 'w <cell> <weight>'")
            try:
                weights[parts[1]] = float(parts[2])
            except ValueError:
                raise InputError(f"{where}: bad weight {parts[2]!r}") from None
        elif mode == "sc" and tag == "s":
            simplex = parts[1:]
            if not simplex or len(set(simplex)) != len(simplex):
                raise InputError(f"{where}: malformed simplex")
            key = frozenset(simplex)
            if key in seen:
                raise InputError(f"{where}: duplicate maximal simplex")
            seen.add(key)
            maximal.append(simplex)
        elif mode == "cw" and tag == "cell":
            if len(parts) != 3:
                raise InputError(f"{where}: expected 'cell <id> <dim>'")
            if parts[1] in cell_ids:
                raise InputError(f"{where}: duplicate cell {parts[1]!r}")
            try:
                dim = int(parts[2])
            except ValueError:
                raise InputError(f"{where}: bad dimension") from None
            if dim < 0:
                raise InputError(f"{where}: negative dimension")
            cell_ids[parts[1]] = len(cells)
            cells.append((parts[1], dim))
        elif mode == "cw" and tag == "cover":
            if len(parts) != 3:
                raise InputError(f"{where}: expected 'cover <face> <coface>'")
            try:
                covers.append((cell_ids[parts[1]], cell_ids[parts[2]]))
            except KeyError as exc:
                raise InputError(f"{where}: unknown cell {exc}") from None
        else:
            raise InputError(f"{where}: unknown line type {tag!r}")
    if mode is None:
        raise InputError("missing 'p sc' / 'p cw' header")
    if mode == "sc":
        return RegularComplex.from_simplices(maximal, weights)
    order = sorted(range(len(cells)), key=lambda i: (cells[i][1], i))
    new = {old: i for i, old in enumerate(order)}
    labels = [cells[i][0] for i in order]
    w = [1] * len(cells)
    for lab, val in weights.items():
        if lab not in cell_ids:
            raise InputError(f"weight for unknown cell {lab!r}")
        w[new[cell_ids[lab]]] = val
    return RegularComplex([cells[i][1] for i in order],
                          [(new[f], new[c]) for f, c in covers], labels, w)


def format_complex(K: RegularComplex) -> str:
    """Serialise ``K``; simplicial complexes list their maximal simplices."""
    lines = []
    if K.is_simplicial:
        lines.append("p sc")
        has_coface = {f for f, _ in K.covers}
        for i, s in enumerate(K.simplices):
            if i not in has_coface:
                lines.append("s " + " ".join(K.vertex_labels[v] for v in s))
        for i, wt in enumerate(K.weights):
            if wt != 1:
                lines.append(f"w {K.labels[i]} {wt}")
    else:
        lines.append("p cw")
        for i, d in enumerate(K.dims):
            lines.append(f"cell {K.labels[i]} {d}")
        for f, c in K.covers:
            lines.append(f"cover {K.labels[f]} {K.labels[c]}")
        for i, wt in enumerate(K.weights):
            if wt != 1:
                lines.append(f"w {K.labels[i]} {wt}")
    return "\n".join(lines) + "\n"


def hasse_diagram(K: RegularComplex, weights=None) -> Digraph:
    """Face-to-coface digraph; vertex ``i`` is cell ``i``."""
    w = K.weights if weights is None else weights
    return Digraph(K.n_cells, K.covers, labels=K.labels, weights=w)


@dataclass(frozen=True)
class GradientField:
    """Matched ``(face, coface)`` cell pairs and the critical cells."""

    pairs: frozenset
    critical: frozenset

    def critical_by_dim(self, K: RegularComplex) -> list:
        counts = [0] * (K.dimension + 1)
        for c in self.critical:
            counts[K.dims[c]] += 1
        return counts


def verify_gradient_field(K: RegularComplex, field: GradientField) -> bool:
    """True iff the pairs are covers, form a matching, reversing them keeps
    the Hasse diagram acyclic, and ``critical`` is exactly the unpaired cells."""
    cells = set(range(K.n_cells))
    for f, c in field.pairs:
        if f not in cells or c not in cells:
            raise ContractViolation(f"pair ({f}, {c}) references an unknown cell")
    if not set(field.critical) <= cells:
        raise ContractViolation("critical set references an unknown cell")
    covers = set(K.covers)
    used = set()
    for f, c in field.pairs:
        if (f, c) not in covers or f in used or c in used:
            return False
        used.update((f, c))
    if set(field.critical) != cells - used:
        return False
    arcs = (covers - set(field.pairs)) | {(c, f) for f, c in field.pairs}
    return topological_order(K.n_cells, arcs) is not None


@dataclass(frozen=True)
class OMMResult:
    field: GradientField
    value: object
    result: object


def _check_morse_equality(K: RegularComplex, field: GradientField) -> None:
    alternating = sum((-1) ** K.dims[c] for c in field.critical)
    assert alternating == K.euler_characteristic(), \
        "alternating critical count differs from the Euler characteristic"


def solve_omm(K: RegularComplex, weights=None, decomposition="min-fill",
              bag_cap: int = DEFAULT_BAG_CAP) -> OMMResult:
    """Discrete gradient field of least total critical weight (weights >= 0)."""
    w = tuple(K.weights if weights is None else weights)
    if len(w) != K.n_cells:
        raise InputError("exactly one weight per cell is required")
    if any(x < 0 for x in w):
        raise InputError("optimal Morse matching needs nonnegative weights")
    H = hasse_diagram(K, w)
    res = solve_fmo(H, decomposition, bag_cap=bag_cap)
    # The empty matching is always a gradient field on a Hasse diagram.
    assert res.optimal
    field = GradientField(res.matching, res.unmatched)
    _check_morse_equality(K, field)
    return OMMResult(field, res.value, res)


@dataclass(frozen=True)
class ErasibilityInstance:
    complex: RegularComplex
    budget: int = 0

    def __post_init__(self):
        K = self.complex
        if not K.is_simplicial:
            raise InputError("erasibility needs a simplicial complex")
        if K.dimension > 2:
            raise InputError("erasibility needs a complex of dimension <= 2")
        if self.budget < 0:
            raise InputError("budget must be nonnegative")


@dataclass(frozen=True)
class ErasibilityResult:
    answer: bool
    witness: frozenset
    min_critical: int
    field: GradientField
    result: object = None


def erasibility_weights(K: RegularComplex) -> list:
    return [1 if d == 2 else 0 for d in K.dims]


def solve_erasibility(instance: ErasibilityInstance,
                      decomposition="min-fill",
                      bag_cap: int = DEFAULT_BAG_CAP) -> ErasibilityResult:
    """Least number of triangles to delete so that the rest collapses.

    Solves optimal Morse matching with weight 1 on triangles and 0 elsewhere;
    the critical triangles of the optimal field are the witness.
    """
    K = instance.complex
    omm = solve_omm(K, erasibility_weights(K), decomposition, bag_cap)
    witness = frozenset(c for c in omm.field.critical if K.dims[c] == 2)
    assert len(witness) == omm.value
    assert greedy_erase(K, witness)[0], "witness does not leave K erasible"
    return ErasibilityResult(omm.value <= instance.budget, witness,
                             int(omm.value), omm.field, omm.result)
