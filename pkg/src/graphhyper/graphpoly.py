"""The graph polynomial Psi by enumeration, matrix-tree, and deletion-contraction.

    Psi(G) = sum over maximal spanning forests F of prod_{e not in F} t_e

All three routes return a ``PsiResult``; the enumeration is the oracle the
other two are checked against.
"""

from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass

from .multigraph import (
    CANONICAL_VERTEX_BOUND,
    EdgeClass,
    Multigraph,
    _DSU,
    canonical_relabeling,
    canonical_key,
    classify_edge,
    connected_components,
    contract_edge,
    delete_edge,
)
from .multipoly import MultiPoly

__all__ = [
    "Method",
    "PsiResult",
    "GuardError",
    "psi",
    "psi_enumerate",
    "psi_recursion",
    "psi_matrix_tree",
    "check_delcon_identity",
    "spanning_tree_polynomial",
]

ENUMERATE_MAX_EDGES = 20
MATRIX_TREE_MAX_EDGES = 16


class GuardError(RuntimeError):
    """A size guard refused an exponential computation."""


class Method(enum.Enum):
    ENUMERATION = "Enumeration"
    MATRIX_TREE = "MatrixTree"
    RECURSION = "Recursion"


@dataclass(frozen=True)
class PsiResult:
    polynomial: MultiPoly
    method: Method
    forest_count: int

    def __post_init__(self):
        if not self.polynomial.is_multilinear() or any(c != 1 for c in self.polynomial.terms.values()):
            raise AssertionError("graph polynomial must be multilinear with unit coefficients")
        if len(self.polynomial) != self.forest_count:
            raise AssertionError("monomial count disagrees with forest count")


def _result(poly: MultiPoly, method: Method) -> PsiResult:
    return PsiResult(poly, method, len(poly))


# --------------------------------------------------------------------------
# enumeration


def psi_enumerate(g: Multigraph, *, max_edges: int = ENUMERATE_MAX_EDGES) -> PsiResult:
    """Sum over all edge subsets of rank size that form a spanning forest."""
    n = len(g.edges)
    if n > max_edges:
        raise GuardError(f"enumeration limited to {max_edges} edges, graph has {n}")
    ids = g.edge_ids
    dsu = _DSU(g.vertices)
    rank = sum(dsu.union(*e.ends) for e in g.edges)
    terms = {}
    for forest in itertools.combinations(range(n), rank):
        dsu = _DSU(g.vertices)
        if all(dsu.union(*g.edges[i].ends) for i in forest):
            chosen = set(forest)
            terms[tuple(0 if i in chosen else 1 for i in range(n))] = 1
    return _result(MultiPoly(ids, terms), Method.ENUMERATION)


# --------------------------------------------------------------------------
# matrix-tree


def _bareiss_det(matrix: list[list[MultiPoly]], universe: tuple[str, ...]) -> MultiPoly:
    """Fraction-free Gaussian elimination; every division is exact."""
    a = [row[:] for row in matrix]
    size = len(a)
    if size == 0:
        return MultiPoly.constant(1, universe)
    sign = 1
    prev = MultiPoly.constant(1, universe)
    for k in range(size - 1):
        if a[k][k].is_zero():
            swap = next((r for r in range(k + 1, size) if not a[r][k].is_zero()), None)
            if swap is None:
                return MultiPoly(universe)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]).divexact(prev)
        prev = a[k][k]
    det = a[size - 1][size - 1]
    return -det if sign < 0 else det


def spanning_tree_polynomial(g: Multigraph) -> MultiPoly:
    """Kirchhoff polynomial sum_T prod_{e in T} x_e of a connected graph.

    Computed as a reduced weighted-Laplacian determinant; loops never enter.
    """
    universe = g.edge_ids
    verts = list(g.vertices)
    pos = {v: i for i, v in enumerate(verts)}
    size = len(verts)
    zero = MultiPoly(universe)
    lap = [[zero] * size for _ in range(size)]
    for e in g.edges:
        if e.is_loop:
            continue
        x = MultiPoly.var(e.id, universe)
        a, b = pos[e.ends[0]], pos[e.ends[1]]
        lap[a][a] = lap[a][a] + x
        lap[b][b] = lap[b][b] + x
        lap[a][b] = lap[a][b] - x
        lap[b][a] = lap[b][a] - x
    reduced = [row[1:] for row in lap[1:]]
    return _bareiss_det(reduced, universe)


def psi_matrix_tree(g: Multigraph, *, max_edges: int = MATRIX_TREE_MAX_EDGES) -> PsiResult:
    n = len(g.edges)
    if n > max_edges:
        raise GuardError(f"matrix-tree route limited to {max_edges} edges, graph has {n}")
    universe = g.edge_ids
    total = MultiPoly.constant(1, universe)
    for comp in connected_components(g):
        kirchhoff = spanning_tree_polynomial(comp)
        if not kirchhoff.has_integer_coefficients():
            raise ArithmeticError("Kirchhoff polynomial must have integer coefficients")
        # complement each tree monomial within the component's edges
        comp_ids = [universe.index(i) for i in comp.edge_ids]
        local = {}
        for mono, c in kirchhoff.with_variables(universe).terms.items():
            flipped = [0] * len(universe)
            for i in comp_ids:
                flipped[i] = 1 - mono[i]
            local[tuple(flipped)] = c
        total = total * MultiPoly(universe, local)
    return _result(total, Method.MATRIX_TREE)


# --------------------------------------------------------------------------
# deletion-contraction recursion


class _Memo:
    """Canonical-key memo; inserts are idempotent so races are harmless."""

    def __init__(self):
        self._data: dict[bytes, MultiPoly] = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        with self._lock:
            self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()


_memo = _Memo()


def _psi_canonical(g: Multigraph) -> MultiPoly:
    """Psi of a graph already in canonical form (edges ``t1..tn``)."""
    key = canonical_key(g)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    ids = g.edge_ids
    if not ids or all(classify_edge(g, e) == EdgeClass.BRIDGE for e in ids):
        poly = MultiPoly.constant(1, ids)
    else:
        e = next(x.id for x in g.edges if classify_edge(g, x.id) != EdgeClass.BRIDGE)
        deletion = _psi_relabeled(delete_edge(g, e))
        if g.edge(e).is_loop:
            poly = MultiPoly.var(e, ids) * deletion
        else:
            poly = MultiPoly.var(e, ids) * deletion + _psi_relabeled(contract_edge(g, e))
        poly = poly.with_variables(ids)
    _memo.put(key, poly)
    return poly


def _psi_relabeled(g: Multigraph) -> MultiPoly:
    """Psi of an arbitrary graph, computed via its canonical form and renamed back."""
    canon, mapping = canonical_relabeling(g)
    base = _psi_canonical(canon)
    pos = {v: i for i, v in enumerate(canon.edge_ids)}
    order = [pos[mapping[e]] for e in g.edge_ids]
    renamed = {tuple(mono[i] for i in order): c for mono, c in base.terms.items()}
    return MultiPoly(g.edge_ids, renamed)


def psi_recursion(g: Multigraph) -> PsiResult:
    """Deletion-contraction with loops, bridges and forests handled directly.

    Isomorphic subproblems share work through a memo keyed by canonical key.
    Graphs above the canonical-labeling vertex bound recurse without memo.
    """
    if len(g.vertices) <= CANONICAL_VERTEX_BOUND:
        return _result(_psi_relabeled(g), Method.RECURSION)
    return _result(_psi_plain(g), Method.RECURSION)


def _psi_plain(g: Multigraph) -> MultiPoly:
    ids = g.edge_ids
    for x in g.edges:
        cls = classify_edge(g, x.id)
        if cls == EdgeClass.BRIDGE:
            continue
        t = MultiPoly.var(x.id, ids)
        if cls == EdgeClass.LOOP:
            return (t * _psi_plain(delete_edge(g, x.id))).with_variables(ids)
        return (t * _psi_plain(delete_edge(g, x.id)) + _psi_plain(contract_edge(g, x.id))).with_variables(ids)
    return MultiPoly.constant(1, ids)


def psi(g: Multigraph) -> MultiPoly:
    """Psi via the memoized recursion."""
    return psi_recursion(g).polynomial


def check_delcon_identity(g: Multigraph, e: str) -> bool:
    """Check Psi(G) = t_e Psi(G minus e) + Psi(G/e) exactly."""
    cls = classify_edge(g, e)
    if cls == EdgeClass.BRIDGE:
        raise ValueError(f"edge {e!r} is a bridge: the identity is Psi(G) = Psi(G/e)")
    if cls == EdgeClass.LOOP:
        raise ValueError(f"edge {e!r} is a loop: the identity is Psi(G) = t_e * Psi(G minus e)")
    whole = psi_enumerate(g).polynomial
    rhs = MultiPoly.var(e, g.edge_ids) * psi_enumerate(delete_edge(g, e)).polynomial + psi_enumerate(
        contract_edge(g, e)
    ).polynomial
    return whole == rhs
