"""Named graphs and an exhaustive corpus of small connected multigraphs."""

from __future__ import annotations

import itertools

from .multigraph import Multigraph, canonical_form, canonical_key, from_edge_list, multiply_edge

__all__ = [
    "banana",
    "path",
    "cycle",
    "triangle",
    "complete_graph",
    "wheel",
    "doubled_edge_triangle",
    "doubled_triangle",
    "iifails_graph",
    "ifails_graph",
    "ifails_deletion",
    "two_bananas_at_vertex",
    "doubled_triangle_family",
    "corpus",
]


def banana(n: int) -> Multigraph:
    """n parallel edges t1..tn on vertices 0, 1."""
    return from_edge_list([(0, 1)] * n, vertices=(0, 1))


def path(n: int) -> Multigraph:
    return from_edge_list([(i, i + 1) for i in range(n)], vertices=range(n + 1))


def cycle(n: int) -> Multigraph:
    if n < 1:
        raise ValueError("a cycle needs at least one edge")
    if n == 1:
        return from_edge_list([(0, 0)])
    return from_edge_list([(i, (i + 1) % n) for i in range(n)])


def triangle() -> Multigraph:
    return cycle(3)


def complete_graph(k: int) -> Multigraph:
    return from_edge_list(list(itertools.combinations(range(k), 2)), vertices=range(k))


def wheel(k: int) -> Multigraph:
    """Hub 0 joined to a k-cycle on 1..k; spokes t1..tk, then rim edges."""
    spokes = [(0, i) for i in range(1, k + 1)]
    rim = [(i, i % k + 1) for i in range(1, k + 1)]
    return from_edge_list(spokes + rim, vertices=range(k + 1))


def doubled_edge_triangle() -> Multigraph:
    """Triangle a, b, c with the edge a-b doubled (t1, t2)."""
    return from_edge_list([("a", "b"), ("a", "b"), ("b", "c"), ("c", "a")])


def doubled_triangle() -> Multigraph:
    """Triangle with every edge doubled."""
    return from_edge_list([("u", "v"), ("u", "v"), ("v", "w"), ("v", "w"), ("w", "u"), ("w", "u")])


def iifails_graph() -> Multigraph:
    """Triangle u, v, w with u-v and v-w doubled; t5 = w-u is the single edge."""
    return from_edge_list([("u", "v"), ("u", "v"), ("v", "w"), ("v", "w"), ("w", "u")])


def two_bananas_at_vertex() -> Multigraph:
    return from_edge_list([("u", "v"), ("u", "v"), ("v", "w"), ("v", "w")])


def ifails_graph() -> Multigraph:
    """K4 on 0..3 with 0-1 doubled (t1, t2); t7 = 2-3 is the edge opposite the double."""
    return from_edge_list([(0, 1), (0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)])


def ifails_deletion() -> Multigraph:
    g = ifails_graph()
    return Multigraph(g.vertices, [e for e in g.edges if e.id != "t7"])


def doubled_triangle_family(m: int) -> Multigraph:
    """The IIfails graph with its single edge t5 replaced by m parallel copies."""
    return multiply_edge(iifails_graph(), "t5", m)


def _extensions(g: Multigraph):
    n = len(g.vertices)
    verts = list(range(n))
    for v in verts:
        yield from_edge_list([e.ends for e in g.edges] + [(v, v)], vertices=verts)
    for u, v in itertools.combinations(verts, 2):
        yield from_edge_list([e.ends for e in g.edges] + [(u, v)], vertices=verts)
    for v in verts:
        yield from_edge_list([e.ends for e in g.edges] + [(v, n)], vertices=verts + [n])


def corpus(max_edges: int, *, loops: bool = True) -> list[Multigraph]:
    """Every connected multigraph with 1..max_edges edges, one per isomorphism class.

    Graphs are in canonical form (vertices 0..k-1, edges t1..tn). Every
    connected graph arises from a smaller one by adding a loop, an edge, or a
    pendant edge, so growing level by level and deduplicating by canonical key
    is exhaustive.
    """
    level = {canonical_key(Multigraph([0], [])): canonical_form(Multigraph([0], []))}
    out: list[Multigraph] = []
    for _ in range(max_edges):
        nxt: dict[bytes, Multigraph] = {}
        for g in level.values():
            for h in _extensions(g):
                if not loops and any(e.is_loop for e in h.edges):
                    continue
                key = canonical_key(h)
                if key not in nxt:
                    nxt[key] = canonical_form(h)
        out.extend(nxt[k] for k in sorted(nxt))
        level = nxt
    return out
