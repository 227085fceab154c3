"""Finite multigraphs with loops and parallel edges.

Graphs are immutable values. Edge identifiers are stable string tokens that
double as polynomial variable names, so deleting or contracting one edge never
renames the others.
"""

from __future__ import annotations

import enum
import json
import re
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass

__all__ = [
    "Edge",
    "EdgeClass",
    "Multigraph",
    "CanonicalizationError",
    "from_edge_list",
    "delete_edge",
    "contract_edge",
    "classify_edge",
    "betti1",
    "is_forest",
    "multiply_edge",
    "has_parallel",
    "parallel_class",
    "disjoinable",
    "cycle_blocks",
    "canonical_key",
    "canonical_edge_key",
    "canonical_form",
    "canonical_relabeling",
    "connected_components",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
CANONICAL_VERTEX_BOUND = 12
# Tied partial labelings kept by the canonical search before giving up.
CANONICAL_STATE_BOUND = 200_000


class CanonicalizationError(ValueError):
    """Raised when a graph is outside the canonical-labeling bounds."""


class EdgeClass(enum.Enum):
    BRIDGE = "Bridge"
    LOOP = "Loop"
    NON_REGULAR_FOREST_DELETION = "NonRegularForestDeletion"
    REGULAR = "Regular"


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[Hashable, Hashable]

    @property
    def is_loop(self) -> bool:
        return self.ends[0] == self.ends[1]


class Multigraph:
    """An ordered vertex set plus an ordered sequence of labeled edges."""

    __slots__ = ("_vertices", "_edges", "_index")

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Edge]):
        verts = tuple(dict.fromkeys(vertices))
        edges = tuple(edges)
        vset = set(verts)
        index: dict[str, int] = {}
        for i, edge in enumerate(edges):
            if edge.id in index:
                raise ValueError(f"duplicate edge label {edge.id!r}")
            if not _IDENT.match(edge.id):
                raise ValueError(f"edge label {edge.id!r} is not an identifier")
            for v in edge.ends:
                if v not in vset:
                    raise ValueError(f"edge {edge.id!r} has undeclared endpoint {v!r}")
            index[edge.id] = i
        self._vertices = verts
        self._edges = edges
        self._index = index

    @property
    def vertices(self) -> tuple[Hashable, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self._edges)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edges[self._index[edge_id]]
        except KeyError:
            raise KeyError(f"unknown edge {edge_id!r}") from None

    def __contains__(self, edge_id: object) -> bool:
        return edge_id in self._index

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        body = ", ".join(f"{e.id}:{e.ends[0]}-{e.ends[1]}" for e in self._edges)
        return f"Multigraph(|V|={len(self._vertices)}, [{body}])"

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": [str(v) for v in self._vertices],
            "edges": [{"id": e.id, "ends": [str(e.ends[0]), str(e.ends[1])]} for e in self._edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Multigraph:
        edges = [Edge(str(rec["id"]), (str(rec["ends"][0]), str(rec["ends"][1]))) for rec in data.get("edges", [])]
        vertices = [str(v) for v in data.get("vertices", [])]
        declared = set(vertices)
        for e in edges:
            for v in e.ends:
                if v not in declared:
                    declared.add(v)
                    vertices.append(v)
        return cls(vertices, edges)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> Multigraph:
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        """Render as one ``u v label`` line per edge.

        Single-token lines declare vertices; they are emitted up front only
        when the edge lines alone would not reproduce the vertex order.
        """
        lines = [f"{e.ends[0]} {e.ends[1]} {e.id}" for e in self._edges]
        implied = list(dict.fromkeys(str(v) for e in self._edges for v in e.ends))
        if implied != [str(v) for v in self._vertices]:
            lines = [str(v) for v in self._vertices] + lines
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> Multigraph:
        vertices: list[str] = []
        spec: list[tuple] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) == 1:
                vertices.append(tokens[0])
            elif len(tokens) in (2, 3):
                spec.append(tuple(tokens))
                vertices.extend(tokens[:2])
            else:
                raise ValueError(f"line {lineno}: expected 'u v [label]', got {raw!r}")
        try:
            return from_edge_list(spec, vertices=vertices)
        except ValueError as exc:
            raise ValueError(f"graph text: {exc}") from None


def from_edge_list(
    spec: Sequence[Sequence[Hashable]], vertices: Iterable[Hashable] = ()
) -> Multigraph:
    """Build a multigraph from ``(u, v)`` or ``(u, v, label)`` records.

    Unlabeled edges get ``t1, t2, ...`` skipping any label already in use.
    Extra ``vertices`` are declared first (in order), which is how isolated
    vertices enter.
    """
    explicit = [str(rec[2]) for rec in spec if len(rec) > 2]
    seen: set[str] = set()
    for label in explicit:
        if label in seen:
            raise ValueError(f"duplicate edge label {label!r}")
        seen.add(label)
    verts = list(vertices)
    edges = []
    counter = 0
    for rec in spec:
        u, v = rec[0], rec[1]
        if len(rec) > 2:
            label = str(rec[2])
        else:
            counter += 1
            while f"t{counter}" in seen:
                counter += 1
            label = f"t{counter}"
            seen.add(label)
        verts.extend((u, v))
        edges.append(Edge(label, (u, v)))
    return Multigraph(verts, edges)


# ---------------------------------------------------------------------------
# deletion / contraction / multiplication


def delete_edge(g: Multigraph, e: str) -> Multigraph:
    g.edge(e)
    return Multigraph(g.vertices, [x for x in g.edges if x.id != e])


def contract_edge(g: Multigraph, e: str) -> Multigraph:
    """Identify the endpoints of ``e`` and drop it; a loop is simply deleted."""
    edge = g.edge(e)
    u, v = edge.ends
    if u == v:
        return delete_edge(g, e)
    edges = []
    for x in g.edges:
        if x.id == e:
            continue
        a, b = x.ends
        edges.append(Edge(x.id, (u if a == v else a, u if b == v else b)))
    return Multigraph([w for w in g.vertices if w != v], edges)


def multiply_edge(g: Multigraph, e: str, m: int) -> Multigraph:
    """Replace ``e`` by ``m`` parallel copies; copies are named ``e_2, e_3, ...``."""
    edge = g.edge(e)
    if m < 1:
        raise ValueError("edge multiplicity must be at least 1")
    taken = set(g.edge_ids)
    copies = []
    k = 2
    while len(copies) < m - 1:
        label = f"{e}_{k}"
        if label not in taken:
            copies.append(Edge(label, edge.ends))
            taken.add(label)
        k += 1
    edges = []
    for x in g.edges:
        edges.append(x)
        if x.id == e:
            edges.extend(copies)
    return Multigraph(g.vertices, edges)


# ---------------------------------------------------------------------------
# connectivity


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def connected_components(g: Multigraph) -> list[Multigraph]:
    """Connected components as subgraphs, in vertex order."""
    dsu = _DSU(g.vertices)
    for e in g.edges:
        dsu.union(*e.ends)
    groups: dict = {}
    for v in g.vertices:
        groups.setdefault(dsu.find(v), []).append(v)
    out = []
    for verts in groups.values():
        vs = set(verts)
        out.append(Multigraph(verts, [e for e in g.edges if e.ends[0] in vs]))
    return out


def _component_count(g: Multigraph) -> int:
    dsu = _DSU(g.vertices)
    merges = sum(dsu.union(*e.ends) for e in g.edges)
    return len(g.vertices) - merges


def betti1(g: Multigraph) -> int:
    return len(g.edges) - len(g.vertices) + _component_count(g)


def is_forest(g: Multigraph) -> bool:
    return betti1(g) == 0


def classify_edge(g: Multigraph, e: str) -> EdgeClass:
    edge = g.edge(e)
    if edge.is_loop:
        return EdgeClass.LOOP
    rest = delete_edge(g, e)
    if _component_count(rest) > _component_count(g):
        return EdgeClass.BRIDGE
    if is_forest(rest):
        return EdgeClass.NON_REGULAR_FOREST_DELETION
    return EdgeClass.REGULAR


def parallel_class(g: Multigraph, e: str) -> tuple[str, ...]:
    """All edges (``e`` included) sharing both endpoints with ``e``."""
    ends = frozenset(g.edge(e).ends)
    return tuple(x.id for x in g.edges if frozenset(x.ends) == ends and not x.is_loop)


def has_parallel(g: Multigraph, e: str) -> bool:
    if g.edge(e).is_loop:
        raise ValueError(f"edge {e!r} is a loop; parallelism is not defined for loops")
    return len(parallel_class(g, e)) > 1


def cycle_blocks(g: Multigraph) -> list[tuple[str, ...]]:
    """Edge sets of the biconnected blocks that contain a cycle.

    Every loop is its own cycle block; a block on two vertices with parallel
    edges also counts.
    """
    blocks: list[tuple[str, ...]] = [(e.id,) for e in g.edges if e.is_loop]
    adj: dict = {v: [] for v in g.vertices}
    for e in g.edges:
        if not e.is_loop:
            a, b = e.ends
            adj[a].append((b, e.id))
            adj[b].append((a, e.id))

    disc: dict = {}
    low: dict = {}
    stack: list[str] = []
    counter = 0
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        # iterative Tarjan; frames are (vertex, edge used to enter, neighbor iterator)
        frames = [(root, None, iter(adj[root]))]
        while frames:
            v, via, it = frames[-1]
            advanced = False
            for w, eid in it:
                if eid == via:
                    continue
                if w not in disc:
                    stack.append(eid)
                    disc[w] = low[w] = counter
                    counter += 1
                    frames.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    stack.append(eid)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            frames.pop()
            if frames:
                parent = frames[-1][0]
                low[parent] = min(low[parent], low[v])
                if low[v] >= disc[parent]:
                    block = []
                    while True:
                        eid = stack.pop()
                        block.append(eid)
                        if eid == via:
                            break
                    if len(block) > 1:
                        blocks.append(tuple(sorted(block, key=g.edge_ids.index)))
    return blocks


def disjoinable(g: Multigraph) -> bool:
    """True when at least two blocks carry cycles, so that Psi factors."""
    return len(cycle_blocks(g)) >= 2


# ---------------------------------------------------------------------------
# canonical labeling


def _canonical_labelings(g: Multigraph) -> tuple[bytes, list[dict]]:
    """Minimal key over all vertex relabelings, plus every labeling attaining it.

    An edge becomes the pair ``(hi, lo)`` of its relabeled endpoints; the key is
    the sorted list of these pairs. Labels are assigned 0, 1, 2, ... in turn:
    pairs among already-labeled vertices form a fixed prefix of the final sorted
    list, and any pair added later is larger, so partial labelings can be
    compared exactly and only the minimal ones are extended.
    """
    verts = g.vertices
    n = len(verts)
    if n > CANONICAL_VERTEX_BOUND:
        raise CanonicalizationError(
            f"canonical key needs at most {CANONICAL_VERTEX_BOUND} vertices, got {n}"
        )
    pos = {v: i for i, v in enumerate(verts)}
    mult = [[0] * n for _ in range(n)]
    for e in g.edges:
        a, b = pos[e.ends[0]], pos[e.ends[1]]
        mult[a][b] += 1
        if a != b:
            mult[b][a] += 1

    states: list[tuple[tuple[int, ...], tuple]] = [((), ())]
    for k in range(n):
        best = None
        nxt = []
        for order, prefix in states:
            used = set(order)
            for v in range(n):
                if v in used:
                    continue
                added = []
                for lo, w in enumerate(order):
                    added.extend([(k, lo)] * mult[v][w])
                added.extend([(k, k)] * mult[v][v])
                cand = prefix + tuple(added)
                # a shorter prefix is followed by a larger pair: compare with a sentinel
                probe = cand + ((n + 1, 0),)
                if best is None or probe < best:
                    best = probe
                    nxt = [(order + (v,), cand)]
                elif probe == best:
                    nxt.append((order + (v,), cand))
        states = nxt
        if len(states) > CANONICAL_STATE_BOUND:
            raise CanonicalizationError("canonical labeling search exceeded its state bound")
    prefix = states[0][1]
    key = f"V{n}|" + ",".join(f"{hi}-{lo}" for hi, lo in prefix)
    labelings = [{verts[v]: i for i, v in enumerate(order)} for order, _ in states]
    return key.encode("ascii"), labelings


def canonical_key(g: Multigraph) -> bytes:
    """Isomorphism-invariant byte key (edge labels and vertex names ignored)."""
    return _canonical_labelings(g)[0]


def canonical_edge_key(g: Multigraph, e: str) -> tuple[bytes, str]:
    """Canonical key of ``g`` together with a canonical name for the orbit of ``e``."""
    key, labelings = _canonical_labelings(g)
    a, b = g.edge(e).ends
    best = min((max(lab[a], lab[b]), min(lab[a], lab[b])) for lab in labelings)
    return key, f"{best[0]}-{best[1]}"


def canonical_relabeling(g: Multigraph) -> tuple[Multigraph, dict[str, str]]:
    """Canonical form of ``g`` plus the map from edges of ``g`` to its edges.

    The canonical form has vertices ``0..n-1`` and edges ``t1, t2, ...`` in
    key order, so isomorphic graphs share it exactly.
    """
    _, labelings = _canonical_labelings(g)
    lab = labelings[0]
    pairs = []
    for e in g.edges:
        a, b = lab[e.ends[0]], lab[e.ends[1]]
        pairs.append(((max(a, b), min(a, b)), e.id))
    pairs.sort()
    canon = from_edge_list([(lo, hi) for (hi, lo), _ in pairs], vertices=range(len(g.vertices)))
    mapping = {eid: c.id for (_, eid), c in zip(pairs, canon.edges)}
    return canon, mapping


def canonical_form(g: Multigraph) -> Multigraph:
    return canonical_relabeling(g)[0]
