"""Chern-class Feynman-rule polynomials C_G(t).

Closed forms, recursions and CSM conversions operate on ``FeynmanPoly``
values; ``compute_C`` assembles them into a best-effort derivation for a
given graph, reporting the first missing datum when it cannot finish.
"""

from __future__ import annotations

import enum
import json
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .conditions import Applicability, assess
from .multigraph import (
    CanonicalizationError,
    EdgeClass,
    Multigraph,
    canonical_edge_key,
    canonical_key,
    classify_edge,
    contract_edge,
    cycle_blocks,
    delete_edge,
    has_parallel,
    is_forest,
    parallel_class,
)
from .multipoly import FeynmanPoly

__all__ = [
    "Provenance",
    "ProvenanceError",
    "ForestClassError",
    "CsmRecord",
    "FixtureEntry",
    "FixtureRegistry",
    "DerivationStep",
    "ComputeResult",
    "c_forest",
    "c_bridge_rule",
    "c_loop_rule",
    "delcon",
    "doubling",
    "multi_edge_closed",
    "multi_edge_recursion",
    "goodform_closed",
    "banana_closed",
    "csm_to_C",
    "C_to_csm",
    "chi_hypersurface",
    "chi_identity_check",
    "compute_C",
    "default_registry",
]

T = FeynmanPoly.t()
ONE = FeynmanPoly.const(1)


# ---------------------------------------------------------------------------
# formulas


def c_forest(n: int) -> FeynmanPoly:
    if n < 0:
        raise ValueError("edge count must be nonnegative")
    return (T + 1) ** n


def c_bridge_rule(c_del: FeynmanPoly) -> FeynmanPoly:
    return (T + 1) * c_del


def c_loop_rule(c_del: FeynmanPoly) -> FeynmanPoly:
    return T * c_del


def delcon(c_intersection: FeynmanPoly, c_deletion: FeynmanPoly) -> FeynmanPoly:
    """C_G = C(X_{G-e} cap X_{G/e}) + (t-1) C(X_{G-e}); applicability is the caller's job."""
    return c_intersection + (T - 1) * c_deletion


def doubling(cG: FeynmanPoly, cDel: FeynmanPoly, cCon: FeynmanPoly) -> FeynmanPoly:
    """C of G with e doubled. For a looping edge pass ``cCon = 0``."""
    return (2 * T - 1) * cG - T * (T - 1) * cDel + cCon


def _check_m(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValueError("multiplicity m must be a positive integer (m = 0 is not supported)")


def multi_edge_closed(cG: FeynmanPoly, c2e: FeynmanPoly, cCon: FeynmanPoly, m: int) -> FeynmanPoly:
    """C of G with e replaced by m parallel copies, from C_G, C_{G_2e}, C_{G/e}."""
    _check_m(m)
    return (c2e - T * cG - T * cCon) * (T ** (m - 1) - (T - 1) ** (m - 1)) + (cG + (m - 1) * cCon) * T ** (m - 1)


def multi_edge_recursion(c_m: FeynmanPoly, c_m1: FeynmanPoly, c_m2: FeynmanPoly) -> FeynmanPoly:
    """Next term C_{m+3} from C_m, C_{m+1}, C_{m+2}."""
    return (3 * T - 1) * c_m2 - (3 * T ** 2 - 2 * T) * c_m1 + (T ** 3 - T ** 2) * c_m


def goodform_closed(cG: FeynmanPoly, c2e: FeynmanPoly, c3e: FeynmanPoly, m: int) -> FeynmanPoly:
    """C of G with e replaced by m+1 parallel copies, from C_G, C_{G_2e}, C_{G_3e}."""
    _check_m(m)
    a = T ** 2 * cG - 2 * T * c2e + c3e
    b = (T ** 2 - 1) * cG - 2 * T * c2e + c3e
    c = (T ** 2 - T) * cG - (2 * T - 1) * c2e + c3e
    # evaluated at k = m + 1 so that the result is C_{G_(m+1)e}
    return a * (T - 1) ** m - b * T ** m + m * c * T ** (m - 1)


def banana_closed(n: int) -> FeynmanPoly:
    """n t^(n-1) + t (t-1)^(n-1) for n parallel edges on two vertices."""
    _check_m(n)
    return n * T ** (n - 1) + T * (T - 1) ** (n - 1)


# ---------------------------------------------------------------------------
# CSM classes


class Provenance(enum.Enum):
    PUBLISHED = "Published"
    DERIVED = "Derived"
    USER_INPUT = "UserInput"


class ProvenanceError(ValueError):
    pass


class ForestClassError(ValueError):
    """A forest has an empty hypersurface, so it has no CSM record."""


@dataclass(frozen=True)
class CsmRecord:
    """Coefficients a_i of [P^i] in the CSM class of X_G inside P^(n-1)."""

    ambient_n: int
    coeffs: tuple[int, ...]
    provenance: Provenance = Provenance.DERIVED

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(a) for a in self.coeffs))
        if self.ambient_n < 1:
            raise ValueError("ambient edge count must be positive")
        if len(self.coeffs) > self.ambient_n - 1:
            raise ValueError("CSM class of a hypersurface in P^(n-1) has at most n-1 coefficients")

    def to_dict(self) -> dict:
        return {"ambient_n": self.ambient_n, "coeffs": list(self.coeffs), "provenance": self.provenance.value}

    @classmethod
    def from_dict(cls, data: dict) -> CsmRecord:
        return cls(int(data["ambient_n"]), tuple(data["coeffs"]), Provenance(data.get("provenance", "Derived")))


def csm_to_C(rec: CsmRecord) -> FeynmanPoly:
    out = (T + 1) ** rec.ambient_n - 1
    for i, a in enumerate(rec.coeffs):
        out = out - a * T ** (i + 1)
    return out


def C_to_csm(c: FeynmanPoly, n: int, provenance: Provenance = Provenance.DERIVED) -> CsmRecord:
    if c == c_forest(n):
        raise ForestClassError("C equals (t+1)^n: the graph is a forest and X_G is empty")
    if c.degree is not None and c.degree > n:
        raise ValueError(f"degree {c.degree} exceeds the edge count {n}")
    if c.coeff(0) != 0:
        raise ValueError("C of a nonempty hypersurface has zero constant term")
    rest = (T + 1) ** n - 1 - c
    if rest.coeff(n) != 0:
        raise ValueError("C must be monic of degree n for a hypersurface in P^(n-1)")
    coeffs = [rest.coeff(i + 1) for i in range(n - 1)]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return CsmRecord(n, tuple(coeffs), provenance)


def chi_hypersurface(c: FeynmanPoly, n: int) -> int:
    """Euler characteristic of X in P^(n-1): n minus the Euler characteristic of the complement."""
    return n - c.coeff(1)


def chi_identity_check(cG: FeynmanPoly, cDel: FeynmanPoly, cInt: FeynmanPoly, n: int) -> bool:
    """chi(X_G) = n + chi(X_{G-e} cap X_{G/e}) - chi(X_{G-e}), the latter two in P^(n-2)."""
    return chi_hypersurface(cG, n) == n + chi_hypersurface(cInt, n - 1) - chi_hypersurface(cDel, n - 1)


# ---------------------------------------------------------------------------
# fixture registry


def _poly_to_json(c: FeynmanPoly) -> list[int]:
    return list(c.coeffs)


@dataclass(frozen=True)
class FixtureEntry:
    key: str
    C: FeynmanPoly
    provenance: Provenance
    citation: str = ""
    csm: CsmRecord | None = None
    intersections: dict = field(default_factory=dict)
    graph: Multigraph | None = None
    name: str = ""

    def __post_init__(self):
        if self.provenance == Provenance.PUBLISHED and not self.citation.strip():
            raise ProvenanceError("published fixtures must carry a citation")

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "key": self.key,
            "C": _poly_to_json(self.C),
            "csm": self.csm.to_dict() if self.csm else None,
            "intersections": {k: _poly_to_json(v) for k, v in sorted(self.intersections.items())},
            "provenance": self.provenance.value,
            "citation": self.citation,
        }
        if self.graph is not None:
            out["graph"] = self.graph.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> FixtureEntry:
        graph = Multigraph.from_dict(data["graph"]) if data.get("graph") else None
        key = data["key"]
        if graph is not None and canonical_key(graph).decode() != key:
            raise ValueError(f"fixture {data.get('name', key)!r}: key does not match its graph")
        return cls(
            key=key,
            C=FeynmanPoly(data["C"]),
            provenance=Provenance(data["provenance"]),
            citation=data.get("citation", ""),
            csm=CsmRecord.from_dict(data["csm"]) if data.get("csm") else None,
            intersections={k: FeynmanPoly(v) for k, v in data.get("intersections", {}).items()},
            graph=graph,
            name=data.get("name", ""),
        )


def _key_str(key: bytes | str) -> str:
    return key.decode() if isinstance(key, bytes) else key


class FixtureRegistry:
    """Content-addressed store of C values keyed by canonical graph key.

    Reads are lock-free on an immutable snapshot; writes are serialized and
    publish a new snapshot. Published entries can never be replaced.
    """

    def __init__(self, entries=()):
        self._lock = threading.Lock()
        self._data: dict[str, FixtureEntry] = {}
        for entry in entries:
            self.insert(entry)

    def __len__(self) -> int:
        return len(self._data)

    def __iter__(self):
        return iter(list(self._data.values()))

    def __contains__(self, key) -> bool:
        return _key_str(key) in self._data

    def lookup(self, key: bytes | str) -> FixtureEntry | None:
        return self._data.get(_key_str(key))

    def lookup_graph(self, g: Multigraph) -> FixtureEntry | None:
        return self.lookup(canonical_key(g))

    def intersection(self, g: Multigraph, e: str) -> FeynmanPoly | None:
        key, edge = canonical_edge_key(g, e)
        entry = self.lookup(key)
        return entry.intersections.get(edge) if entry else None

    def insert(self, entry: FixtureEntry) -> None:
        with self._lock:
            old = self._data.get(entry.key)
            if old is not None and old.provenance == Provenance.PUBLISHED and old != entry:
                raise ProvenanceError(f"published fixture {entry.key} cannot be replaced")
            data = dict(self._data)
            data[entry.key] = entry
            self._data = data

    def insert_graph(
        self,
        g: Multigraph,
        C: FeynmanPoly,
        provenance: Provenance = Provenance.USER_INPUT,
        citation: str = "",
        intersections: dict | None = None,
        name: str = "",
    ) -> FixtureEntry:
        """Insert a C value for ``g``; ``intersections`` maps edge ids of ``g`` to classes."""
        key = canonical_key(g)
        ints = {}
        for e, c in (intersections or {}).items():
            ints[canonical_edge_key(g, e)[1]] = c
        entry = FixtureEntry(_key_str(key), C, provenance, citation, None, ints, g, name)
        self.insert(entry)
        return entry

    def to_json(self) -> str:
        entries = sorted(self._data.values(), key=lambda x: (x.name, x.key))
        return json.dumps({"entries": [x.to_dict() for x in entries]}, indent=1)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def from_json(cls, text: str) -> FixtureRegistry:
        return cls(FixtureEntry.from_dict(d) for d in json.loads(text)["entries"])

    @classmethod
    def load(cls, path: str | Path) -> FixtureRegistry:
        return cls.from_json(Path(path).read_text())


def default_registry() -> FixtureRegistry:
    """A fresh registry holding the shipped fixtures."""
    text = resources.files("graphhyper").joinpath("data/fixtures.json").read_text()
    return FixtureRegistry.from_json(text)


# ---------------------------------------------------------------------------
# best-effort computation


@dataclass
class DerivationStep:
    rule: str
    graph_key: str | None
    edges: int
    detail: str = ""
    result: FeynmanPoly | None = None
    children: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "graph_key": self.graph_key,
            "edges": self.edges,
            "detail": self.detail,
            "result": str(self.result) if self.result is not None else None,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass(frozen=True)
class ComputeResult:
    C: FeynmanPoly | None
    trace: DerivationStep
    blocker: str | None = None

    @property
    def ok(self) -> bool:
        return self.C is not None


def _safe_key(g: Multigraph) -> str | None:
    try:
        return canonical_key(g).decode()
    except CanonicalizationError:
        return None


def _block_subgraph(g: Multigraph, edge_ids) -> Multigraph:
    chosen = set(edge_ids)
    edges = [x for x in g.edges if x.id in chosen]
    verts = [v for v in g.vertices if any(v in x.ends for x in edges)]
    return Multigraph(verts, edges)


class _Computer:
    def __init__(self, registry: FixtureRegistry | None):
        self.registry = registry
        self.memo: dict[str, tuple[FeynmanPoly | None, DerivationStep, str | None]] = {}

    def run(self, g: Multigraph) -> tuple[FeynmanPoly | None, DerivationStep, str | None]:
        key = _safe_key(g)
        if key is not None and key in self.memo:
            c, step, blocker = self.memo[key]
            return c, DerivationStep("memo", key, len(g.edges), "reused", c), blocker
        out = self._compute(g, key)
        if key is not None:
            self.memo[key] = out
        return out

    def _child(self, step: DerivationStep, g: Multigraph):
        c, sub, blocker = self.run(g)
        step.children.append(sub)
        return c, blocker

    def _compute(self, g: Multigraph, key):
        n = len(g.edges)
        if is_forest(g):
            c = c_forest(n)
            return c, DerivationStep("forest", key, n, "(t+1)^n", c), None

        for x in g.edges:
            if x.is_loop:
                step = DerivationStep("loop", key, n, f"edge {x.id}: C = t * C(G minus e)")
                c, blocker = self._child(step, delete_edge(g, x.id))
                return self._finish(step, None if c is None else c_loop_rule(c), blocker)

        for x in g.edges:
            if classify_edge(g, x.id) == EdgeClass.BRIDGE:
                step = DerivationStep("bridge", key, n, f"edge {x.id}: C = (t+1) * C(G minus e)")
                c, blocker = self._child(step, delete_edge(g, x.id))
                return self._finish(step, None if c is None else c_bridge_rule(c), blocker)

        blocks = cycle_blocks(g)
        if len(blocks) >= 2:
            step = DerivationStep("product", key, n, f"{len(blocks)} cycle blocks: C is multiplicative")
            total = ONE
            for block in blocks:
                c, blocker = self._child(step, _block_subgraph(g, block))
                if c is None:
                    return self._finish(step, None, blocker)
                total = total * c
            return self._finish(step, total, None)

        for x in g.edges:
            cls = parallel_class(g, x.id)
            if len(cls) >= 3:
                m = len(cls)
                e = cls[0]
                g1 = g
                for other in cls[1:]:
                    g1 = delete_edge(g1, other)
                g2 = g
                for other in cls[2:]:
                    g2 = delete_edge(g2, other)
                step = DerivationStep(
                    "multi_edge_closed", key, n, f"edge {e} with multiplicity {m} from C(G_1), C(G_2), C(G_1/e)"
                )
                parts = []
                for sub in (g1, g2, contract_edge(g1, e)):
                    c, blocker = self._child(step, sub)
                    if c is None:
                        break
                    parts.append(c)
                if len(parts) == 3:
                    return self._finish(step, multi_edge_closed(parts[0], parts[1], parts[2], m), None)
                # fall through to the registry and deletion-contraction
                break

        for x in g.edges:
            if classify_edge(g, x.id) == EdgeClass.NON_REGULAR_FOREST_DELETION:
                c = delcon(c_forest(n - 1), c_forest(n - 1))
                detail = f"edge {x.id}: deletion is a forest, both inputs (t+1)^(n-1)"
                return c, DerivationStep("delcon_forest", key, n, detail, c), None

        missing = []
        for x in g.edges:
            if classify_edge(g, x.id) != EdgeClass.REGULAR or not has_parallel(g, x.id):
                continue
            if assess(g, x.id).status != Applicability.APPLICABLE:
                continue
            cint = self.registry.intersection(g, x.id) if self.registry is not None and key else None
            if cint is None:
                missing.append(x.id)
                continue
            step = DerivationStep("delcon", key, n, f"edge {x.id} (parallel partner): C = C_int + (t-1) C(G minus e)")
            step.children.append(DerivationStep("fixture_intersection", key, n - 1, f"edge {x.id}", cint))
            c, blocker = self._child(step, delete_edge(g, x.id))
            if c is not None:
                return self._finish(step, delcon(cint, c), None)
            missing.append(x.id)

        if self.registry is not None and key is not None:
            entry = self.registry.lookup(key)
            if entry is not None:
                detail = f"{entry.provenance.value} fixture {entry.name}: {entry.citation}".strip()
                return entry.C, DerivationStep("fixture", key, n, detail, entry.C), None

        if missing:
            blocker = (
                f"missing intersection class C(X_(G minus e) cap X_(G/e)) for applicable edge {missing[0]}"
                f" of graph {key}"
            )
        else:
            blocker = (
                f"no edge of graph {key} is known to satisfy both conditions, and the intersection "
                "class C(X_(G minus e) cap X_(G/e)) needed by deletion-contraction is missing"
            )
        return None, DerivationStep("blocked", key, n, blocker), blocker

    @staticmethod
    def _finish(step: DerivationStep, c, blocker):
        step.result = c
        return c, step, (None if c is not None else blocker)


def compute_C(g: Multigraph, registry: FixtureRegistry | None = None) -> ComputeResult:
    """Exact C_G when derivable, else ``C=None`` with the first blocker named.

    Rules, in order: forest, loop, bridge, product over cycle blocks,
    multiple-edge closed form (multiplicity at least 3), forest-deletion
    convention, deletion-contraction at a parallel edge with a fixture
    intersection class, and finally a stored C value for the graph itself.
    """
    c, trace, blocker = _Computer(registry).run(g)
    return ComputeResult(c, trace, blocker)
