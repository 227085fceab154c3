"""Tiered verdicts on the two deletion-contraction conditions for a pair (G, e).

Condition I (contraction polynomial in the Jacobian ideal of the deletion
polynomial) is decided exactly by Groebner membership. Condition II is never
decided algebraically: it is either guaranteed by a parallel edge, flagged as
likely failing for disjoinable deletions, or left unknown.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

from .graphpoly import psi
from .groebner import GroebnerResourceError, ideal_membership, jacobian_generators
from .multigraph import (
    EdgeClass,
    Multigraph,
    classify_edge,
    contract_edge,
    delete_edge,
    disjoinable,
    has_parallel,
)

__all__ = [
    "ConditionI",
    "ConditionII",
    "Applicability",
    "ConditionOutcome",
    "ConditionVerdict",
    "Assessment",
    "NonRegularEdgeError",
    "DISJOINABLE_CAVEAT",
    "check_condition_I",
    "check_condition_II",
    "condition_verdict",
    "applicability",
    "verdict_applicability",
    "assess",
    "scan",
]

DISJOINABLE_CAVEAT = (
    "heuristic: the deletion is disjoinable, and a disjoinable deletion forces one of the "
    "two conditions to fail only when X_G is nonsingular in codimension 1; that hypothesis "
    "is not verified here"
)
PARALLEL_NOTE = "edge has a parallel partner, which guarantees both conditions"


class ConditionI(enum.Enum):
    GUARANTEED_BY_PARALLEL_EDGE = "GuaranteedByParallelEdge"
    HOLDS_BY_MEMBERSHIP = "HoldsByMembership"
    FAILS_BY_MEMBERSHIP = "FailsByMembership"
    UNKNOWN = "Unknown"

    @property
    def holds(self) -> bool:
        return self in (ConditionI.GUARANTEED_BY_PARALLEL_EDGE, ConditionI.HOLDS_BY_MEMBERSHIP)


class ConditionII(enum.Enum):
    GUARANTEED_BY_PARALLEL_EDGE = "GuaranteedByParallelEdge"
    LIKELY_FAILS_DISJOINABLE = "LikelyFailsDisjoinable"
    UNKNOWN = "Unknown"


class Applicability(enum.Enum):
    APPLICABLE = "Applicable"
    NOT_APPLICABLE = "NotApplicable"
    UNKNOWN = "Unknown"


class NonRegularEdgeError(ValueError):
    def __init__(self, edge: str, cls: EdgeClass):
        super().__init__(f"edge {edge!r} is not regular (classified as {cls.value})")
        self.edge = edge
        self.edge_class = cls


@dataclass(frozen=True)
class ConditionOutcome:
    status: ConditionI | ConditionII
    note: str
    elapsed_s: float = 0.0


@dataclass(frozen=True)
class ConditionVerdict:
    condition_I: ConditionI
    condition_II: ConditionII
    notes: tuple[str, ...] = ()
    timing: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (
            self.condition_II == ConditionII.GUARANTEED_BY_PARALLEL_EDGE
            and self.condition_I != ConditionI.GUARANTEED_BY_PARALLEL_EDGE
        ):
            raise ValueError("a parallel-edge guarantee covers both conditions or neither")
        if self.condition_II == ConditionII.LIKELY_FAILS_DISJOINABLE and not self.condition_I.holds:
            raise ValueError("disjoinable flag requires condition I to hold")

    def to_dict(self) -> dict:
        return {
            "condition_I": self.condition_I.value,
            "condition_II": self.condition_II.value,
            "notes": list(self.notes),
            "timing": dict(self.timing),
        }


def _require_regular(g: Multigraph, e: str) -> None:
    cls = classify_edge(g, e)
    if cls != EdgeClass.REGULAR:
        raise NonRegularEdgeError(e, cls)


def check_condition_I(
    g: Multigraph, e: str, *, use_parallel_shortcut: bool = True, **guards
) -> ConditionOutcome:
    """Decide Psi(G/e) in (d Psi(G minus e)).

    ``guards`` are forwarded to ``buchberger``; exhausting them gives Unknown.
    """
    _require_regular(g, e)
    if use_parallel_shortcut and has_parallel(g, e):
        return ConditionOutcome(ConditionI.GUARANTEED_BY_PARALLEL_EDGE, PARALLEL_NOTE)
    start = time.monotonic()
    deletion = psi(delete_edge(g, e))
    contraction = psi(contract_edge(g, e))
    try:
        member = ideal_membership(contraction, jacobian_generators(deletion), **guards)
    except GroebnerResourceError as exc:
        return ConditionOutcome(
            ConditionI.UNKNOWN, f"Groebner guard exhausted: {exc}", time.monotonic() - start
        )
    elapsed = time.monotonic() - start
    if member:
        return ConditionOutcome(
            ConditionI.HOLDS_BY_MEMBERSHIP,
            "Psi(G/e) reduces to 0 modulo a degrevlex Groebner basis of the Jacobian ideal of Psi(G minus e)",
            elapsed,
        )
    return ConditionOutcome(
        ConditionI.FAILS_BY_MEMBERSHIP,
        "Psi(G/e) has nonzero normal form modulo the Jacobian ideal of Psi(G minus e)",
        elapsed,
    )


def check_condition_II(
    g: Multigraph, e: str, *, condition_I: ConditionOutcome | None = None, **guards
) -> ConditionOutcome:
    _require_regular(g, e)
    if has_parallel(g, e):
        return ConditionOutcome(ConditionII.GUARANTEED_BY_PARALLEL_EDGE, PARALLEL_NOTE)
    if condition_I is None:
        condition_I = check_condition_I(g, e, **guards)
    if condition_I.status.holds and disjoinable(delete_edge(g, e)):
        return ConditionOutcome(ConditionII.LIKELY_FAILS_DISJOINABLE, DISJOINABLE_CAVEAT)
    return ConditionOutcome(ConditionII.UNKNOWN, "condition II is not decided algebraically")


def condition_verdict(g: Multigraph, e: str, **guards) -> ConditionVerdict:
    one = check_condition_I(g, e, **guards)
    two = check_condition_II(g, e, condition_I=one, **guards)
    notes = tuple(dict.fromkeys((one.note, two.note)))
    return ConditionVerdict(one.status, two.status, notes, {"groebner_s": round(one.elapsed_s, 6)})


@dataclass(frozen=True)
class Assessment:
    status: Applicability
    edge_class: EdgeClass
    verdict: ConditionVerdict | None
    notes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "applicability": self.status.value,
            "edge_class": self.edge_class.value,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "notes": list(self.notes),
        }


def verdict_applicability(verdict: ConditionVerdict) -> Applicability:
    """Applicability of a regular edge given its verdict."""
    if (
        verdict.condition_I == ConditionI.GUARANTEED_BY_PARALLEL_EDGE
        and verdict.condition_II == ConditionII.GUARANTEED_BY_PARALLEL_EDGE
    ):
        return Applicability.APPLICABLE
    if verdict.condition_I == ConditionI.FAILS_BY_MEMBERSHIP:
        return Applicability.NOT_APPLICABLE
    if verdict.condition_II == ConditionII.LIKELY_FAILS_DISJOINABLE:
        return Applicability.NOT_APPLICABLE
    return Applicability.UNKNOWN


def assess(g: Multigraph, e: str, **guards) -> Assessment:
    cls = classify_edge(g, e)
    if cls == EdgeClass.BRIDGE:
        return Assessment(Applicability.APPLICABLE, cls, None, ("bridge rule: C(G) = (t+1) C(G minus e)",))
    if cls == EdgeClass.LOOP:
        return Assessment(Applicability.APPLICABLE, cls, None, ("loop rule: C(G) = t C(G minus e)",))
    if cls == EdgeClass.NON_REGULAR_FOREST_DELETION:
        return Assessment(
            Applicability.APPLICABLE,
            cls,
            None,
            ("deletion is a forest: both classes on the right are taken to be (t+1)^(n-1)",),
        )
    verdict = condition_verdict(g, e, **guards)
    return Assessment(verdict_applicability(verdict), cls, verdict, verdict.notes)


def applicability(g: Multigraph, e: str, **guards) -> Applicability:
    return assess(g, e, **guards).status


def scan(graphs, **guards) -> list[dict]:
    """Verdict records for every regular edge of every graph (data gathering only)."""
    records = []
    for name, g in graphs:
        for e in g.edge_ids:
            if classify_edge(g, e) != EdgeClass.REGULAR:
                continue
            v = condition_verdict(g, e, **guards)
            records.append({"graph": name, "edge": e, **v.to_dict()})
    return records
