"""Buchberger's algorithm over Q (degrevlex) and ideal membership.

Intermediate polynomials are kept primitive with integer coefficients
(fraction-free reduction, content removed after every reduction); the final
reduced basis is made monic over Q.
"""

from __future__ import annotations

import math
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .multipoly import MultiPoly, degrevlex_key

__all__ = [
    "Ideal",
    "GroebnerBasis",
    "GroebnerResourceError",
    "buchberger",
    "normal_form",
    "ideal_membership",
    "jacobian_generators",
]

ORDER = "degrevlex"

MAX_VARIABLES = 8
MAX_DEGREE = 5
MAX_PAIRS = 200_000


class GroebnerResourceError(RuntimeError):
    """A Groebner computation exceeded its size or time guard."""


@dataclass(frozen=True)
class Ideal:
    """Generators over a common, ordered variable universe."""

    generators: tuple[MultiPoly, ...]
    variables: tuple[str, ...]
    order: str = ORDER

    def __init__(self, generators: Iterable[MultiPoly], variables: Sequence[str] | None = None):
        gens = [g for g in generators if not g.is_zero()]
        universe = list(dict.fromkeys(variables or ()))
        for g in gens:
            for v in g.variables:
                if v not in universe:
                    universe.append(v)
        universe = tuple(universe)
        object.__setattr__(self, "generators", tuple(g.with_variables(universe) for g in gens))
        object.__setattr__(self, "variables", universe)
        object.__setattr__(self, "order", ORDER)

    def __len__(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class GroebnerBasis:
    basis: tuple[MultiPoly, ...]
    variables: tuple[str, ...]
    order: str = ORDER
    stats: dict = field(default_factory=dict, compare=False)

    def __iter__(self):
        return iter(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    def contains_unit(self) -> bool:
        return any(len(b) == 1 and sum(next(iter(b.terms))) == 0 for b in self.basis)


# ---------------------------------------------------------------------------
# integer polynomial kernel: dict[exponent tuple -> int]


def _primitive(poly: dict) -> dict:
    if not poly:
        return poly
    g = 0
    for c in poly.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    lead = poly[max(poly, key=degrevlex_key)]
    if lead < 0:
        g = -g
    if g != 1:
        poly = {m: c // g for m, c in poly.items()}
    return poly


def _to_int(p: MultiPoly) -> dict:
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    return _primitive({m: int(c * den) for m, c in p.terms.items()})


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


class _Poly:
    """Integer polynomial with its leading monomial cached."""

    __slots__ = ("terms", "lm", "lc")

    def __init__(self, terms: dict):
        self.terms = terms
        self.lm = max(terms, key=degrevlex_key)
        self.lc = terms[self.lm]


def _reduce(f: dict, basis: list[_Poly], deadline: float | None) -> dict:
    """Full reduction of ``f`` modulo ``basis``, up to a positive rational factor."""
    f = dict(f)
    rem: dict = {}
    steps = 0
    while f:
        lm = max(f, key=degrevlex_key)
        c = f[lm]
        divisor = None
        for g in basis:
            if _divides(g.lm, lm):
                divisor = g
                break
        if divisor is None:
            rem[lm] = c
            del f[lm]
            continue
        g_coef = divisor.lc
        d = math.gcd(c, g_coef)
        scale_f = g_coef // d
        scale_g = c // d
        if scale_f < 0:
            scale_f, scale_g = -scale_f, -scale_g
        if scale_f != 1:
            f = {m: v * scale_f for m, v in f.items()}
            rem = {m: v * scale_f for m, v in rem.items()}
        shift = tuple(x - y for x, y in zip(lm, divisor.lm))
        for m, v in divisor.terms.items():
            key = tuple(x + y for x, y in zip(m, shift))
            val = f.get(key, 0) - scale_g * v
            if val:
                f[key] = val
            else:
                f.pop(key, None)
        steps += 1
        if steps % 64 == 0:
            if deadline is not None and time.monotonic() > deadline:
                raise GroebnerResourceError("Groebner computation timed out")
            # keep coefficient growth in check
            g_all = 0
            for v in (*f.values(), *rem.values()):
                g_all = math.gcd(g_all, v)
                if g_all == 1:
                    break
            if g_all > 1:
                f = {m: v // g_all for m, v in f.items()}
                rem = {m: v // g_all for m, v in rem.items()}
    return _primitive(rem)


def _spoly(a: _Poly, b: _Poly) -> dict:
    lcm = _lcm(a.lm, b.lm)
    sa = tuple(x - y for x, y in zip(lcm, a.lm))
    sb = tuple(x - y for x, y in zip(lcm, b.lm))
    d = math.gcd(a.lc, b.lc)
    ca, cb = b.lc // d, a.lc // d
    out: dict = {}
    for m, v in a.terms.items():
        key = tuple(x + y for x, y in zip(m, sa))
        out[key] = out.get(key, 0) + ca * v
    for m, v in b.terms.items():
        key = tuple(x + y for x, y in zip(m, sb))
        val = out.get(key, 0) - cb * v
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return {m: v for m, v in out.items() if v}


def _update(polys: list[_Poly], active: set[int], pairs: list[tuple[int, int]], h: int):
    """Gebauer-Moeller pair update after adding ``polys[h]``."""
    hlm = polys[h].lm
    cands = [g for g in sorted(active)]
    lcms = {g: _lcm(polys[g].lm, hlm) for g in cands}

    kept = []
    for i, g in enumerate(cands):
        if _coprime(polys[g].lm, hlm):
            kept.append(g)
            continue
        redundant = False
        for other in cands[i + 1:]:
            if _divides(lcms[other], lcms[g]):
                redundant = True
                break
        if not redundant:
            for other in kept:
                if _divides(lcms[other], lcms[g]):
                    redundant = True
                    break
        if not redundant:
            kept.append(g)
    new_pairs = [(g, h) for g in kept if not _coprime(polys[g].lm, hlm)]

    survivors = []
    for a, b in pairs:
        lab = _lcm(polys[a].lm, polys[b].lm)
        if (
            _divides(hlm, lab)
            and _lcm(polys[a].lm, hlm) != lab
            and _lcm(polys[b].lm, hlm) != lab
        ):
            continue
        survivors.append((a, b))
    pairs[:] = survivors + new_pairs
    for g in list(active):
        if _divides(hlm, polys[g].lm):
            active.discard(g)
    active.add(h)


def buchberger(
    gens: Ideal | Iterable[MultiPoly],
    *,
    max_variables: int | None = MAX_VARIABLES,
    max_degree: int | None = MAX_DEGREE,
    max_pairs: int | None = MAX_PAIRS,
    timeout: float | None = None,
) -> GroebnerBasis:
    """Reduced Groebner basis under degrevlex.

    Pairs are processed by smallest lcm (normal strategy) with Buchberger's
    product and chain criteria applied through the Gebauer-Moeller update.
    The size guards are soft: pass ``None`` to disable one.
    """
    ideal = gens if isinstance(gens, Ideal) else Ideal(gens)
    nvars = len(ideal.variables)
    if max_variables is not None and nvars > max_variables:
        raise GroebnerResourceError(f"{nvars} variables exceeds the guard of {max_variables}")
    if max_degree is not None:
        for g in ideal.generators:
            if g.total_degree() > max_degree:
                raise GroebnerResourceError(
                    f"generator degree {g.total_degree()} exceeds the guard of {max_degree}"
                )
    start = time.monotonic()
    deadline = start + timeout if timeout is not None else None

    polys: list[_Poly] = []
    active: set[int] = set()
    pairs: list[tuple[int, int]] = []
    processed = 0

    def add(h: dict):
        polys.append(_Poly(h))
        _update(polys, active, pairs, len(polys) - 1)

    for g in ideal.generators:
        h = _reduce(_to_int(g), [polys[i] for i in sorted(active)], deadline)
        if h:
            add(h)

    while pairs:
        idx = min(
            range(len(pairs)),
            key=lambda k: degrevlex_key(_lcm(polys[pairs[k][0]].lm, polys[pairs[k][1]].lm)),
        )
        a, b = pairs.pop(idx)
        processed += 1
        if max_pairs is not None and processed > max_pairs:
            raise GroebnerResourceError(f"more than {max_pairs} critical pairs processed")
        s = _spoly(polys[a], polys[b])
        if not s:
            continue
        h = _reduce(s, [polys[i] for i in sorted(active)], deadline)
        if h:
            add(h)

    basis = _interreduce([polys[i] for i in sorted(active)], deadline)
    monic = []
    for p in basis:
        lc = p[max(p, key=degrevlex_key)]
        monic.append(MultiPoly(ideal.variables, {m: Fraction(c, lc) for m, c in p.items()}))
    monic.sort(key=lambda q: degrevlex_key(q.leading_term()[0]), reverse=True)
    stats = {"pairs": processed, "elapsed_s": time.monotonic() - start}
    return GroebnerBasis(tuple(monic), ideal.variables, ORDER, stats)


def _interreduce(basis: list[_Poly], deadline) -> list[dict]:
    minimal = [
        p for i, p in enumerate(basis)
        if not any(_divides(q.lm, p.lm) and (q.lm != p.lm or j < i) for j, q in enumerate(basis) if j != i)
    ]
    out = []
    for i, p in enumerate(minimal):
        others = [q for j, q in enumerate(minimal) if j != i]
        out.append(_reduce(p.terms, others, deadline))
    return out


def normal_form(f: MultiPoly, gb: GroebnerBasis) -> MultiPoly:
    """Remainder of complete division of ``f`` by the (monic) basis, over Q."""
    universe = tuple(dict.fromkeys((*gb.variables, *f.variables)))
    basis = [(b.with_variables(universe)) for b in gb.basis]
    leads = [(b.leading_term()[0], b) for b in basis]
    rest = dict(f.with_variables(universe).terms)
    rem: dict = {}
    while rest:
        lm = max(rest, key=degrevlex_key)
        c = rest[lm]
        for blm, b in leads:
            if _divides(blm, lm):
                shift = tuple(x - y for x, y in zip(lm, blm))
                for m, v in b.terms.items():
                    key = tuple(x + y for x, y in zip(m, shift))
                    val = rest.get(key, Fraction(0)) - c * v
                    if val:
                        rest[key] = val
                    else:
                        rest.pop(key, None)
                break
        else:
            rem[lm] = c
            del rest[lm]
    return MultiPoly(universe, rem)


def ideal_membership(f: MultiPoly, gens: Ideal | Iterable[MultiPoly], **guards) -> bool:
    ideal = gens if isinstance(gens, Ideal) else Ideal(gens)
    if f.is_zero():
        return True
    if not ideal.generators:
        return False
    ideal = Ideal(ideal.generators, (*ideal.variables, *f.variables))
    return normal_form(f, buchberger(ideal, **guards)).is_zero()


def jacobian_generators(f: MultiPoly, *, dedup: bool = True) -> Ideal:
    """First partials of ``f`` (zero partials dropped, repeats dropped if ``dedup``)."""
    partials = []
    for v in f.variables:
        d = f.partial(v)
        if d.is_zero() or (dedup and d in partials):
            continue
        partials.append(d)
    return Ideal(partials, f.variables)
