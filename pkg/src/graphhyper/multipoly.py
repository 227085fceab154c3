"""Exact polynomial arithmetic.

``MultiPoly`` is a sparse multivariate polynomial over the rationals whose
monomials are exponent tuples aligned with an ordered variable universe.
``FeynmanPoly`` is a univariate integer polynomial in ``t``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from numbers import Rational

__all__ = [
    "MultiPoly",
    "FeynmanPoly",
    "EVERY_DEGREE",
    "degrevlex_key",
    "is_prime",
    "feynman_eval",
    "feynman_derivative_at_zero",
]

Monomial = tuple[int, ...]

_VAR = r"[A-Za-z_][A-Za-z0-9_]*"
_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


class _EveryDegree:
    """Degree sentinel for the zero polynomial, homogeneous of every degree."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EVERY_DEGREE"


EVERY_DEGREE = _EveryDegree()


def degrevlex_key(mono: Monomial) -> tuple:
    """Sort key: larger key means larger monomial under degrevlex."""
    return (sum(mono), tuple(-a for a in reversed(mono)))


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, Rational):
        return Fraction(c)
    raise TypeError(f"exact rational coefficient expected, got {type(c).__name__}")


def _merge_universe(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys((*a, *b)))


class MultiPoly:
    """Immutable polynomial with ``Fraction`` coefficients.

    ``variables`` fixes the variable order (degrevlex with earlier variables
    larger); arithmetic takes the union of universes. Equality is mathematical
    and ignores unused variables.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Iterable[str], terms: Mapping[Monomial, object] | None = None):
        self.variables: tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable in universe")
        n = len(self.variables)
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != n or any(a < 0 for a in mono):
                raise ValueError(f"bad exponent vector {mono} for {n} variables")
            c = _as_fraction(c)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def constant(cls, c, variables: Iterable[str] = ()) -> MultiPoly:
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> MultiPoly:
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            variables = variables + (name,)
        mono = tuple(int(v == name) for v in variables)
        return cls(variables, {mono: 1})

    @classmethod
    def from_sparse(cls, variables: Iterable[str], items: Iterable[tuple[Mapping[str, int], object]]) -> MultiPoly:
        """Build from ``({var: exp}, coeff)`` pairs."""
        variables = tuple(variables)
        pos = {v: i for i, v in enumerate(variables)}
        terms: dict[Monomial, Fraction] = {}
        for sparse, c in items:
            mono = [0] * len(variables)
            for v, a in sparse.items():
                mono[pos[v]] += a
            mono = tuple(mono)
            terms[mono] = terms.get(mono, Fraction(0)) + _as_fraction(c)
        return cls(variables, terms)

    # views ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def sparse_terms(self) -> dict[frozenset, Fraction]:
        """Terms keyed by ``frozenset((var, exp))`` with zero exponents dropped."""
        out = {}
        for mono, c in self.terms.items():
            out[frozenset((v, a) for v, a in zip(self.variables, mono) if a)] = c
        return out

    def used_variables(self) -> tuple[str, ...]:
        used = [False] * len(self.variables)
        for mono in self.terms:
            for i, a in enumerate(mono):
                if a:
                    used[i] = True
        return tuple(v for v, u in zip(self.variables, used) if u)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending degrevlex order."""
        return sorted(self.terms.items(), key=lambda kv: degrevlex_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        mono = max(self.terms, key=degrevlex_key)
        return mono, self.terms[mono]

    def total_degree(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self):
        """Common total degree, ``None`` if mixed, ``EVERY_DEGREE`` for zero."""
        if not self.terms:
            return EVERY_DEGREE
        degrees = {sum(m) for m in self.terms}
        return degrees.pop() if len(degrees) == 1 else None

    def is_multilinear(self) -> bool:
        return all(a <= 1 for mono in self.terms for a in mono)

    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def coefficient(self, sparse: Mapping[str, int]) -> Fraction:
        return self.sparse_terms().get(frozenset((v, a) for v, a in sparse.items() if a), Fraction(0))

    # universe handling ----------------------------------------------------

    def with_variables(self, variables: Iterable[str]) -> MultiPoly:
        """Re-express over ``variables`` (must contain every used variable)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        mapping = []
        for i, v in enumerate(self.variables):
            mapping.append(pos.get(v))
        terms = {}
        n = len(variables)
        for mono, c in self.terms.items():
            new = [0] * n
            for i, a in enumerate(mono):
                if a:
                    j = mapping[i]
                    if j is None:
                        raise ValueError(f"variable {self.variables[i]!r} missing from target universe")
                    new[j] = a
            terms[tuple(new)] = c
        return MultiPoly(variables, terms)

    def _aligned(self, other: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
        if self.variables == other.variables:
            return self, other
        universe = _merge_universe(self.variables, other.variables)
        return self.with_variables(universe), other.with_variables(universe)

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(_as_fraction(other), self.variables)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other) -> MultiPoly:
        a, b = self._aligned(self._coerce(other))
        terms = dict(a.terms)
        for mono, c in b.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + c
        return MultiPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> MultiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            return self.scalar_mul(other)
        a, b = self._aligned(other)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                mono = tuple(x + y for x, y in zip(m1, m2))
                terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
        return MultiPoly(a.variables, terms)

    def __rmul__(self, other) -> MultiPoly:
        return self.scalar_mul(other)

    def scalar_mul(self, c) -> MultiPoly:
        c = _as_fraction(c)
        return MultiPoly(self.variables, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, k: int) -> MultiPoly:
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, mono: Monomial, c=1) -> MultiPoly:
        c = _as_fraction(c)
        return MultiPoly(
            self.variables,
            {tuple(x + y for x, y in zip(m, mono)): c * v for m, v in self.terms.items()},
        )

    def divexact(self, divisor: MultiPoly) -> MultiPoly:
        """Exact quotient; raises ``ArithmeticError`` if ``divisor`` does not divide."""
        a, d = self._aligned(divisor)
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        lm_d, lc_d = d.leading_term()
        rest = dict(a.terms)
        quotient: dict[Monomial, Fraction] = {}
        d_items = list(d.terms.items())
        while rest:
            lm = max(rest, key=degrevlex_key)
            shift = tuple(x - y for x, y in zip(lm, lm_d))
            if any(s < 0 for s in shift):
                raise ArithmeticError("polynomial division is not exact")
            q = rest[lm] / lc_d
            quotient[shift] = q
            for mono, c in d_items:
                key = tuple(x + y for x, y in zip(mono, shift))
                val = rest.get(key, Fraction(0)) - q * c
                if val:
                    rest[key] = val
                else:
                    rest.pop(key, None)
        return MultiPoly(a.variables, quotient)

    # calculus and evaluation ----------------------------------------------

    def partial(self, v: str) -> MultiPoly:
        if v not in self.variables:
            return MultiPoly(self.variables)
        i = self.variables.index(v)
        terms = {}
        for mono, c in self.terms.items():
            a = mono[i]
            if a:
                terms[mono[:i] + (a - 1,) + mono[i + 1:]] = c * a
        return MultiPoly(self.variables, terms)

    def substitute(self, values: Mapping[str, object]) -> MultiPoly:
        """Substitute rational constants for some variables (universe kept)."""
        idx = {self.variables.index(v): _as_fraction(c) for v, c in values.items() if v in self.variables}
        terms: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            coef = c
            new = list(mono)
            for i, val in idx.items():
                if mono[i]:
                    coef *= val ** mono[i]
                    new[i] = 0
            new = tuple(new)
            terms[new] = terms.get(new, Fraction(0)) + coef
        return MultiPoly(self.variables, terms)

    def evaluate(self, assignment: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        vals = [self._lookup(assignment, v) for v in self.used_variables()]
        used = self.used_variables()
        pos = [self.variables.index(v) for v in used]
        for mono, c in self.terms.items():
            term = c
            for j, i in enumerate(pos):
                if mono[i]:
                    term *= _as_fraction(vals[j]) ** mono[i]
            total += term
        return total

    @staticmethod
    def _lookup(assignment, v):
        try:
            return assignment[v]
        except KeyError:
            raise KeyError(f"assignment is missing variable {v!r}") from None

    def evaluate_mod_p(self, assignment: Mapping[str, int], modulus: int) -> int:
        if not is_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        used = self.used_variables()
        pos = [self.variables.index(v) for v in used]
        vals = [int(self._lookup(assignment, v)) % modulus for v in used]
        total = 0
        for mono, c in self.terms.items():
            if c.denominator % modulus == 0:
                raise ZeroDivisionError(f"coefficient {c} is not defined mod {modulus}")
            term = c.numerator * pow(c.denominator, -1, modulus)
            for j, i in enumerate(pos):
                if mono[i]:
                    term = term * pow(vals[j], mono[i], modulus) % modulus
            total += term
        return total % modulus

    # comparison --------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            if self.variables == other.variables:
                return self.terms == other.terms
            return self.sparse_terms() == other.sparse_terms()
        if isinstance(other, Rational):
            return self == MultiPoly.constant(other, self.variables)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.sparse_terms().items()))
        return self._hash

    # text ------------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for mono, c in self.sorted_terms():
            factors = []
            for v, a in zip(self.variables, mono):
                if a == 1:
                    factors.append(v)
                elif a > 1:
                    factors.append(f"{v}^{a}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"

    @classmethod
    def parse(cls, text: str, variables: Iterable[str] | None = None) -> MultiPoly:
        """Parse the format produced by ``str``: ``c*x^a*y`` terms joined by ``+``/``-``.

        Variables not listed in ``variables`` are appended in order of appearance.
        """
        universe = list(variables) if variables is not None else []
        text = text.strip()
        if not text:
            raise ValueError("empty polynomial text")
        items = []
        pos = 0
        while pos < len(text):
            m = _TERM_RE.match(text, pos)
            if not m or not m.group(2).strip():
                raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
            sign = -1 if m.group(1) == "-" else 1
            coef = Fraction(sign)
            sparse: dict[str, int] = {}
            for factor in m.group(2).strip().split("*"):
                factor = factor.strip()
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    coef *= Fraction(factor)
                    continue
                fm = re.fullmatch(rf"({_VAR})(?:\^(\d+))?", factor)
                if not fm:
                    raise ValueError(f"bad factor {factor!r}")
                name = fm.group(1)
                if name not in universe:
                    universe.append(name)
                sparse[name] = sparse.get(name, 0) + int(fm.group(2) or 1)
            items.append((sparse, coef))
            pos = m.end()
        return cls.from_sparse(universe, items)


# ---------------------------------------------------------------------------


class FeynmanPoly:
    """Univariate polynomial in ``t`` with integer coefficients (low degree first)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = []
        for c in coeffs:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"non-integer coefficient {c}")
                c = c.numerator
            if not isinstance(c, int):
                raise TypeError(f"integer coefficient expected, got {type(c).__name__}")
            cs.append(int(c))
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[int, ...] = tuple(cs)

    @classmethod
    def t(cls) -> FeynmanPoly:
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> FeynmanPoly:
        return cls((c,))

    @property
    def degree(self) -> int | None:
        """Degree, or ``None`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _coerce(self, other) -> FeynmanPoly:
        if isinstance(other, FeynmanPoly):
            return other
        if isinstance(other, int):
            return FeynmanPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return FeynmanPoly(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> FeynmanPoly:
        return FeynmanPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return FeynmanPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return FeynmanPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> FeynmanPoly:
        if k < 0:
            raise ValueError("negative power")
        result = FeynmanPoly((1,))
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = FeynmanPoly((other,))
        if not isinstance(other, FeynmanPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> FeynmanPoly:
        return FeynmanPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                power = "t" if i == 1 else f"t^{i}"
                body = power if mag == 1 else f"{mag}*{power}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"FeynmanPoly({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> FeynmanPoly:
        """Parse an expanded polynomial in ``t`` such as ``t^3 - 2*t + 1``."""
        poly = MultiPoly.parse(text, ["t"])
        if set(poly.used_variables()) - {"t"}:
            raise ValueError(f"only the variable t is allowed: {text!r}")
        out: dict[int, Fraction] = {}
        for mono, c in poly.with_variables(poly.variables).terms.items():
            out[mono[poly.variables.index("t")]] = c
        if not out:
            return cls()
        return cls(out.get(i, 0) for i in range(max(out) + 1))


def feynman_eval(c: FeynmanPoly, x: int) -> int:
    return c(x)


def feynman_derivative_at_zero(c: FeynmanPoly) -> int:
    """The coefficient of ``t``."""
    return c.coeff(1)
