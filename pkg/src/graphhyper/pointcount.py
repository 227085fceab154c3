"""Exhaustive F_p point counts of affine graph hypersurfaces.

U(G) is realized by its counting function: complement = p^n - #{Psi = 0}.
Assignments are enumerated in contiguous blocks with numpy; blocks may be
spread over a thread pool, and the integer sums are order-independent.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graphpoly import GuardError, psi
from .multigraph import (
    EdgeClass,
    Multigraph,
    canonical_key,
    classify_edge,
    contract_edge,
    delete_edge,
    multiply_edge,
)
from .multipoly import MultiPoly, is_prime

__all__ = [
    "CountResult",
    "count_affine",
    "count_zeros_full",
    "verify_doubling_star",
    "verify_triple_recursion",
    "DEFAULT_PRIMES",
    "COUNT_GUARD",
]

DEFAULT_PRIMES = (2, 3, 5, 7)
COUNT_GUARD = 10**9
BLOCK = 1 << 16


@dataclass(frozen=True)
class CountResult:
    p: int
    n: int
    zeros: int
    complement: int
    method: str
    elapsed_ms: float = 0.0

    def __post_init__(self):
        if not 0 <= self.zeros <= self.p**self.n or self.zeros + self.complement != self.p**self.n:
            raise AssertionError("point count out of range")

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "zeros": self.zeros,
            "complement": self.complement,
            "method": self.method,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


class _Compiled:
    """Integer polynomial over a fixed list of variables, ready for block evaluation."""

    def __init__(self, poly: MultiPoly, variables: list[str], p: int):
        local = poly.with_variables(variables)
        self.terms = []
        for mono, c in local.terms.items():
            if c.denominator != 1:
                raise ValueError("point counting needs integer coefficients")
            idx = [i for i, a in enumerate(mono) for _ in range(a)]
            self.terms.append((int(c.numerator) % p, idx))
        self.p = p

    def evaluate(self, cols: np.ndarray) -> np.ndarray:
        p = self.p
        out = np.zeros(cols.shape[0], dtype=cols.dtype)
        for c, idx in self.terms:
            if c == 0:
                continue
            term = np.full(cols.shape[0], c, dtype=cols.dtype)
            for i in idx:
                term = (term * cols[:, i]) % p
            out = (out + term) % p
        return out


def _digits(start: int, stop: int, k: int, p: int, dtype) -> np.ndarray:
    """Base-p digits of start..stop-1 as a (rows, k) array."""
    idx = np.arange(start, stop, dtype=np.int64) if dtype != object else np.array(range(start, stop), dtype=object)
    cols = np.empty((stop - start, k), dtype=dtype)
    for j in range(k):
        cols[:, j] = idx % p
        idx = idx // p
    return cols


def _blocks(total: int):
    return [(s, min(s + BLOCK, total)) for s in range(0, total, BLOCK)]


def _map_blocks(fn, total: int, workers: int) -> int:
    blocks = _blocks(total)
    if workers <= 1 or len(blocks) <= 1:
        return sum(fn(a, b) for a, b in blocks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda ab: fn(*ab), blocks))


def _dtype(p: int):
    return np.int64 if p < (1 << 31) else object


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p} is not prime")


def count_zeros_full(poly: MultiPoly, n: int, p: int, *, workers: int = 1, guard: int = COUNT_GUARD) -> int:
    """Zeros of ``poly`` on F_p^n by evaluating every assignment of its used variables."""
    _check_prime(p)
    used = list(poly.used_variables())
    free = n - len(used)
    if p ** len(used) > guard:
        raise GuardError(f"p^{len(used)} = {p ** len(used)} exceeds the counting guard {guard}")
    f = _Compiled(poly, used, p)
    dtype = _dtype(p)

    def block(a, b):
        vals = f.evaluate(_digits(a, b, len(used), p, dtype))
        return int(np.count_nonzero(vals == 0))

    return _map_blocks(block, p ** len(used), workers) * p**free


def _pivot(g: Multigraph) -> str | None:
    for e in g.edges:
        if classify_edge(g, e.id) not in (EdgeClass.BRIDGE, EdgeClass.LOOP):
            return e.id
    return None


def _count_shortcut(poly: MultiPoly, pivot: str, n: int, p: int, workers: int, guard: int) -> int:
    a_poly = poly.partial(pivot)
    b_poly = poly.substitute({pivot: 0})
    used = [v for v in poly.used_variables() if v != pivot]
    free = n - 1 - len(used)
    if p ** len(used) > guard:
        raise GuardError(f"p^{len(used)} = {p ** len(used)} exceeds the counting guard {guard}")
    fa = _Compiled(a_poly, used, p)
    fb = _Compiled(b_poly, used, p)
    dtype = _dtype(p)

    def block(lo, hi):
        cols = _digits(lo, hi, len(used), p, dtype)
        a = fa.evaluate(cols)
        b = fb.evaluate(cols)
        # t_e A + B = 0 has one solution in t_e when A != 0, p when A = B = 0
        return int(np.count_nonzero(a != 0)) + p * int(np.count_nonzero((a == 0) & (b == 0)))

    return _map_blocks(block, p ** len(used), workers) * p**free


def count_affine(
    g: Multigraph,
    p: int,
    *,
    method: str = "auto",
    pivot: str | None = None,
    workers: int = 1,
    guard: int = COUNT_GUARD,
) -> CountResult:
    """Count F_p points of Psi_G = 0 in A^n.

    ``method`` is ``"auto"`` (shortcut when a non-loop, non-bridge edge
    exists), ``"shortcut"`` or ``"full"``.
    """
    _check_prime(p)
    n = len(g.edges)
    if p ** max(n - 1, 0) > guard:
        raise GuardError(f"p^{max(n - 1, 0)} exceeds the counting guard {guard}")
    start = time.perf_counter()
    poly = psi(g)
    if method not in ("auto", "shortcut", "full"):
        raise ValueError(f"unknown counting method {method!r}")
    if method != "full":
        if pivot is None:
            pivot = _pivot(g)
        elif classify_edge(g, pivot) in (EdgeClass.BRIDGE, EdgeClass.LOOP):
            raise ValueError(f"pivot {pivot!r} must be neither a bridge nor a loop")
        if pivot is None and method == "shortcut":
            raise ValueError("no edge is available as a pivot for the multilinear shortcut")
    if method == "full" or pivot is None:
        zeros = count_zeros_full(poly, n, p, workers=workers, guard=guard * p)
        used = "full"
    else:
        zeros = _count_shortcut(poly, pivot, n, p, workers, guard)
        used = "shortcut"
    elapsed = (time.perf_counter() - start) * 1000
    return CountResult(p, n, zeros, p**n - zeros, used, elapsed)


class _CountCache:
    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def complement(self, g: Multigraph, p: int) -> int:
        key = (canonical_key(g), p)
        hit = self._data.get(key)
        if hit is None:
            hit = count_affine(g, p).complement
            with self._lock:
                self._data.setdefault(key, hit)
        return hit


_cache = _CountCache()


def verify_doubling_star(g: Multigraph, e: str, p: int) -> bool:
    """U(G_2e) = (T-1) U(G) + T U(G - e) + (T+1) U(G/e) with T = p - 1."""
    cls = classify_edge(g, e)
    if cls in (EdgeClass.BRIDGE, EdgeClass.LOOP):
        raise ValueError(f"edge {e!r} is a {cls.value.lower()}; the doubling identity needs neither")
    u = _cache.complement
    lhs = u(multiply_edge(g, e, 2), p)
    rhs = (p - 2) * u(g, p) + (p - 1) * u(delete_edge(g, e), p) + p * u(contract_edge(g, e), p)
    return lhs == rhs


def verify_triple_recursion(g: Multigraph, e: str, p: int, m: int = 1) -> bool:
    """U_(m+3) = (2T-1) U_(m+2) - T(T-2) U_(m+1) - T^2 U_m, U_k the count for G_ke."""
    cls = classify_edge(g, e)
    if cls != EdgeClass.REGULAR:
        raise ValueError(f"edge {e!r} is not regular (classified as {cls.value})")
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    t = p - 1
    u = [_cache.complement(multiply_edge(g, e, k), p) for k in range(m, m + 4)]
    return u[3] == (2 * t - 1) * u[2] - t * (t - 2) * u[1] - t * t * u[0]
