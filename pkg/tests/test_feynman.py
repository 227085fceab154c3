import threading

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from graphhyper.feynman import (
    C_to_csm,
    CsmRecord,
    FixtureEntry,
    FixtureRegistry,
    ForestClassError,
    Provenance,
    ProvenanceError,
    banana_closed,
    c_bridge_rule,
    c_forest,
    c_loop_rule,
    chi_hypersurface,
    chi_identity_check,
    compute_C,
    csm_to_C,
    default_registry,
    delcon,
    doubling,
    goodform_closed,
    multi_edge_closed,
    multi_edge_recursion,
)
from graphhyper.graphs import (
    banana,
    complete_graph,
    doubled_edge_triangle,
    doubled_triangle,
    doubled_triangle_family,
    ifails_deletion,
    ifails_graph,
    iifails_graph,
    path,
    triangle,
    two_bananas_at_vertex,
)
from graphhyper.multigraph import canonical_key, from_edge_list
from graphhyper.multipoly import FeynmanPoly

T = FeynmanPoly.t()
t = sympy.Symbol("t")


def F(text):
    return FeynmanPoly.parse(text)


def from_sympy(expr) -> FeynmanPoly:
    poly = sympy.Poly(sympy.expand(expr), t)
    return FeynmanPoly(int(c) for c in reversed(poly.all_coeffs()))


# the doubled-triangle data: C_G, C_(G minus e), C_(G/e) for the single edge e
DT_CG = F("t^5 + 2*t^4 + 4*t^3 + 2*t^2")
DT_DEL = F("t^4 + 2*t^3 + t^2")
DT_CON = F("4*t^3") + T * (T - 1) ** 3
DT_C2E = F("t^6 + 2*t^5 + 7*t^4 + 2*t^3 + t^2 - t")


def dt_family_oracle(m: int) -> FeynmanPoly:
    expr = (t**2 - t + 1) ** 2 * t * (t - 1) ** (m - 1) + (
        4 * t**3 + t**2 + 4 * t - 1 + (m - 1) * (t**3 + t**2 + 3 * t - 1)
    ) * t**m
    return from_sympy(expr)


coeff_lists = st.lists(st.integers(-6, 6), max_size=6)


# rules


def test_forest_bridge_loop():
    assert c_forest(0) == 1
    assert c_forest(1) == T + 1
    assert c_forest(3) == F("t^3 + 3*t^2 + 3*t + 1")
    with pytest.raises(ValueError):
        c_forest(-1)
    assert c_bridge_rule(FeynmanPoly.const(1)) == T + 1
    assert c_bridge_rule(T * (T + 1)) == T * (T + 1) ** 2
    c = FeynmanPoly.const(1)
    for _ in range(4):
        c = c_bridge_rule(c)
    assert c == c_forest(4)
    assert c_loop_rule(FeynmanPoly.const(1)) == T
    assert c_loop_rule(T + 1) == T * (T + 1)
    assert c_loop_rule(c_loop_rule(FeynmanPoly.const(1))) == T**2


def test_delcon_examples():
    assert delcon(F("t^4 + 4*t^3 + 3*t^2 + t"), F("t^4 + 2*t^3 + 2*t^2 + t")) == DT_CG
    c = F("t^2 + t")
    assert delcon(c, c) == c_loop_rule(c)
    assert delcon(c_forest(3), c_forest(3)) == T * (T + 1) ** 3


def test_doubling_examples():
    assert doubling(F("t^3 + t^2 + t"), F("t^2 + t"), T**2) == F("t^4 + t^3 + 3*t^2 - t")
    wrong = doubling(DT_CG, DT_DEL, DT_CON)
    assert wrong == F("t^6 + 2*t^5 + 8*t^4 + 2*t^3 + t^2 - t")
    assert wrong - DT_C2E == T**4
    zero = FeynmanPoly()
    assert doubling(zero, zero, zero) == zero


def test_banana_closed_form_against_sympy():
    for n in range(1, 10):
        assert banana_closed(n) == from_sympy(n * t ** (n - 1) + t * (t - 1) ** (n - 1))
        assert multi_edge_closed(T + 1, T * (T + 1), FeynmanPoly.const(1), n) == banana_closed(n)
    assert [str(banana_closed(n)) for n in (1, 2, 3, 4)] == [
        "t + 1",
        "t^2 + t",
        "t^3 + t^2 + t",
        "t^4 + t^3 + 3*t^2 - t",
    ]


def test_multi_edge_closed_examples():
    assert multi_edge_closed(DT_CG, DT_C2E, DT_CON, 1) == DT_CG
    for m in range(1, 11):
        assert multi_edge_closed(DT_CG, DT_C2E, DT_CON, m) == dt_family_oracle(m)
    with pytest.raises(ValueError):
        multi_edge_closed(DT_CG, DT_C2E, DT_CON, 0)


def test_recursion_examples():
    assert multi_edge_recursion(T + 1, T * (T + 1), F("t^3 + t^2 + t")) == banana_closed(4)
    zero = FeynmanPoly()
    assert multi_edge_recursion(zero, zero, zero) == zero
    seq = [dt_family_oracle(m) for m in range(1, 5)]
    assert multi_edge_recursion(*seq[:3]) == seq[3]


def test_recursion_characteristic_roots():
    for m in range(1, 8):
        for x in (lambda k: T**k, lambda k: k * T ** (k - 1), lambda k: (T - 1) ** k):
            assert multi_edge_recursion(x(m), x(m + 1), x(m + 2)) == x(m + 3)


def test_goodform_examples():
    b1, b2, b3 = T + 1, T * (T + 1), F("t^3 + t^2 + t")
    assert goodform_closed(b1, b2, b3, 1) == T * (T + 1)
    assert goodform_closed(b1, b2, b3, 3) == F("t^4 + t^3 + 3*t^2 - t")
    with pytest.raises(ValueError):
        goodform_closed(b1, b2, b3, 0)
    c3 = multi_edge_closed(DT_CG, DT_C2E, DT_CON, 3)
    for m in range(1, 9):
        assert goodform_closed(DT_CG, DT_C2E, c3, m) == multi_edge_closed(DT_CG, DT_C2E, DT_CON, m + 1)


@settings(max_examples=100, deadline=None)
@given(coeff_lists, coeff_lists, coeff_lists)
def test_closed_forms_and_recursion_agree(a, b, c):
    cG, c2e, cCon = FeynmanPoly(a), FeynmanPoly(b), FeynmanPoly(c)
    seq = [multi_edge_closed(cG, c2e, cCon, m) for m in range(1, 14)]
    assert seq[0] == cG and seq[1] == c2e
    for m in range(10):
        assert multi_edge_recursion(seq[m], seq[m + 1], seq[m + 2]) == seq[m + 3]
    for m in range(1, 11):
        assert goodform_closed(cG, c2e, seq[2], m) == seq[m]


@settings(max_examples=50, deadline=None)
@given(coeff_lists, coeff_lists, coeff_lists)
def test_doubling_chain_reproduces_closed_form(a, b, c):
    # doubling one of m parallel copies: deletion has m-1 copies, contraction
    # has m-1 loops over G/e, so C_(m+1) = (2t-1) C_m - t(t-1) C_(m-1) + t^(m-1) C(G/e)
    cG, cDel, cCon = FeynmanPoly(a), FeynmanPoly(b), FeynmanPoly(c)
    c2e = doubling(cG, cDel, cCon)
    seq = [multi_edge_closed(cG, c2e, cCon, m) for m in range(1, 10)]
    for m in range(2, 9):
        assert doubling(seq[m - 1], seq[m - 2], T ** (m - 1) * cCon) == seq[m]


# CSM conversions and Euler characteristics


def test_csm_examples():
    assert csm_to_C(CsmRecord(7, (7, 21, 29, 26, 12, 4))) == F("t^7 + 3*t^6 + 9*t^5 + 9*t^4 + 6*t^3")
    assert csm_to_C(CsmRecord(6, (7, 14, 18, 8, 4))) == DT_C2E
    assert csm_to_C(CsmRecord(2, ())) == F("t^2 + 2*t")
    rec = C_to_csm(F("t^7 + 3*t^6 + 9*t^5 + 9*t^4 + 6*t^3"), 7)
    assert rec.coeffs == (7, 21, 29, 26, 12, 4)
    assert C_to_csm(DT_CG, 5).coeffs == (5, 8, 6, 3)


def test_csm_errors():
    with pytest.raises(ForestClassError):
        C_to_csm(c_forest(3), 3)
    with pytest.raises(ValueError, match="degree"):
        C_to_csm(T**5, 3)
    with pytest.raises(ValueError, match="constant"):
        C_to_csm(T**3 + 1 + T, 3)
    with pytest.raises(ValueError, match="monic"):
        C_to_csm(2 * T**3, 3)
    with pytest.raises(ValueError):
        CsmRecord(3, (1, 2, 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.data())
def test_csm_round_trip(n, data):
    coeffs = tuple(data.draw(st.lists(st.integers(-20, 40), max_size=n - 1)))
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    rec = CsmRecord(n, coeffs)
    c = csm_to_C(rec)
    if c == c_forest(n):
        return
    assert C_to_csm(c, n) == rec


def test_chi_examples():
    assert chi_hypersurface(F("t^7 + 3*t^6 + 9*t^5 + 9*t^4 + 6*t^3"), 7) == 7
    assert chi_hypersurface(DT_CG, 5) == 5
    assert chi_hypersurface(T * (T + 1), 2) == 1


def test_chi_identity_examples():
    assert chi_identity_check(DT_CG, DT_DEL, F("t^4 + 4*t^3 + 3*t^2"), 5)
    assert chi_identity_check(DT_CG, F("t^4 + 2*t^3 + 2*t^2 + t"), F("t^4 + 4*t^3 + 3*t^2 + t"), 5)
    assert chi_identity_check(
        F("t^7 + 3*t^6 + 9*t^5 + 9*t^4 + 6*t^3"),
        F("t^6 + 3*t^5 + 6*t^4 + 6*t^3 + t^2 - t"),
        F("t^6 + 6*t^5 + 9*t^4 + 10*t^3 + 2*t^2 - t"),
        7,
    )
    assert not chi_identity_check(DT_CG, DT_DEL, F("t^4 + 4*t^3 + 3*t^2 + 5*t"), 5)


# registry


def test_registry_lookup_and_insert():
    reg = default_registry()
    entry = reg.lookup(canonical_key(banana(6)))
    assert entry is not None and entry.C == banana_closed(6)
    assert entry.provenance == Provenance.PUBLISHED and entry.citation
    assert reg.lookup(canonical_key(complete_graph(4))) is None

    fresh = FixtureRegistry()
    fresh.insert_graph(banana(4), banana_closed(4), Provenance.DERIVED)
    assert fresh.lookup_graph(banana(4)).C == banana_closed(4)
    again = FixtureRegistry.from_json(fresh.to_json())
    assert again.lookup_graph(banana(4)).C == banana_closed(4)


def test_registry_provenance_rules():
    with pytest.raises(ProvenanceError):
        FixtureEntry("V1|", FeynmanPoly.const(1), Provenance.PUBLISHED)
    reg = default_registry()
    with pytest.raises(ProvenanceError):
        reg.insert_graph(banana(3), T, Provenance.USER_INPUT)
    # re-inserting an identical published entry is harmless
    reg.insert(reg.lookup_graph(banana(3)))


def test_registry_concurrent_writes():
    reg = FixtureRegistry()
    graphs = [banana(n) for n in range(1, 9)]

    def work(g):
        reg.insert_graph(g, banana_closed(len(g.edges)), Provenance.DERIVED)
        assert reg.lookup_graph(g) is not None

    threads = [threading.Thread(target=work, args=(g,)) for g in graphs for _ in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert len(reg) == 8


def test_registry_intersection_by_edge_orbit():
    reg = default_registry()
    g = iifails_graph()
    # t1 and t3 lie in the two doubled sides, which an automorphism swaps
    assert reg.intersection(g, "t1") == reg.intersection(g, "t3") == F("t^4 + 4*t^3 + 3*t^2 + t")
    assert reg.intersection(g, "t5") == F("t^4 + 4*t^3 + 3*t^2")
    assert reg.intersection(ifails_graph(), "t7") == F("t^6 + 6*t^5 + 9*t^4 + 10*t^3 + 2*t^2 - t")


def test_shipped_fixtures_consistent():
    reg = default_registry()
    assert len(reg) >= 14
    for entry in reg:
        assert entry.graph is not None
        assert canonical_key(entry.graph).decode() == entry.key
        n = len(entry.graph.edges)
        if entry.csm is not None:
            assert entry.csm.ambient_n == n
            assert csm_to_C(entry.csm) == entry.C
        assert entry.C.coeff(n) == 1 and entry.C.degree == n


def test_fixture_key_mismatch_rejected():
    entry = default_registry().lookup_graph(banana(3)).to_dict()
    entry["key"] = "V2|1-0"
    with pytest.raises(ValueError, match="key"):
        FixtureEntry.from_dict(entry)


# compute_C


def test_compute_bananas_without_fixtures():
    for n in range(1, 9):
        r = compute_C(banana(n), FixtureRegistry())
        assert r.ok and r.C == banana_closed(n)


def test_compute_forests_and_rules():
    assert compute_C(path(4)).C == c_forest(4)
    assert compute_C(Multigraph_empty()).C == 1
    assert compute_C(triangle()).C == T * (T + 1) ** 2
    assert compute_C(two_bananas_at_vertex()).C == T**2 * (T + 1) ** 2
    g = from_edge_list([(0, 0), (0, 1), (1, 2), (2, 1), (2, 2)])
    assert compute_C(g).C == T * (T + 1) * (T * (T + 1)) * T


def Multigraph_empty():
    from graphhyper.multigraph import Multigraph

    return Multigraph([0], [])


def test_compute_doubled_triangle_family():
    reg = default_registry()
    for m in range(1, 7):
        r = compute_C(doubled_triangle_family(m), reg)
        assert r.C == dt_family_oracle(m), m
    assert compute_C(doubled_triangle_family(2), reg).C == DT_C2E


def test_compute_uses_delcon_with_fixture_intersection():
    r = compute_C(iifails_graph(), default_registry())
    assert r.C == DT_CG
    assert r.trace.rule == "delcon"
    assert r.trace.to_dict()["children"][0]["rule"] == "fixture_intersection"


def test_compute_blocked_names_missing_class():
    r = compute_C(complete_graph(4), default_registry())
    assert not r.ok and r.C is None
    assert "C(X_(G minus e) cap X_(G/e))" in r.blocker
    assert r.trace.rule == "blocked"


def test_compute_blocked_parallel_edge_without_fixture():
    r = compute_C(doubled_edge_triangle(), FixtureRegistry())
    assert not r.ok and "missing intersection class" in r.blocker


def test_failing_ifails_data_is_not_delcon():
    # the formula does not apply at the vertical edge; record that it misses
    got = delcon(F("t^6 + 6*t^5 + 9*t^4 + 10*t^3 + 2*t^2 - t"), F("t^6 + 3*t^5 + 6*t^4 + 6*t^3 + t^2 - t"))
    assert got != default_registry().lookup_graph(ifails_graph()).C
    assert default_registry().lookup_graph(ifails_deletion()).C == F("t^6 + 3*t^5 + 6*t^4 + 6*t^3 + t^2 - t")
    assert default_registry().lookup_graph(doubled_triangle()).C == DT_C2E
