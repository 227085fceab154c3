"""
Feynman-rule polynomials
========================

Derive C_G(t) from the rules, closed forms for parallel edges and the
shipped fixture registry. Every step is recorded in a derivation trace.
"""

import json

from graphhyper.feynman import C_to_csm, compute_C, default_registry, doubling, multi_edge_closed
from graphhyper.graphs import banana, complete_graph, doubled_triangle_family, iifails_graph
from graphhyper.multigraph import contract_edge, delete_edge

for n in range(1, 7):
    print(f"banana {n}:", compute_C(banana(n)).C)

reg = default_registry()
g = iifails_graph()
r = compute_C(g, reg)
print("C =", r.C, "via", r.trace.rule)
print("csm coefficients:", C_to_csm(r.C, 5).coeffs)

# multiply the single side m times
cG = r.C
c2e = reg.lookup_graph(doubled_triangle_family(2)).C
cCon = compute_C(contract_edge(g, "t5"), reg).C
for m in range(1, 6):
    print(m, multi_edge_closed(cG, c2e, cCon, m))

# the naive doubling formula misses the true class by t^4 here
naive = doubling(cG, compute_C(delete_edge(g, "t5"), reg).C, cCon)
print("naive - true =", naive - c2e)

blocked = compute_C(complete_graph(4), reg)
print(blocked.blocker)
print(json.dumps(blocked.trace.to_dict(), indent=1))
