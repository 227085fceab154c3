"""
Graph polynomials three ways
============================

The polynomial of a multigraph, computed by listing spanning forests, by a
Kirchhoff determinant, and by deletion-contraction.
"""

from graphhyper.graphpoly import psi_enumerate, psi_matrix_tree, psi_recursion
from graphhyper.graphs import banana, iifails_graph, wheel
from graphhyper.multigraph import canonical_key, classify_edge

g = iifails_graph()
print(g.to_text())

for route in (psi_enumerate, psi_matrix_tree, psi_recursion):
    r = route(g)
    print(f"{r.method.value:>12}: {r.polynomial}  ({r.forest_count} forests)")

# edge classes drive every later computation
for e in g.edge_ids:
    print(e, classify_edge(g, e).value)

# isomorphic graphs share a key, whatever the labels
print(canonical_key(banana(3)))
print(psi_recursion(wheel(4)).polynomial.is_homogeneous(), "= loop number of the 4-wheel")
