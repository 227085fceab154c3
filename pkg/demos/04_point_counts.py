"""
Counting points over F_p
========================

The complement of the affine hypersurface, counted exhaustively, obeys the
doubling identity with the Lefschetz class replaced by p - 1.
"""

from graphhyper.graphs import banana, complete_graph, iifails_graph
from graphhyper.pointcount import count_affine, verify_doubling_star, verify_triple_recursion

for p in (2, 3, 5, 7):
    r = count_affine(iifails_graph(), p)
    print(f"p={p}: {r.zeros} zeros, {r.complement} in the complement ({r.method}, {r.elapsed_ms:.1f} ms)")

# linear in the pivot variable, so one coordinate is solved instead of enumerated
full = count_affine(complete_graph(4), 5, method="full")
fast = count_affine(complete_graph(4), 5, workers=4)
print(full.zeros == fast.zeros, f"{full.elapsed_ms:.1f} ms vs {fast.elapsed_ms:.1f} ms")

print("star identity on K4:", all(verify_doubling_star(complete_graph(4), e, 3) for e in complete_graph(4).edge_ids))
print("triple recursion on 3-banana:", [verify_triple_recursion(banana(3), "t1", p) for p in (2, 3, 5)])
