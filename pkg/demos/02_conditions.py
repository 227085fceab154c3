"""
Jacobian-ideal membership at a regular edge
===========================================

Condition I asks whether the contraction polynomial lies in the Jacobian
ideal of the deletion polynomial; Buchberger settles it exactly.
"""

from graphhyper.conditions import assess, scan
from graphhyper.graphs import ifails_graph, iifails_graph, wheel

for name, g, e in (("doubled sides", iifails_graph(), "t5"), ("K4 with a double edge", ifails_graph(), "t7")):
    a = assess(g, e)
    print(name, e, a.verdict.condition_I.value, a.verdict.condition_II.value, a.status.value)
    for note in a.notes:
        print("   ", note)

# the 4-wheel: spokes against rim
for rec in scan([("W4", wheel(4))]):
    print(rec["edge"], rec["condition_I"], rec["condition_II"])
