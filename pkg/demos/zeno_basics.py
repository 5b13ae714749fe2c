"""
Zeno freezing in a beam-splitter chain
======================================

A photon passes M beam splitters of angle pi/2M. With an open channel the
amplitude rotates fully into the channel arm; an obstruction in every
cycle keeps it in Alice's arm.
"""

# %%
from zenochain import ImprovedParams, improved_c1, improved_run

for M in (5, 25, 100, 1000):
    params = ImprovedParams(M)
    passed = improved_run(params, "pass")
    blocked = improved_run(params, "block")
    print(f"M={M:5d}  pass->D2 {passed.D2:.6f}  block->D1 {blocked.D1:.6f}  cos^2M {improved_c1(M):.6f}")

# %%
# Every run conserves probability across the five outcomes.
d = improved_run(ImprovedParams(25), "block")
print(d.as_dict(), "total", d.total())
