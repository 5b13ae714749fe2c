"""
Counterfactuality table
=======================

C0 of the improved protocol over module transmission t, next to the
nested baseline's inner-arm mass over inner-cycle count N.
"""

# %%
from zenochain import experiments as ex

rows, report = ex.gen_table1()
print(report.summary())

# %%
# Side by side at M=25: improved (t=1e-3) and nested baseline (N=320).
by_key = {(r.protocol, r.M, r.t, r.N): r.value for r in rows}
for M in ex.M_GRID:
    print(f"M={M:3d}  C0(t=1e-3) {by_key[('improved', M, 0.001, None)]:.4f}  p2(N=320) {by_key[('slaz', M, None, 320)]:.4f}")
