"""
C0 against M
============

Longer chains and leakier modules both erode counterfactuality.
"""

# %%
import numpy as np

from zenochain import experiments as ex

rows = ex.sweep_c0(ex.T_VALUES, range(25, 151))
curves = {t: np.array([r.value for r in rows if r.t == t]) for t in ex.T_VALUES}
for t, vals in curves.items():
    print(f"t={t:<8g} C0(25)={vals[0]:.4f} C0(150)={vals[-1]:.4f}  slope {np.polyfit(range(25, 151), vals, 1)[0]:.2e}")

# %%
for name, ok in ex.fig3_checks(rows):
    print("PASS" if ok else "FAIL", name)
