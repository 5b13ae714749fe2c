"""
Iterative chain module
======================

Light entering the module either comes back, is absorbed inside, or
crosses all N elements to reach Bob.
"""

# %%
from zenochain import ChainModule, uniform_for_target
from zenochain.chain_module import absorb_prob, reflect_back_prob, total_transmission

for N in (1, 2, 4, 8):
    m = uniform_for_target(N, 1e-3)
    print(f"N={N}  t={total_transmission(m):.2e}  returned {reflect_back_prob(m):.6f}  absorbed {absorb_prob(m):.6f}")

# %%
m = ChainModule((0.9, 0.5, 0.1))
parts = reflect_back_prob(m), absorb_prob(m), total_transmission(m)
print("returned, absorbed, transmitted:", parts, "sum", sum(parts))
