"""
Empirical constants in the kernel bounds
========================================

Each bound has the shape LHS <= c * RHS with an unspecified constant c. We
sample the domain with a scrambled Halton sequence and record the largest
ratio LHS / RHS for every n. If the bound holds with c independent of n,
these maxima stay flat as n grows.
"""

# %%
from flsuite.harness import verify_kernel_estimates

reports = verify_kernel_estimates([8, 16, 32, 64, 128], samples=200, eps=0.1, seed=0)
for r in reports:
    c = r.c_emp
    print(f"{r.estimate:16s}", "  ".join(f"{c[n]:.4f}" for n in sorted(c)), f" max/c(8) = {max(c.values()) / c[8]:.3f}")

# %%
# What each ratio measures
for r in reports:
    print(r.estimate, ":", r.description)
