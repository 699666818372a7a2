"""
Variation functionals on a grid
===============================

Every functional here is a supremum restricted to grid points, hence a lower
bound for its continuum value. Exhaustive search is exact on small grids;
the greedy peel is a cheap lower bound for larger ones.
"""

# %%
import numpy as np

from flsuite import GridFunction2D, LambdaWeights, lambda_variation_line, modulus_of_variation
from flsuite.harness import corpus
from flsuite.variation import modulus_line, phi_variation, power, variation_report

# the alternating line is the standard sanity case
line = [0, 1, 0, 1, 0]
print("v(n):", modulus_line(line, 5))
print("harmonic:", lambda_variation_line(line, LambdaWeights("harmonic"), "exhaustive"))

# %%
# With lambda = 1 the functional is plain total variation.
rng = np.random.default_rng(0)
line = rng.normal(size=10)
print(lambda_variation_line(line, LambdaWeights("constant")).value, np.abs(np.diff(line)).sum())

# %%
# |x| + |y| is separable, so every mixed increment vanishes.
g = GridFunction2D.uniform(corpus("abs_sum"), 9)
rep = variation_report(g, LambdaWeights("harmonic"), "exhaustive")
for key, val in rep.to_dict().items():
    print(key, val)

# %%
# The modulus of variation of |xy|^alpha along x-lines grows sublinearly.
g = GridFunction2D.uniform(corpus("abs_power", alpha=0.5), 65)
v = modulus_of_variation(g, 1, 64)
for n in (1, 2, 4, 8, 16, 32, 64):
    print(n, v[n - 1])

# %%
# p-variation of the Takagi-type sum settles as more levels are added.
xs = np.linspace(-1, 1, 257)
for levels in (2, 4, 8):
    g = GridFunction2D.from_function(corpus("pbv_p", p=2, levels=levels), xs, np.array([0.0, 1.0]))
    print(levels, phi_variation(g, power(2), 1, 256))

# %%
# On larger grids only the greedy lower bound is affordable.
g = GridFunction2D.uniform(corpus("smooth_osc"), 41)
print(variation_report(g, LambdaWeights("harmonic"), "greedy_peel").to_dict()["lambda_v12"])
