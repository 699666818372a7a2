"""
Orthonormal Legendre polynomials and Gauss quadrature
=====================================================

The basis p_n = sqrt((2n+1)/2) P_n is evaluated by its three-term
recurrence. A Gauss rule with q nodes integrates polynomials of degree
2q-1 exactly, which is all we need for the Gram matrix.
"""

# %%
import numpy as np

from flsuite import eval_basis, gauss_rule
from flsuite.legendre_core import basis_matrix

# values at a single point
print(eval_basis(4, 0.5).values)

# %%
# The Gram matrix under a 65-point rule is the identity up to roundoff.
rule = gauss_rule(65)
P = basis_matrix(64, rule.nodes)
gram = (P * rule.weights) @ P.T
print("max |G - I| =", np.abs(gram - np.eye(65)).max())

# %%
# The recurrence stays finite at very high degree. At x = 1 the value is
# sqrt((2n+1)/2) exactly.
n = 5000
print(basis_matrix(n, np.array([1.0]))[n, 0], np.sqrt((2 * n + 1) / 2))

# %%
# Nodes cluster towards the endpoints, weights shrink there.
r = gauss_rule(12)
for x, w in zip(r.nodes, r.weights):
    print(f"{x:+.6f}  {w:.6f}")
