"""
Christoffel-Darboux kernel and rectangular partial sums
=======================================================

K_n(x, t) = sum_{k<n} p_k(x) p_k(t) has a closed quotient form away from the
diagonal. The rectangular partial sum of a function can be computed from
its coefficient matrix or by integrating against two kernels; both routes
must agree.
"""

# %%
from flsuite import coefficients, gauss_rule, kernel, partial_sum, partial_sum_kernel
from flsuite.harness import CORPUS, corpus

# off the diagonal the quotient form is used, on it the direct sum
print(kernel(10, 0.2, 0.7))
print(kernel(10, 0.2, 0.2))

# %%
# Two routes to S_{N,M} f at one point.
f = corpus("smooth_osc", a=0.1)
rule = gauss_rule(64)
for N in (4, 16, 32):
    C = coefficients(f, N, N, rule)
    a = partial_sum(C, N, N, 0.3, -0.2).value
    b = partial_sum_kernel(f, N, N, 0.3, -0.2, rule).value
    print(f"N={N:2d}  coefficients {a:+.12f}  kernel {b:+.12f}  f {float(f(0.3, -0.2)):+.12f}")

# %%
# Asymmetric truncation: x^2 needs three modes in x and one in y.
C = coefficients(lambda x, y: x * x, 3, 1, gauss_rule(6))
print(C.values.ravel())
print(partial_sum(C, 3, 1, 0.7, 0.0).value, partial_sum(C, 2, 1, 0.7, 0.0).value)

# %%
# Everything in the test corpus can be fed through the same calls.
print(sorted(CORPUS))
