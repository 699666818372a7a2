"""
Uniform convergence of square partial sums
==========================================

Sup-norm error of S_{n,n} f on the interior square [-1+eps, 1-eps]^2,
measured on a 41 x 41 lattice. The lattice maximum is a lower bound for the
true sup norm. The figure is written to convergence.png next to this
script.
"""

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from flsuite.harness import corpus, run_convergence

sizes = [4, 8, 16, 32, 64]
tables = {name: run_convergence(corpus(name), 0.25, sizes) for name in ("abs_sum", "smooth_osc", "abs_power", "pbv_p")}
for name, t in tables.items():
    print(f"{name:12s}", "  ".join(f"{e:.3e}" for e in t.errors))

# %%
# |x| + |y| roughly halves its error every time n doubles.
e = tables["abs_sum"].errors
print(e[1:] / e[:-1])

# %%
fig, ax = plt.subplots(figsize=(5, 4))
for name, t in tables.items():
    ax.loglog(sizes, t.errors, "o-", label=name)
ax.set_xlabel("n")
ax.set_ylabel("sup error on [-0.75, 0.75]^2")
ax.legend()
fig.tight_layout()
fig.savefig(Path(__file__).with_name("convergence.png"), dpi=120)
