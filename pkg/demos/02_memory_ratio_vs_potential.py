r"""
Memory ratio across the transition
==================================

R = N-/N+ against Delta/J for three impurity couplings at L = 233. The
horizon of every run is 20/epsilon, the time scale on which the impurity acts.
A coarse Delta grid keeps the run to a few minutes; ``recipes.ratio_vs_coupling``
gives the full 0.05-step sweep.
"""

import matplotlib.pyplot as plt
import numpy as np

from aamemory import SweepSpec, run_sweep

deltas = tuple(np.round(np.arange(1.0, 3.01, 0.1), 10))
spec = SweepSpec(delta_over_j=deltas, epsilon_over_j=(1e-1, 1e-2, 1e-3), lengths=(233,))
records = run_sweep(spec, "ratio_vs_potential.csv")

fig, ax = plt.subplots(figsize=(7, 4))
for eps in spec.epsilon_over_j:
    rows = [r for r in records if r.params["epsilon_over_j"] == eps]
    ax.plot([r.params["delta_over_j"] for r in rows], [r.ratio for r in rows], "o-",
            label=rf"$\epsilon/J={eps:g}$")
ax.axvline(2.0, color="grey", lw=0.8, ls="--")
ax.set_xlabel(r"$\Delta/J$")
ax.set_ylabel(r"$\mathcal{R}$")
ax.legend()
fig.tight_layout()
fig.savefig("ratio_vs_potential.png", dpi=120)
