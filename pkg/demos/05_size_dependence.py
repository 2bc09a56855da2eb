r"""
Size dependence of the echo
===========================

In the localized phase the echo of L = 233 and L = 377 rings coincide to
rounding error: the impurity only sees a few localization lengths around it.
In the delocalized phase the echo depends on L once particles have had time
to travel around the ring. The L = 987 curves take a few minutes each, so they
are left out here.
"""

import matplotlib.pyplot as plt
import numpy as np

from aamemory import LatticeConfig, decoherence_series

fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=False)
for ax, delta in zip(axes, (0.5, 2.5)):
    curves = {}
    for length in (233, 377):
        config = LatticeConfig(length, potential_strength=delta, impurity_coupling=1e-2)
        curves[length] = decoherence_series(config)
        s = curves[length]
        ax.plot(s.times, s.magnitude, label=f"L={length}")
    gap = np.abs(curves[233].magnitude - curves[377].magnitude).max()
    print(f"Delta/J = {delta}: max ||chi|_233 - |chi|_377| = {gap:.2e}")
    ax.set_title(rf"$\Delta/J={delta}$, $\epsilon/J=10^{{-2}}$")
    ax.set_xlabel(r"$Jt$")
    ax.legend()
axes[0].set_ylabel(r"$|\chi(t)|$")
fig.tight_layout()
fig.savefig("size_dependence.png", dpi=120)
