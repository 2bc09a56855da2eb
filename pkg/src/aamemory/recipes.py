"""Standard parameter sets: echo families and memory-ratio curves.

The fixed-size echo scans are run at both L = 233 and L = 377
(:data:`ECHO_SCAN_LENGTHS`); the length is an argument of those recipes.
"""

from __future__ import annotations

from .lattice import LatticeConfig
from .sweep import GridSpec, SweepSpec

DELOCALIZED_DELTAS = (1.5, 1.55, 1.6, 1.65, 1.7)
LOCALIZED_DELTAS = (2.03, 2.08, 2.13, 2.18, 2.23)
ECHO_SCAN_LENGTHS = (233, 377)
SIZES = (233, 377, 987)
COUPLINGS = (1e-1, 1e-2, 1e-3)
# delta/J axis of the ratio curves: 0.2, 0.25, ..., 3.0
R_CURVE_DELTAS = tuple(round(0.2 + 0.05 * k, 10) for k in range(57))


def delocalized_echoes(length: int = 233) -> list[LatticeConfig]:
    """Echoes below the transition, epsilon/J = 0.1."""
    return [LatticeConfig(length, potential_strength=d, impurity_coupling=0.1)
            for d in DELOCALIZED_DELTAS]


def localized_echoes(length: int = 233) -> list[LatticeConfig]:
    """Echoes just above the transition, epsilon/J = 0.1."""
    return [LatticeConfig(length, potential_strength=d, impurity_coupling=0.1)
            for d in LOCALIZED_DELTAS]


def size_scan(delta_over_j: float, epsilon_over_j: float = 1e-2) -> list[LatticeConfig]:
    """Same parameters at L = 233, 377, 987."""
    return [LatticeConfig(n, potential_strength=delta_over_j, impurity_coupling=epsilon_over_j)
            for n in SIZES]


def ratio_vs_size(grid: GridSpec | None = None) -> SweepSpec:
    return SweepSpec(R_CURVE_DELTAS, (0.1,), SIZES, grid=grid or GridSpec())


def ratio_vs_coupling(grid: GridSpec | None = None) -> SweepSpec:
    return SweepSpec(R_CURVE_DELTAS, COUPLINGS, (233,), grid=grid or GridSpec())


def ratio_vs_phase(seed: int = 0, count: int = 10, length: int = 233, epsilon: float = 0.1,
                   grid: GridSpec | None = None) -> SweepSpec:
    """Ratio curves for ``count`` random potential phases."""
    return SweepSpec(R_CURVE_DELTAS, (epsilon,), (length,), phase_count=count, seed=seed,
                     grid=grid or GridSpec())
