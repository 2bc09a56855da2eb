"""Dephasing of an impurity in a charge-density-wave Fermi gas on an Aubry-André lattice.

The environment is a non-interacting Fermi gas, so the impurity coherence
``chi(t)`` reduces to a single-particle determinant. The memory of the
induced dynamics is quantified by the backflow/outflow ratio of ``|chi(t)|``.
"""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    GOLDEN_RATIO,
    LatticeConfig,
    SingleParticleHamiltonian,
    SiteIndexMap,
    SpectralDecomposition,
    build_hamiltonian,
    cdw_occupied_sites,
    diagonalize,
)
from .dynamics import (  # noqa: E402
    DecoherenceSeries,
    EchoPropagator,
    QubitState,
    RAMSEY_STATE,
    TimeGrid,
    apply_dephasing_map,
    decoherence_series,
    default_grid,
    evolution_block,
    trace_distance_qubit,
)
from .oracle import many_body_oracle  # noqa: E402
from .memory import (  # noqa: E402
    BackflowReport,
    MonotoneSegments,
    backflow_report,
    refine_until_stable,
    segment_monotone,
)
from .sweep import (  # noqa: E402
    GridSpec,
    RunRecord,
    SweepSpec,
    draw_phases,
    emit_echo_series,
    emit_phase_scan,
    emit_r_curve,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
