"""Impurity decoherence function from the single-particle determinant formula.

For a Slater-determinant environment with occupied orbitals ``P`` (an ``L x M``
matrix with orthonormal columns) the decoherence function is

    chi(t) = det(P^H U(t) P),   U(t) = exp(-i h_e t) exp(i h_g t),

which equals ``det(1 - r + r U(t))`` with ``r = P P^H``. Both single-particle
Hamiltonians are diagonalized once; every time sample then costs two
``L x L x M`` products and one ``M x M`` LU factorization.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    LatticeConfig,
    SpectralDecomposition,
    build_hamiltonian,
    cdw_occupied_sites,
    diagonalize,
)

# characteristic horizon in units of 1/epsilon used by default_grid
DEFAULT_HORIZON = 20.0
DEFAULT_SAMPLES = 2001
DEFAULT_T_MAX = 50.0

# complex scratch budget per evaluated chunk of time samples
_CHUNK_BYTES = 64 * 2**20


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_k = k * t_max / (n_samples - 1)``, in units of 1/J."""

    t_max: float = DEFAULT_T_MAX
    n_samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ValueError(f"t_max must be positive and finite, got {self.t_max!r}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ValueError(f"n_samples must be an integer >= 2, got {self.n_samples!r}")
        object.__setattr__(self, "t_max", float(self.t_max))
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @property
    def samples(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_samples)

    @property
    def spacing(self) -> float:
        return self.t_max / (self.n_samples - 1)

    def refined(self) -> TimeGrid:
        """Same horizon, half the spacing; the current samples are a subset."""
        return TimeGrid(self.t_max, 2 * (self.n_samples - 1) + 1)


def default_grid(config: LatticeConfig, n_samples: int = DEFAULT_SAMPLES,
                 horizon: float = DEFAULT_HORIZON) -> TimeGrid:
    """Time grid whose horizon follows the impurity time scale ``1/epsilon``.

    The echo changes on times of order ``hbar / epsilon``, so a fixed horizon
    either misses the dynamics at weak coupling or wastes samples at strong
    coupling. The horizon is ``horizon * J / epsilon`` in units of 1/J
    and never shorter than ``DEFAULT_T_MAX``; at ``epsilon = 0`` it is exactly
    ``DEFAULT_T_MAX``.
    """
    eps = config.impurity_coupling / config.hopping
    t_max = DEFAULT_T_MAX if eps == 0 else max(DEFAULT_T_MAX, horizon / eps)
    return TimeGrid(t_max / config.hopping, n_samples)


@dataclass(frozen=True, eq=False)
class DecoherenceSeries:
    """Sampled ``chi(t)``; ``log_magnitude`` stays finite when ``|chi|`` underflows."""

    grid: TimeGrid
    chi: np.ndarray
    config: LatticeConfig | None = None
    log_magnitude: np.ndarray | None = None
    magnitude: np.ndarray = field(init=False)

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=complex)
        if chi.shape != (self.grid.n_samples,):
            raise ValueError("chi must hold one value per time sample")
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "magnitude", np.abs(chi))
        if self.log_magnitude is None:
            with np.errstate(divide="ignore"):
                object.__setattr__(self, "log_magnitude", np.log(self.magnitude))

    @property
    def times(self) -> np.ndarray:
        return self.grid.samples

    def __len__(self):
        return self.grid.n_samples


class EchoPropagator:
    """Precomputed spectral data for evaluating ``det(P^H U(t) P)`` at many times.

    ``orbitals`` is an ``L x M`` matrix with orthonormal columns; the cross-basis
    product ``V_e^T V_g`` and the orbital projections are formed once here.
    """

    def __init__(self, spec_e: SpectralDecomposition, spec_g: SpectralDecomposition,
                 orbitals: np.ndarray):
        orbitals = np.asarray(orbitals)
        if orbitals.ndim != 2:
            raise ValueError("orbitals must be a 2-d array")
        n = spec_e.size
        if spec_g.size != n or orbitals.shape[0] != n:
            raise ValueError(
                f"dimension mismatch: h_e {n}, h_g {spec_g.size}, orbitals {orbitals.shape}"
            )
        if orbitals.shape[1] == 0:
            raise ValueError("no occupied orbitals")
        self.size = n
        self.n_particles = orbitals.shape[1]
        self.energies_e = spec_e.eigenvalues
        self.energies_g = spec_g.eigenvalues
        self.overlap = spec_e.eigenvectors.T @ spec_g.eigenvectors
        # P^H V_e  (M x L) and V_g^T P  (L x M)
        self.left = orbitals.conj().T @ spec_e.eigenvectors
        self.right = spec_g.eigenvectors.T @ orbitals

    @classmethod
    def from_rows(cls, spec_e, spec_g, rows) -> EchoPropagator:
        """Propagator for site-localized orbitals (a product state of occupied rows)."""
        rows = np.asarray(rows, dtype=int)
        if rows.size == 0:
            raise ValueError("occupied set is empty")
        if np.any(rows < 0) or np.any(rows >= spec_e.size):
            raise ValueError("occupied row out of range")
        if np.unique(rows).size != rows.size:
            raise ValueError("occupied rows must be distinct")
        orbitals = np.zeros((spec_e.size, rows.size))
        orbitals[rows, np.arange(rows.size)] = 1.0
        return cls(spec_e, spec_g, orbitals)

    def blocks(self, times: np.ndarray) -> np.ndarray:
        """Stack of ``P^H U(t) P`` for each entry of ``times``; shape ``(T, M, M)``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        phase_g = np.exp(1j * np.outer(times, self.energies_g))
        phase_e = np.exp(-1j * np.outer(times, self.energies_e))
        inner = _times(self.overlap, phase_g[:, :, None] * self.right)
        return _times(self.left, phase_e[:, :, None] * inner)

    def chunk_size(self) -> int:
        per_sample = 16 * self.size * self.n_particles * 3
        return max(1, min(256, _CHUNK_BYTES // per_sample))

    def evaluate(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(chi, log|chi|)`` at ``times``.

        The determinant is taken from an LU factorization with the diagonal
        product accumulated as log-magnitude plus phase, so deep decay does not
        underflow the log column.
        """
        sign, logabs = np.linalg.slogdet(self.blocks(times))
        with np.errstate(under="ignore"):
            chi = sign * np.exp(logabs)
        return chi, logabs


def _times(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a @ b`` for a stack ``b`` of complex matrices.

    A real ``a`` acts on the interleaved real/imaginary parts of ``b`` in one
    real product, half the work of promoting ``a`` to complex.
    """
    if np.iscomplexobj(a):
        return a @ b
    b = np.ascontiguousarray(b, dtype=complex)
    return (a @ b.view(np.float64)).view(complex)


def full_evolution(spec_e: SpectralDecomposition, spec_g: SpectralDecomposition,
                   t: float) -> np.ndarray:
    """Full ``L x L`` single-particle ``exp(-i h_e t) exp(i h_g t)``."""
    ve, vg = spec_e.eigenvectors, spec_g.eigenvectors
    ue = (ve * np.exp(-1j * spec_e.eigenvalues * t)) @ ve.T
    ug = (vg * np.exp(1j * spec_g.eigenvalues * t)) @ vg.T
    return ue @ ug


def evolution_block(spec_e: SpectralDecomposition, spec_g: SpectralDecomposition,
                    occ, t: float) -> np.ndarray:
    """Rows and columns ``occ`` of ``exp(-i h_e t) exp(i h_g t)``."""
    return EchoPropagator.from_rows(spec_e, spec_g, occ).blocks([t])[0]


def levitov_determinant(projector: np.ndarray, evolution: np.ndarray) -> complex:
    """``det(1 - r + r U)`` evaluated directly at full single-particle dimension."""
    r = np.asarray(projector)
    n = r.shape[0]
    return complex(np.linalg.det(np.eye(n) - r + r @ evolution))


def cdw_projector(config: LatticeConfig) -> np.ndarray:
    """Diagonal occupation projector of the charge-density-wave state."""
    r = np.zeros((config.length, config.length))
    occ = cdw_occupied_sites(config)
    r[occ, occ] = 1.0
    return r


def spectral_pair(config: LatticeConfig) -> tuple[SpectralDecomposition, SpectralDecomposition]:
    """``(spec_e, spec_g)`` for the Hamiltonians with and without the impurity."""
    spec_g = diagonalize(build_hamiltonian(config, with_impurity=False))
    spec_e = diagonalize(build_hamiltonian(config, with_impurity=True))
    return spec_e, spec_g


def decoherence_series(config: LatticeConfig, grid: TimeGrid | None = None, *,
                       occupied=None, orbitals=None, workers: int = 1) -> DecoherenceSeries:
    """Decoherence function of the impurity on a uniform time grid.

    Parameters
    ----------
    config : LatticeConfig
    grid : TimeGrid, optional
        Defaults to :func:`default_grid`.
    occupied : sequence of int, optional
        Occupied rows of a product (site-localized) initial state. Defaults to
        the charge-density-wave rows.
    orbitals : ndarray, optional
        ``L x M`` orthonormal occupied orbitals of a general Slater determinant.
        Mutually exclusive with ``occupied``.
    workers : int
        Threads used to evaluate chunks of time samples. The result does not
        depend on this value.
    """
    if grid is None:
        grid = default_grid(config)
    if occupied is not None and orbitals is not None:
        raise ValueError("pass either occupied or orbitals, not both")
    spec_e, spec_g = spectral_pair(config)
    if orbitals is not None:
        orbitals = np.asarray(orbitals)
        gram = orbitals.conj().T @ orbitals
        if not np.allclose(gram, np.eye(gram.shape[0]), atol=1e-10):
            raise ValueError("orbitals are not orthonormal")
        prop = EchoPropagator(spec_e, spec_g, orbitals)
    else:
        rows = cdw_occupied_sites(config) if occupied is None else occupied
        prop = EchoPropagator.from_rows(spec_e, spec_g, rows)

    if config.impurity_coupling == 0:
        # h_e == h_g, so U(t) is the identity; skip the rounding noise of the
        # spectral route, which would otherwise show up as spurious flows
        n = grid.n_samples
        return DecoherenceSeries(grid, np.ones(n, dtype=complex), config, np.zeros(n))

    times = grid.samples
    step = prop.chunk_size()
    chunks = [times[i:i + step] for i in range(0, times.size, step)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(prop.evaluate, chunks))
    else:
        parts = [prop.evaluate(c) for c in chunks]
    chi = np.concatenate([p[0] for p in parts])
    logabs = np.concatenate([p[1] for p in parts])
    return DecoherenceSeries(grid, chi, config, logabs)


@dataclass(frozen=True, eq=False)
class QubitState:
    """Two-level density matrix in the basis ``(|g>, |e>)``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("qubit state must be 2 x 2")
        if not np.allclose(m, m.conj().T, atol=1e-12):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > 1e-12:
            raise ValueError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(m).min() < -1e-12:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def pure(cls, amp_g: complex, amp_e: complex) -> QubitState:
        psi = np.array([amp_g, amp_e], dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @property
    def rho_gg(self):
        return self.matrix[0, 0]

    @property
    def rho_ge(self):
        return self.matrix[0, 1]

    @property
    def rho_eg(self):
        return self.matrix[1, 0]

    @property
    def rho_ee(self):
        return self.matrix[1, 1]


RAMSEY_STATE = QubitState.pure(1, 1)


def apply_dephasing_map(rho0: QubitState, chi_t: complex) -> QubitState:
    """Pure dephasing: populations fixed, ``rho_eg -> chi rho_eg``."""
    if abs(chi_t) > 1 + 1e-9:
        raise ValueError(f"|chi| = {abs(chi_t)} exceeds 1")
    m = rho0.matrix.copy()
    m[1, 0] = chi_t * rho0.rho_eg
    m[0, 1] = np.conj(chi_t) * rho0.rho_ge
    return QubitState(m)


def trace_distance_qubit(a: QubitState, b: QubitState) -> float:
    """Half the trace norm of ``a - b``."""
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix)).sum())
