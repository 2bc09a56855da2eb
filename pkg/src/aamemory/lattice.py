"""Single-particle Aubry-André lattice with an optional impurity potential."""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

Boundary = Literal["periodic", "open"]


def _is_fibonacci(n: int) -> bool:
    # n is Fibonacci iff 5n^2 +/- 4 is a perfect square
    for k in (5 * n * n + 4, 5 * n * n - 4):
        r = math.isqrt(k)
        if r * r == k:
            return True
    return False


@dataclass(frozen=True)
class LatticeConfig:
    """Physical parameters of the lattice, impurity included.

    Energies are in absolute units; ``hopping`` sets the scale. Site labels run
    over ``-(L-1)/2 ... (L-1)/2`` for odd ``length`` (see :class:`SiteIndexMap`
    for even lengths). ``phase`` is stored canonicalized to ``[0, 2*pi)``.
    """

    length: int
    hopping: float = 1.0
    potential_strength: float = 0.0
    incommensuration: float = GOLDEN_RATIO
    phase: float = 0.0
    impurity_coupling: float = 0.0
    impurity_site: int = 1
    boundary: Boundary = "periodic"

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 3:
            raise ValueError(f"length must be an integer >= 3, got {self.length!r}")
        if not self.hopping > 0:
            raise ValueError(f"hopping must be positive, got {self.hopping!r}")
        if self.potential_strength < 0:
            raise ValueError("potential_strength must be >= 0")
        if not self.incommensuration > 0:
            raise ValueError("incommensuration must be > 0")
        if self.impurity_coupling < 0:
            raise ValueError("impurity_coupling must be >= 0")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        if not math.isfinite(self.phase):
            raise ValueError("phase must be finite")
        object.__setattr__(self, "length", int(self.length))
        object.__setattr__(self, "phase", canonical_phase(self.phase))
        sites = SiteIndexMap(self.length)
        if not sites.contains(self.impurity_site):
            raise ValueError(
                f"impurity_site {self.impurity_site} outside label range "
                f"[{sites.first}, {sites.last}]"
            )
        if self.boundary == "periodic" and not _is_fibonacci(self.length):
            warnings.warn(
                f"L={self.length} is not a Fibonacci number; the quasi-periodic "
                "potential is mismatched across the periodic seam",
                stacklevel=3,
            )

    @property
    def sites(self) -> SiteIndexMap:
        return SiteIndexMap(self.length)

    def replace(self, **changes) -> LatticeConfig:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def canonical_phase(phi: float) -> float:
    """Map an angle onto ``[0, 2*pi)``."""
    two_pi = 2.0 * math.pi
    phi = math.fmod(float(phi), two_pi)
    if phi < 0:
        phi += two_pi
    # fmod of a value just below a multiple of 2*pi can round up to 2*pi
    if phi >= two_pi:
        phi = 0.0
    return phi


@dataclass(frozen=True)
class SiteIndexMap:
    """Bijection between physical site labels and matrix rows.

    Labels run from ``first = -((L - 1) // 2)`` upward, so for odd ``L`` the
    range is symmetric about zero.
    """

    length: int

    @property
    def first(self) -> int:
        return -((self.length - 1) // 2)

    @property
    def last(self) -> int:
        return self.first + self.length - 1

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.first, self.last + 1)

    def contains(self, label: int) -> bool:
        return self.first <= label <= self.last

    def row(self, label: int) -> int:
        if not self.contains(label):
            raise IndexError(f"site label {label} out of range")
        return label - self.first

    def label(self, row: int) -> int:
        if not 0 <= row < self.length:
            raise IndexError(f"row {row} out of range")
        return row + self.first


@dataclass(frozen=True, eq=False)
class SingleParticleHamiltonian:
    matrix: np.ndarray
    config: LatticeConfig
    with_impurity: bool


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and column eigenvectors of a real symmetric matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def onsite_potential(config: LatticeConfig) -> np.ndarray:
    """Quasi-periodic on-site energies ``Delta * cos(2 pi beta i + phi)`` per row."""
    labels = config.sites.labels
    return config.potential_strength * np.cos(
        2.0 * np.pi * config.incommensuration * labels + config.phase
    )


def build_hamiltonian(config: LatticeConfig, with_impurity: bool) -> SingleParticleHamiltonian:
    """Dense single-particle Hamiltonian ``h_g`` (without impurity) or ``h_e`` (with)."""
    n = config.length
    h = np.zeros((n, n))
    idx = np.arange(n - 1)
    h[idx, idx + 1] = -config.hopping
    h[idx + 1, idx] = -config.hopping
    if config.boundary == "periodic":
        h[0, n - 1] = -config.hopping
        h[n - 1, 0] = -config.hopping
    h[np.diag_indices(n)] = onsite_potential(config)
    if with_impurity:
        x = config.sites.row(config.impurity_site)
        h[x, x] += config.impurity_coupling
    h.setflags(write=False)
    return SingleParticleHamiltonian(h, config, bool(with_impurity))


def diagonalize(h: SingleParticleHamiltonian | np.ndarray) -> SpectralDecomposition:
    """Symmetric eigendecomposition; raises ``numpy.linalg.LinAlgError`` on failure."""
    matrix = h.matrix if isinstance(h, SingleParticleHamiltonian) else np.asarray(h)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.array_equal(matrix, matrix.T):
        raise ValueError("matrix is not exactly symmetric")
    try:
        w, v = scipy.linalg.eigh(matrix, check_finite=True)
    except scipy.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"symmetric eigensolver failed: {exc}") from exc
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def cdw_occupied_sites(config: LatticeConfig) -> list[int]:
    """Rows of the charge-density-wave state: every site with an odd label."""
    labels = config.sites.labels
    return [int(r) for r in np.flatnonzero(labels % 2 != 0)]
