"""Brute-force many-body reference for the decoherence function.

Builds the fixed-particle-number block of the second-quantized Hamiltonians
in the occupation-number basis and propagates the initial Fock state exactly.
Only intended for small lattices.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .dynamics import DecoherenceSeries, TimeGrid, default_grid
from .lattice import LatticeConfig, build_hamiltonian, cdw_occupied_sites

MAX_ORACLE_SITES = 14


def fock_basis(n_sites: int, n_particles: int) -> list[int]:
    """Bitmasks of all occupations with ``n_particles`` set bits, ascending."""
    states = [sum(1 << i for i in occ) for occ in combinations(range(n_sites), n_particles)]
    return sorted(states)


def _hop_sign(state: int, i: int, j: int) -> int:
    # a_i^dag a_j on |state>: sign from the occupied modes strictly between i and j
    lo, hi = min(i, j), max(i, j)
    mask = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    return -1 if bin(state & mask).count("1") % 2 else 1


def many_body_matrix(h: np.ndarray, basis: list[int]) -> np.ndarray:
    """Matrix of ``sum_ij h_ij a_i^dag a_j`` restricted to ``basis``."""
    h = np.asarray(h)
    n = h.shape[0]
    index = {s: k for k, s in enumerate(basis)}
    big = np.zeros((len(basis), len(basis)), dtype=h.dtype)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and h[i, j] != 0]
    for col, s in enumerate(basis):
        big[col, col] = sum(h[i, i] for i in range(n) if s >> i & 1)
        for i, j in pairs:
            if s >> j & 1 and not s >> i & 1:
                t = s ^ (1 << j) ^ (1 << i)
                big[index[t], col] += _hop_sign(s, i, j) * h[i, j]
    return big


def many_body_oracle(config: LatticeConfig, grid: TimeGrid | None = None, *,
                     occupied=None) -> DecoherenceSeries:
    """``<Phi| exp(-i H_e t) exp(i H_g t) |Phi>`` by exact many-body propagation.

    ``occupied`` lists the rows filled in the product state ``|Phi>``; it
    defaults to the charge-density-wave rows.
    """
    if config.length > MAX_ORACLE_SITES:
        raise ValueError(f"oracle limited to L <= {MAX_ORACLE_SITES}, got {config.length}")
    if grid is None:
        grid = default_grid(config)
    rows = cdw_occupied_sites(config) if occupied is None else list(occupied)
    if not rows:
        raise ValueError("occupied set is empty")
    basis = fock_basis(config.length, len(rows))
    phi = np.zeros(len(basis))
    phi[basis.index(sum(1 << r for r in rows))] = 1.0

    hg = many_body_matrix(build_hamiltonian(config, False).matrix, basis)
    he = many_body_matrix(build_hamiltonian(config, True).matrix, basis)
    eg, wg = np.linalg.eigh(hg)
    ee, we = np.linalg.eigh(he)
    cg = wg.T @ phi
    ce = we.T @ phi

    t = grid.samples
    # exp(i H t)|Phi> for both Hamiltonians; chi is their inner product
    psi_g = (np.exp(1j * np.outer(t, eg)) * cg) @ wg.T
    psi_e = (np.exp(1j * np.outer(t, ee)) * ce) @ we.T
    chi = np.einsum("ki,ki->k", psi_e.conj(), psi_g)
    return DecoherenceSeries(grid, chi, config)
