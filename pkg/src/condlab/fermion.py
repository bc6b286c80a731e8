"""Small spinful fermion lattices for pairing-constraint checks.

The full Fock space of L <= 4 sites (dimension 4^L) is kept, because the
staggered pair operator moves between (N_up, N_dn) sectors.  Orbital
ordering is site-major, spin-minor: orbital p = 2*site + spin with spin
0 = up, 1 = down; the Jordan-Wigner sign counts occupied orbitals below p.

Hubbard chains are open by default; the staggered pair operator commutes
with the hopping only on bipartite lattices, which an odd ring is not.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import BasisSizeError
from .fock import HermitianOperator

MAX_SITES = 4
UP, DOWN = 0, 1


class FermionBasis:
    """All occupation bit patterns of 2L spin-orbitals, grouped by (N_up, N_dn)."""

    def __init__(self, site_count: int):
        if not 1 <= site_count <= MAX_SITES:
            raise BasisSizeError(f"site_count must be in [1, {MAX_SITES}], got {site_count}")
        self.site_count = site_count
        self.orbital_count = 2 * site_count
        self.size = 1 << self.orbital_count
        sectors: dict[tuple[int, int], list[int]] = {}
        for state in range(self.size):
            n_up = sum((state >> (2 * i)) & 1 for i in range(site_count))
            n_dn = sum((state >> (2 * i + 1)) & 1 for i in range(site_count))
            sectors.setdefault((n_up, n_dn), []).append(state)
        self.sectors = {key: tuple(v) for key, v in sectors.items()}

    def orbital(self, site: int, spin: int) -> int:
        if not 0 <= site < self.site_count:
            raise ValueError(f"site {site} out of range")
        if spin not in (UP, DOWN):
            raise ValueError("spin must be 0 (up) or 1 (down)")
        return 2 * site + spin

    def sector_labels(self, state: int) -> tuple[int, int]:
        n_up = sum((state >> (2 * i)) & 1 for i in range(self.site_count))
        n_dn = sum((state >> (2 * i + 1)) & 1 for i in range(self.site_count))
        return n_up, n_dn

    def __repr__(self):
        return f"FermionBasis(L={self.site_count}, dim={self.size})"


def creation_operator(basis: FermionBasis, site: int, spin: int) -> sp.csr_matrix:
    p = basis.orbital(site, spin)
    bit = 1 << p
    mask_below = bit - 1
    rows, cols, vals = [], [], []
    for state in range(basis.size):
        if state & bit:
            continue
        sign = -1.0 if bin(state & mask_below).count("1") % 2 else 1.0
        rows.append(state | bit)
        cols.append(state)
        vals.append(sign)
    return sp.csr_matrix((vals, (rows, cols)), shape=(basis.size, basis.size), dtype=complex)


def annihilation_operator(basis: FermionBasis, site: int, spin: int) -> sp.csr_matrix:
    return creation_operator(basis, site, spin).getH().tocsr()


def number_operator(basis: FermionBasis, site: int, spin: int) -> sp.csr_matrix:
    p = basis.orbital(site, spin)
    diag = np.array([(state >> p) & 1 for state in range(basis.size)], dtype=float)
    return sp.diags(diag, dtype=complex).tocsr()


def total_number_operator(basis: FermionBasis, spin: int | None = None) -> HermitianOperator:
    """N_up, N_dn, or the full particle number as a diagonal operator."""
    spins = (UP, DOWN) if spin is None else (spin,)
    total = sp.csr_matrix((basis.size, basis.size), dtype=complex)
    for i in range(basis.site_count):
        for s in spins:
            total = total + number_operator(basis, i, s)
    return HermitianOperator(total)


def build_fermion_hubbard(site_count: int, hopping: float, interaction: float,
                          chemical_potential: float = 0.0,
                          periodic: bool = False) -> HermitianOperator:
    """Hubbard chain H = -t sum c+ c + U sum n_up n_dn - mu N on the full Fock space.

    Open chain by default; ``periodic`` adds the wrap-around bond for L >= 3.
    """
    basis = FermionBasis(site_count)
    h = sp.csr_matrix((basis.size, basis.size), dtype=complex)
    bonds = [(i, i + 1) for i in range(site_count - 1)]
    if periodic and site_count >= 3:
        bonds.append((site_count - 1, 0))
    for i, j in bonds:
        for s in (UP, DOWN):
            hop = creation_operator(basis, i, s) @ annihilation_operator(basis, j, s)
            h = h - hopping * (hop + hop.getH())
    for i in range(site_count):
        h = h + interaction * (number_operator(basis, i, UP) @ number_operator(basis, i, DOWN))
        h = h - chemical_potential * (number_operator(basis, i, UP) + number_operator(basis, i, DOWN))
    return HermitianOperator(h)


def eta_pairing_operator(basis: FermionBasis, dagger: bool = True) -> sp.csr_matrix:
    """Staggered on-site pair operator sum_i (-1)^i c+_iup c+_idn (or its adjoint).

    With the open-chain Hubbard Hamiltonian above, the dagger=True operator
    obeys [H, eta] = (U - 2 mu) eta.
    """
    out = sp.csr_matrix((basis.size, basis.size), dtype=complex)
    for i in range(basis.site_count):
        pair = creation_operator(basis, i, UP) @ creation_operator(basis, i, DOWN)
        out = out + ((-1.0) ** i) * pair
    return (out if dagger else out.getH()).tocsr()
