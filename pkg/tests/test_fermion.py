"""Fermion lattice checks against an independent kron-product oracle."""

import numpy as np
import pytest
import scipy.sparse as sp

from condlab.errors import BasisSizeError
from condlab.fermion import (
    DOWN,
    UP,
    FermionBasis,
    annihilation_operator,
    build_fermion_hubbard,
    creation_operator,
    eta_pairing_operator,
    number_operator,
    total_number_operator,
)


def kron_chain_operator(n_orbitals, target, kind):
    """Oracle: c or c+ built as F x ... x F x op x I x ... x I (orbital 0 fastest).

    Our bit convention has orbital p toggling bit p with sign from lower bits,
    i.e. state index = sum_p n_p 2^p.  With kron(A, B) acting on index
    i_A * dim_B + i_B, the LAST factor corresponds to the lowest bits.
    """
    cdag = np.array([[0.0, 0.0], [1.0, 0.0]])
    c = cdag.T
    eye = np.eye(2)
    flip = np.diag([1.0, -1.0])
    op = cdag if kind == "create" else c
    mat = np.array([[1.0]])
    for p in reversed(range(n_orbitals)):  # high bits first
        if p > target:
            factor = eye
        elif p == target:
            factor = op
        else:
            factor = flip
        mat = np.kron(mat, factor)
    return mat


class TestOperators:
    @pytest.mark.parametrize("site,spin", [(0, UP), (0, DOWN), (1, UP), (1, DOWN)])
    def test_creation_matches_kron_oracle(self, site, spin):
        basis = FermionBasis(2)
        mine = creation_operator(basis, site, spin).toarray().real
        oracle = kron_chain_operator(4, 2 * site + spin, "create")
        assert np.abs(mine - oracle).max() < 1e-14

    def test_anticommutators(self):
        basis = FermionBasis(2)
        ops = [(i, s) for i in range(2) for s in (UP, DOWN)]
        eye = np.eye(basis.size)
        for a in ops:
            for b in ops:
                c_a = annihilation_operator(basis, *a).toarray()
                cd_b = creation_operator(basis, *b).toarray()
                anti = c_a @ cd_b + cd_b @ c_a
                expected = eye if a == b else 0.0 * eye
                assert np.abs(anti - expected).max() < 1e-13
                c_b = annihilation_operator(basis, *b).toarray()
                assert np.abs(c_a @ c_b + c_b @ c_a).max() < 1e-13

    def test_sectors_disjoint_and_complete(self):
        basis = FermionBasis(3)
        seen = []
        for states in basis.sectors.values():
            seen.extend(states)
        assert sorted(seen) == list(range(basis.size))

    def test_site_cap(self):
        with pytest.raises(BasisSizeError):
            FermionBasis(5)


class TestHubbard:
    def test_single_site_spectrum(self):
        # sectors |0>, |up>, |dn>, |updn> -> energies 0, 0, 0, U at mu=0
        h = build_fermion_hubbard(1, hopping=0.0, interaction=4.0, chemical_potential=0.0)
        evals = np.linalg.eigvalsh(h.dense())
        assert np.allclose(sorted(evals), [0.0, 0.0, 0.0, 4.0], atol=1e-12)

    def test_two_site_half_filling_ground_energy(self):
        # oracle: open 2-site chain at U=0 has single-particle levels -t, +t;
        # the half-filled ground state doubly occupies the bonding level: -2t.
        t = 1.0
        h = build_fermion_hubbard(2, hopping=t, interaction=0.0)
        basis = FermionBasis(2)
        idx = list(basis.sectors[(1, 1)])
        block = h.dense()[np.ix_(idx, idx)]
        ground = np.linalg.eigvalsh(block)[0]
        assert abs(ground - (-2.0 * t)) < 1e-12

    def test_two_site_oracle_spectrum_matches_kron_build(self):
        # independent construction of the same Hamiltonian from kron operators
        t, u, mu = 0.7, 2.3, 0.4
        h = build_fermion_hubbard(2, t, u, mu).dense()
        ops = {}
        for site in range(2):
            for spin in (UP, DOWN):
                p = 2 * site + spin
                ops[(site, spin, "+")] = kron_chain_operator(4, p, "create")
                ops[(site, spin, "-")] = kron_chain_operator(4, p, "annihilate")
        oracle = np.zeros((16, 16))
        for spin in (UP, DOWN):
            hop = ops[(0, spin, "+")] @ ops[(1, spin, "-")]
            oracle += -t * (hop + hop.T)
        for site in range(2):
            n_up = ops[(site, UP, "+")] @ ops[(site, UP, "-")]
            n_dn = ops[(site, DOWN, "+")] @ ops[(site, DOWN, "-")]
            oracle += u * (n_up @ n_dn) - mu * (n_up + n_dn)
        assert np.abs(h - oracle).max() < 1e-12

    def test_number_conservation_exact(self):
        h = build_fermion_hubbard(3, 1.0, 4.0, 0.5)
        for spin in (UP, DOWN):
            n_op = total_number_operator(FermionBasis(3), spin)
            comm = h.matrix @ n_op.matrix - n_op.matrix @ h.matrix
            assert abs(comm).max() == 0.0


class TestEtaPairing:
    @pytest.mark.parametrize("sites", [2, 3])
    def test_commutator_identity_open_chain(self, sites):
        t, u, mu = 1.0, 3.0, 0.5
        basis = FermionBasis(sites)
        h = build_fermion_hubbard(sites, t, u, mu)
        eta = eta_pairing_operator(basis, dagger=True)
        lhs = (h.matrix @ eta - eta @ h.matrix).toarray()
        rhs = (u - 2 * mu) * eta.toarray()
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_annihilator_flips_sign(self):
        basis = FermionBasis(2)
        h = build_fermion_hubbard(2, 1.0, 3.0, 0.5)
        eta = eta_pairing_operator(basis, dagger=False)
        lhs = (h.matrix @ eta - eta @ h.matrix).toarray()
        rhs = -(3.0 - 2 * 0.5) * eta.toarray()
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_periodic_odd_ring_breaks_identity(self):
        # documents why the default is the open chain
        basis = FermionBasis(3)
        h = build_fermion_hubbard(3, 1.0, 3.0, 0.5, periodic=True)
        eta = eta_pairing_operator(basis, dagger=True)
        lhs = (h.matrix @ eta - eta @ h.matrix).toarray()
        rhs = (3.0 - 1.0) * eta.toarray()
        assert np.abs(lhs - rhs).max() > 0.1
