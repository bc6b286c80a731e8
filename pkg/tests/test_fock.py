"""Basis enumeration, ladder algebra, and field-operator checks.

DERIVED expectations are recomputed inside the test by an oracle that does
not share code with the implementation (itertools enumeration, dense
transposes, direct grid sums).
"""

import itertools
import math

import numpy as np
import pytest
import scipy.sparse as sp

from condlab import (
    BasisSizeError,
    EmptySectorError,
    FockBasis,
    HermitianOperator,
    ManyBodyState,
    ModeSet,
    annihilation_matrix,
    apply_annihilation,
    creation_matrix,
    field_operator,
    fock_basis,
    mode_correlations,
    number_operator,
    sector_dimension,
)


def brute_force_occupations(n, m):
    """Oracle: filter the full product space, keep tuples summing to n."""
    return sorted(t for t in itertools.product(range(n + 1), repeat=m) if sum(t) == n)


def random_state(basis, seed):
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=basis.size) + 1j * rng.normal(size=basis.size)
    return ManyBodyState(vec / np.linalg.norm(vec), basis)


class TestEnumeration:
    def test_two_particles_two_modes(self):
        basis = FockBasis(2, 2)
        assert basis.occupations == ((0, 2), (1, 1), (2, 0))
        assert basis.size == 3

    def test_vacuum_is_single_state(self):
        basis = FockBasis(0, 5)
        assert basis.occupations == ((0, 0, 0, 0, 0),)
        assert basis.size == 1

    def test_four_in_four_matches_brute_force(self):
        basis = FockBasis(4, 4)
        oracle = brute_force_occupations(4, 4)
        assert list(basis.occupations) == oracle
        assert basis.size == len(oracle) == math.comb(7, 3) == 35

    @pytest.mark.parametrize("n,m", [(3, 3), (5, 2), (2, 6)])
    def test_lexicographic_and_invertible(self, n, m):
        basis = FockBasis(n, m)
        occs = list(basis.occupations)
        assert occs == sorted(occs)
        assert len(set(occs)) == basis.size == sector_dimension(n, m)
        for i, occ in enumerate(occs):
            assert sum(occ) == n
            assert basis.index(occ) == i

    def test_cap_names_offending_sector(self):
        with pytest.raises(BasisSizeError, match=r"N=40, M=12"):
            FockBasis(40, 12, cap=1000)

    def test_json_round_trip(self):
        import json
        basis = FockBasis(2, 3)
        data = json.loads(basis.dumps())
        assert data["particle_count"] == 2
        assert tuple(map(tuple, data["occupations"])) == basis.occupations


class TestLadderOperators:
    def test_annihilation_on_condensate(self):
        basis = fock_basis(2, 2)
        state = ManyBodyState.from_occupation(basis, (2, 0))
        vec, lowered = apply_annihilation(state, 0)
        expected = math.sqrt(2) * lowered.unit_vector((1, 0))
        assert np.allclose(vec, expected, atol=1e-14)

    def test_annihilation_on_empty_mode_gives_zero(self):
        basis = fock_basis(2, 2)
        state = ManyBodyState.from_occupation(basis, (2, 0))
        vec, _ = apply_annihilation(state, 1)
        assert np.all(vec == 0)

    def test_zero_sector_raises(self):
        basis = fock_basis(0, 3)
        state = ManyBodyState.from_occupation(basis, (0, 0, 0))
        with pytest.raises(EmptySectorError):
            apply_annihilation(state, 0)

    def test_adjointness_against_dense_transpose(self):
        # oracle: the creation matrix must be the dense conjugate transpose
        basis = fock_basis(3, 3)
        lowered = fock_basis(2, 3)
        rng = np.random.default_rng(7)
        for k in range(3):
            a = annihilation_matrix(basis, lowered, k).toarray()
            c = creation_matrix(lowered, basis, k).toarray()
            assert np.abs(c - a.conj().T).max() < 1e-12
            u = rng.normal(size=lowered.size) + 1j * rng.normal(size=lowered.size)
            v = rng.normal(size=basis.size) + 1j * rng.normal(size=basis.size)
            lhs = np.vdot(u, a @ v)
            rhs = np.vdot(c @ u, v)
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    def test_image_norm_is_mode_occupation(self):
        basis = fock_basis(3, 2)
        state = random_state(basis, 11)
        for k in range(2):
            vec, _ = apply_annihilation(state, k)
            nk = number_operator(basis, k).expectation(state)
            assert abs(np.vdot(vec, vec) - nk) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_canonical_commutator_on_sector(self, n):
        # [a_k, a+_k'] = delta_kk' as maps N -> N
        m = 3
        basis = fock_basis(n, m)
        raised = fock_basis(n + 1, m)
        lowered = fock_basis(n - 1, m)
        for k in range(m):
            for kp in range(m):
                down_up = annihilation_matrix(raised, basis, k) @ creation_matrix(basis, raised, kp)
                up_down = creation_matrix(lowered, basis, kp) @ annihilation_matrix(basis, lowered, k)
                comm = (down_up - up_down).toarray()
                expected = np.eye(basis.size) if k == kp else np.zeros((basis.size, basis.size))
                assert np.abs(comm - expected).max() < 1e-12

    def test_total_number_acts_as_n_identity(self):
        basis = fock_basis(4, 3)
        lowered = fock_basis(3, 3)
        total = sum(
            (creation_matrix(lowered, basis, k) @ annihilation_matrix(basis, lowered, k)
             for k in range(3)),
            start=sp.csr_matrix((basis.size, basis.size), dtype=complex),
        )
        assert np.abs(total.toarray() - 4 * np.eye(basis.size)).max() < 1e-12


class TestHermitianOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_json_entries_are_pairs(self):
        op = HermitianOperator(np.array([[1.0, 1j], [-1j, 2.0]]))
        data = op.to_json_dict()
        assert data["dimension"] == 2
        assert [0, 1, [0.0, 1.0]] in data["entries"]


class TestModeSet:
    def test_orthonormality_on_grid(self):
        modes = ModeSet((0, 1, -1), volume=2.0, grid_size=16)
        b = modes.mode_functions
        gram = (b.conj() @ b.T) * modes.spacing
        assert np.abs(gram - np.eye(3)).max() < 1e-10

    def test_aliased_modes_rejected(self):
        with pytest.raises(ValueError):
            ModeSet((0, 8), volume=1.0, grid_size=8)  # 8 aliases to 0 on 8 points

    def test_single_mode_field_on_condensate(self):
        # psi(r)|N> = sqrt(N/V)|N-1> for the k=0 mode
        volume = 2.0
        modes = ModeSet((0,), volume=volume, grid_size=4)
        n = 3
        basis, lowered = fock_basis(n, 1), fock_basis(n - 1, 1)
        psi = field_operator(modes, 0, basis, lowered)
        image = psi @ basis.unit_vector((n,))
        expected = math.sqrt(n / volume) * lowered.unit_vector((n - 1,))
        assert np.abs(image - expected).max() < 1e-12

    def test_density_integrates_to_particle_number(self):
        # oracle: explicit grid sum of <psi+(r) psi(r)> dr
        modes = ModeSet((0, 1), volume=1.5, grid_size=12)
        basis, lowered = fock_basis(3, 2), fock_basis(2, 2)
        state = random_state(basis, 23)
        total = 0.0
        for g in range(modes.grid_size):
            psi = field_operator(modes, g, basis, lowered)
            image = psi @ state.amplitudes
            total += float(np.vdot(image, image).real) * modes.spacing
        assert abs(total - 3.0) < 1e-10

    def test_two_mode_density_uniform_for_one_one(self):
        # brute-force expectation on a 3-point grid: |1,1> over modes +-k
        modes = ModeSet((1, -1), volume=1.0, grid_size=3)
        basis, lowered = fock_basis(2, 2), fock_basis(1, 2)
        state = ManyBodyState.from_occupation(basis, (1, 1))
        densities = []
        for g in range(modes.grid_size):
            psi = field_operator(modes, g, basis, lowered)
            image = psi @ state.amplitudes
            densities.append(float(np.vdot(image, image).real))
        assert np.ptp(densities) < 1e-12
        assert abs(densities[0] - 2.0) < 1e-12  # N/V = 2

    def test_density_positivity_on_random_states(self):
        modes = ModeSet((0, 1, -1), volume=1.0, grid_size=9)
        basis, lowered = fock_basis(2, 3), fock_basis(1, 3)
        for seed in range(5):
            state = random_state(basis, seed)
            for g in range(modes.grid_size):
                psi = field_operator(modes, g, basis, lowered)
                image = psi @ state.amplitudes
                assert np.vdot(image, image).real >= -1e-12


class TestModeCorrelations:
    def test_trace_is_particle_number(self):
        basis = fock_basis(3, 3)
        state = random_state(basis, 3)
        rho = mode_correlations(state)
        assert abs(np.trace(rho).real - 3.0) < 1e-12

    def test_matches_dense_operator_oracle(self):
        # oracle: build a+_k' a_k as a dense sector operator by ladder rules
        basis = fock_basis(3, 2)
        state = random_state(basis, 5)
        rho = mode_correlations(state)
        for kp in range(2):
            for k in range(2):
                op = np.zeros((basis.size, basis.size), dtype=complex)
                for col, occ in enumerate(basis.occupations):
                    if occ[k] == 0:
                        continue
                    mid = list(occ)
                    amp = math.sqrt(mid[k]); mid[k] -= 1
                    amp *= math.sqrt(mid[kp] + 1); mid[kp] += 1
                    op[basis.index(tuple(mid)), col] = amp
                oracle = np.vdot(state.amplitudes, op @ state.amplitudes)
                assert abs(rho[kp, k] - oracle) < 1e-12


class TestManyBodyState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="normalized"):
            ManyBodyState(np.array([1.0, 1.0]))

    def test_amplitudes_frozen(self):
        state = ManyBodyState(np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0.0

    def test_phases_defined_where_nonzero(self):
        state = ManyBodyState(np.array([1j / math.sqrt(2), -1 / math.sqrt(2), 0.0]))
        phases = state.phases
        assert abs(phases[0] - math.pi / 2) < 1e-12
        assert abs(abs(phases[1]) - math.pi) < 1e-12
        assert phases[2] == 0.0
