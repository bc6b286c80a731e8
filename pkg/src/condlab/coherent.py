"""Superpositions over fixed-N sectors and their expectation identities.

A CoherentEnsemble is a truncated number-sector superposition
sum_N f_N |Psi_N> with Poisson-law weights |f_N|^2 renormalized over the
window and one sector state per N built from a shared recipe.  For
number-conserving operators the expectation splits exactly into
sum_N |f_N|^2 <Psi_N|O_N|Psi_N> (no cross terms); the blocked and naive
direct-sum evaluations are both provided so the bookkeeping can be
regression-tested.  The field expectation <psi(r)> couples adjacent sectors
only, every term carrying a product of two sector-state amplitudes, and is
compared against the macroscopic wavefunction it does not equal.

Constraint checks: when [H, A] = gamma_B B + gamma_C C holds as a matrix
identity, every eigenstate of H gives gamma_B <B> + gamma_C <C> = 0; with a
single operator on the right-hand side its expectation must vanish.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ContractViolationError, EmptySectorError
from .fock import (
    FockBasis,
    HermitianOperator,
    ManyBodyState,
    ModeSet,
    annihilation_matrix,
    field_operator,
    fock_basis,
)

DEFAULT_WINDOW_SIGMAS = 6.0
MIN_WINDOW_SIGMAS = 5.0


def poisson_window(mean_n: float, sigmas: float = DEFAULT_WINDOW_SIGMAS) -> tuple[int, int]:
    half = sigmas * math.sqrt(mean_n)
    return max(0, math.floor(mean_n - half)), math.ceil(mean_n + half)


def poisson_weights(mean_n: float, n_min: int, n_max: int) -> np.ndarray:
    """|f_N|^2 = Poisson(mean_n) renormalized over [n_min, n_max]."""
    ns = np.arange(n_min, n_max + 1)
    log_w = -mean_n + ns * math.log(mean_n) - np.array([math.lgamma(n + 1) for n in ns])
    log_w -= log_w.max()
    w = np.exp(log_w)
    return w / w.sum()


class CoherentEnsemble:
    """Truncated fixed-N sector superposition with Poisson weights."""

    def __init__(self, mean_n: float, weights: np.ndarray, n_values: np.ndarray,
                 states: tuple[ManyBodyState, ...], recipe_info: dict | None = None):
        weights = np.asarray(weights, dtype=complex)
        if abs(float(np.sum(np.abs(weights) ** 2)) - 1.0) > 1e-12:
            raise ValueError("sector weights must normalize to 1")
        if len(weights) != len(n_values) or len(weights) != len(states):
            raise ValueError("weights, sectors, and states must align")
        mode_counts = {s.basis.mode_count for s in states}
        if len(mode_counts) != 1:
            raise ValueError("all sector states must share the mode count")
        self.mean_n = float(mean_n)
        self.weights = weights
        self.n_values = np.asarray(n_values, dtype=int)
        self.states = tuple(states)
        self.mode_count = mode_counts.pop()
        self.recipe_info = dict(recipe_info or {})
        sizes = [s.basis.size for s in states]
        self.sector_offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.total_dimension = int(self.sector_offsets[-1])

    @property
    def sector_count(self) -> int:
        return len(self.n_values)

    def weight_mean(self) -> float:
        return float(np.sum(np.abs(self.weights) ** 2 * self.n_values))

    def weight_std(self) -> float:
        mean = self.weight_mean()
        var = float(np.sum(np.abs(self.weights) ** 2 * (self.n_values - mean) ** 2))
        return math.sqrt(var)

    def sector_slice(self, position: int) -> slice:
        return slice(int(self.sector_offsets[position]), int(self.sector_offsets[position + 1]))

    def direct_sum_vector(self) -> np.ndarray:
        """The naive full-space vector sum_N f_N Psi_N."""
        out = np.zeros(self.total_dimension, dtype=complex)
        for i, (f, state) in enumerate(zip(self.weights, self.states)):
            out[self.sector_slice(i)] = f * state.amplitudes
        return out

    def to_json_dict(self) -> dict:
        return {
            "mean_n": self.mean_n,
            "window": [int(self.n_values[0]), int(self.n_values[-1])],
            "recipe": self.recipe_info,
            "weight_std": self.weight_std(),
        }


def build_coherent_ensemble(mean_n: float, recipe, window: tuple[int, int] | None = None,
                            sector_phases=None) -> CoherentEnsemble:
    """Assemble the ensemble from a sector recipe (callable N -> ManyBodyState).

    The default window is mean_n +- 6 sqrt(mean_n) clipped at zero (about
    1e-8 tail mass); passing ``window`` explicitly overrides the +-5 sigma
    coverage requirement.  Weights are real and positive unless a per-sector
    phase schedule is supplied.
    """
    if mean_n <= 0:
        raise ValueError("mean particle number must be positive")
    if window is None:
        n_min, n_max = poisson_window(mean_n)
    else:
        n_min, n_max = int(window[0]), int(window[1])
        if n_min < 0 or n_max < n_min:
            raise ValueError(f"bad window [{n_min}, {n_max}]")
    ns = np.arange(n_min, n_max + 1)
    weights = np.sqrt(poisson_weights(mean_n, n_min, n_max)).astype(complex)
    if sector_phases is not None:
        phases = np.asarray(sector_phases, dtype=float)
        if phases.shape != ns.shape:
            raise ValueError("phase schedule must give one phase per sector")
        weights = weights * np.exp(1j * phases)
    states = []
    for n in ns:
        try:
            state = recipe(int(n))
        except Exception as exc:
            raise ValueError(f"recipe failed for sector N={n}: {exc}") from exc
        if not isinstance(state, ManyBodyState) or not isinstance(state.basis, FockBasis):
            raise ValueError(f"recipe must yield a Fock-sector state for N={n}")
        if state.basis.particle_count != n:
            raise ValueError(f"recipe returned a {state.basis.particle_count}-particle "
                             f"state for sector N={n}")
        states.append(state)
    info = getattr(recipe, "info", None)
    return CoherentEnsemble(mean_n, weights, ns, tuple(states), info)


# ---------------------------------------------------------------------------
# number-conserving expectations (blocked and naive)
# ---------------------------------------------------------------------------

def _sector_blocks(ensemble: CoherentEnsemble, op) -> list:
    """Resolve an operator family: callable N -> matrix, or a full matrix."""
    if callable(op):
        return [op(int(n)) for n in ensemble.n_values]
    full = sp.csr_matrix(op, dtype=complex)
    if full.shape != (ensemble.total_dimension, ensemble.total_dimension):
        raise ValueError("full-space operator has the wrong dimension")
    blocks = []
    dense = full.toarray()
    scale = max(1.0, float(np.abs(dense).max()))
    for i in range(ensemble.sector_count):
        si = ensemble.sector_slice(i)
        for j in range(ensemble.sector_count):
            if i == j:
                continue
            off = dense[si, ensemble.sector_slice(j)]
            if np.abs(off).max() > 1e-12 * scale:
                raise ContractViolationError(
                    f"operator couples sectors N={ensemble.n_values[i]} and "
                    f"N={ensemble.n_values[j]}; it does not conserve particle number")
        blocks.append(dense[si, si])
    return blocks


def expectation_number_conserving(ensemble: CoherentEnsemble, op) -> complex:
    """sum_N |f_N|^2 <Psi_N|O_N|Psi_N> for a block-diagonal operator family."""
    blocks = _sector_blocks(ensemble, op)
    total = 0.0 + 0.0j
    for f, state, block in zip(ensemble.weights, ensemble.states, blocks):
        vec = state.amplitudes
        total += (abs(f) ** 2) * complex(np.vdot(vec, sp.csr_matrix(block) @ vec))
    return total


def naive_full_space_expectation(ensemble: CoherentEnsemble, op) -> complex:
    """<Psi_c| O |Psi_c> on the direct-sum space, no sector shortcuts."""
    blocks = _sector_blocks(ensemble, op)
    full = sp.block_diag([sp.csr_matrix(b) for b in blocks], format="csr")
    vec = ensemble.direct_sum_vector()
    return complex(np.vdot(vec, full @ vec))


@dataclass
class EquivalenceReport:
    coherent_side: complex
    sector_side: complex
    equal: bool
    gap: float

    def to_json_dict(self) -> dict:
        return {
            "coherent_side": [self.coherent_side.real, self.coherent_side.imag],
            "sector_side": [self.sector_side.real, self.sector_side.imag],
            "equal": self.equal,
            "gap": self.gap,
        }


def csa_odlro_equivalence(ensemble: CoherentEnsemble, op,
                          tol: float = 1e-12) -> EquivalenceReport:
    """Blocked sector sum vs naive direct-sum evaluation of the same operator."""
    sector_side = expectation_number_conserving(ensemble, op)
    coherent_side = naive_full_space_expectation(ensemble, op)
    gap = abs(coherent_side - sector_side)
    return EquivalenceReport(coherent_side, sector_side, gap <= tol, gap)


def field_pair_family(modes: ModeSet, r_prime_index: int, r_index: int):
    """Family N -> psi+(r') psi(r) on the N-sector (zero on the vacuum)."""
    def build(n):
        basis = fock_basis(n, modes.mode_count)
        if n == 0:
            return np.zeros((1, 1), dtype=complex)
        lowered = fock_basis(n - 1, modes.mode_count)
        from .fock import field_operator
        left = field_operator(modes, r_prime_index, basis, lowered)
        right = field_operator(modes, r_index, basis, lowered)
        return (left.getH() @ right).toarray()
    return build


# ---------------------------------------------------------------------------
# field expectation across adjacent sectors
# ---------------------------------------------------------------------------

def _adjacent_overlaps(ensemble: CoherentEnsemble) -> np.ndarray:
    """s[i, k] = <Psi_{N_i - 1}| a_k |Psi_{N_i}> for consecutive sectors."""
    count, m = ensemble.sector_count, ensemble.mode_count
    out = np.zeros((count, m), dtype=complex)
    for i in range(1, count):
        if ensemble.n_values[i] != ensemble.n_values[i - 1] + 1:
            continue
        upper = ensemble.states[i]
        lower = ensemble.states[i - 1]
        basis = upper.basis
        lowered = lower.basis
        for k in range(m):
            image = annihilation_matrix(basis, lowered, k) @ upper.amplitudes
            out[i, k] = np.vdot(lower.amplitudes, image)
    return out


def expectation_field(ensemble: CoherentEnsemble, modes: ModeSet,
                      grid_index: int | None = None):
    """<psi(r)> = sum_N f*_{N-1} f_N <Psi_{N-1}|psi(r)|Psi_N>.

    Exactly zero (with a warning) for a single-sector window: psi changes N,
    and within one sector there is nothing for it to couple to.  Returns the
    full grid profile when ``grid_index`` is None.
    """
    if modes.mode_count != ensemble.mode_count:
        raise ValueError("mode set does not match the ensemble")
    if ensemble.sector_count < 2:
        warnings.warn("single-sector ensemble: <psi> vanishes identically")
        if grid_index is None:
            return np.zeros(modes.grid_size, dtype=complex)
        return 0.0 + 0.0j
    overlaps = _adjacent_overlaps(ensemble)
    pair_factors = ensemble.weights.copy()
    pair_factors[1:] = np.conj(ensemble.weights[:-1]) * ensemble.weights[1:]
    pair_factors[0] = 0.0
    mode_sums = np.einsum("i,ik->k", pair_factors, overlaps)
    profile = np.einsum("k,kg->g", mode_sums, modes.mode_functions)
    if grid_index is None:
        return profile
    return complex(profile[grid_index])


def ensemble_macroscopic_wavefunction(ensemble: CoherentEnsemble, modes: ModeSet) -> np.ndarray:
    """W(r) = sqrt(<N>) Phi_1 b_k0(r) using the sector nearest the mean."""
    nearest = int(np.argmin(np.abs(ensemble.n_values - ensemble.mean_n)))
    state = ensemble.states[nearest]
    n = int(ensemble.n_values[nearest])
    if n == 0:
        raise EmptySectorError("mean sector is the vacuum; no wavefunction")
    condensed = tuple(n if k == modes.condensed_index else 0
                      for k in range(ensemble.mode_count))
    phi1 = state.amplitude(condensed)
    return math.sqrt(ensemble.mean_n) * phi1 * modes.mode_functions[modes.condensed_index]


@dataclass
class FieldComparisonReport:
    """|<psi(r)>| against |W(r)|: the two magnitudes differ whenever |Phi_1| < 1."""

    field_magnitude: float
    wavefunction_magnitude: float
    gap: float

    def to_json_dict(self) -> dict:
        return {
            "field_magnitude": self.field_magnitude,
            "wavefunction_magnitude": self.wavefunction_magnitude,
            "gap": self.gap,
        }


def compare_field_to_wavefunction(ensemble: CoherentEnsemble, modes: ModeSet) -> FieldComparisonReport:
    field = expectation_field(ensemble, modes)
    w = ensemble_macroscopic_wavefunction(ensemble, modes)
    field_mag = float(np.abs(field).max())
    w_mag = float(np.abs(w).max())
    return FieldComparisonReport(field_mag, w_mag, abs(field_mag - w_mag))


# ---------------------------------------------------------------------------
# commutator constraints on eigenstate expectations
# ---------------------------------------------------------------------------

@dataclass
class ConstraintReport:
    gamma_b: complex
    gamma_c: complex
    identity_residual: float
    energies: np.ndarray
    lhs_expectations: np.ndarray   # <[H, A]> per eigenstate
    rhs_combinations: np.ndarray   # gamma_B <B> + gamma_C <C> per eigenstate
    b_expectations: np.ndarray
    c_expectations: np.ndarray

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.lhs_expectations - self.rhs_combinations)

    def max_rhs_magnitude(self) -> float:
        return float(np.abs(self.rhs_combinations).max())

    def to_json_dict(self) -> dict:
        rows = [
            {
                "energy": float(e),
                "lhs": [lhs.real, lhs.imag],
                "rhs": [rhs.real, rhs.imag],
                "b_expectation": [b.real, b.imag],
                "c_expectation": [c.real, c.imag],
            }
            for e, lhs, rhs, b, c in zip(
                self.energies, self.lhs_expectations, self.rhs_combinations,
                self.b_expectations, self.c_expectations)
        ]
        return {
            "gamma_b": [self.gamma_b.real, self.gamma_b.imag],
            "gamma_c": [self.gamma_c.real, self.gamma_c.imag],
            "identity_residual": self.identity_residual,
            "max_rhs_magnitude": self.max_rhs_magnitude(),
            "eigenstates": rows,
        }


def commutator_constraint_check(h: HermitianOperator, a, b, c=None,
                                gamma_b: complex = 0.0, gamma_c: complex = 0.0,
                                tol: float = 1e-10) -> ConstraintReport:
    """Verify [H, A] = gamma_B B + gamma_C C, then test it on every eigenstate.

    The matrix identity is checked first; a failure is a caller error (wrong
    operators or constants) and raises with the residual norm.  For each
    eigenstate of H the left side vanishes identically, forcing the linear
    combination of expectations on the right to vanish too; with gamma_C = 0
    and gamma_B != 0 that pins <B> = 0.
    """
    h_mat = h.matrix
    a_mat = sp.csr_matrix(a, dtype=complex)
    b_mat = sp.csr_matrix(b, dtype=complex)
    c_mat = sp.csr_matrix(c, dtype=complex) if c is not None else sp.csr_matrix(b_mat.shape, dtype=complex)
    comm = (h_mat @ a_mat - a_mat @ h_mat).tocsr()
    target = (gamma_b * b_mat + gamma_c * c_mat).tocsr()
    residual = comm - target
    residual_norm = float(sp.linalg.norm(residual, "fro")) if residual.nnz else 0.0
    scale = max(1.0, float(sp.linalg.norm(comm, "fro")) if comm.nnz else 0.0,
                float(sp.linalg.norm(target, "fro")) if target.nnz else 0.0)
    if residual_norm > tol * scale:
        raise ContractViolationError(
            f"[H, A] != gamma_B B + gamma_C C: residual Frobenius norm {residual_norm:.3e}")
    evals, evecs = np.linalg.eigh(h.dense())
    comm_dense = comm.toarray()
    b_dense = b_mat.toarray()
    c_dense = c_mat.toarray()
    lhs = np.einsum("ij,ji->i", evecs.conj().T, comm_dense @ evecs)
    b_exp = np.einsum("ij,ji->i", evecs.conj().T, b_dense @ evecs)
    c_exp = np.einsum("ij,ji->i", evecs.conj().T, c_dense @ evecs)
    rhs = gamma_b * b_exp + gamma_c * c_exp
    return ConstraintReport(complex(gamma_b), complex(gamma_c), residual_norm,
                            evals, lhs, rhs, b_exp, c_exp)
