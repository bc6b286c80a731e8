"""Spin lattices, symmetry-breaking classification, and unitary dynamics.

The Hamiltonian convention is one term per unordered bond,

    H = sum_{i<j} J_ij [ Sz_i Sz_j + (S+_i S-_j + S-_i S+_j) / 2 ],

i.e. J_ij S_i . S_j, so the 2-site S=1/2 ferromagnet at J=-1 has its
triplet at energy -1/4.  hbar = 1 internally; formulas carry hbar
explicitly where it appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg

from .errors import BasisSizeError
from .fock import HermitianOperator, ManyBodyState, commutator_norm

MAX_SITES = 14
_DENSE_LIMIT = 4096


class SSBVerdict(str, Enum):
    TYPE1 = "TYPE1"
    TYPE2 = "TYPE2"
    NO_SYMMETRY = "NO_SYMMETRY"


def spin_matrices(spin: float):
    """Dense (Sz, S+, S-) for one site, basis ordered m = S .. -S."""
    dim = int(round(2 * spin + 1))
    if abs(2 * spin + 1 - dim) > 1e-12 or dim < 2:
        raise ValueError(f"unsupported spin magnitude {spin}")
    m = spin - np.arange(dim)
    sz = np.diag(m)
    lowering = np.sqrt(spin * (spin + 1) - m[:-1] * (m[:-1] - 1))
    sm = np.diag(lowering, -1)
    return sz, sm.T.copy(), sm


def site_operator(site_count: int, local_dim: int, site: int, local: np.ndarray) -> sp.csr_matrix:
    """Embed a single-site operator into the n-site product space."""
    op = sp.identity(1, format="csr", dtype=complex)
    for i in range(site_count):
        factor = sp.csr_matrix(local, dtype=complex) if i == site else sp.identity(local_dim, format="csr", dtype=complex)
        op = sp.kron(op, factor, format="csr")
    return op


class ProductBasis:
    """Marker basis for the n-site spin product space (size only)."""

    def __init__(self, site_count: int, local_dim: int):
        self.site_count = site_count
        self.local_dim = local_dim
        self.size = local_dim ** site_count

    def __repr__(self):
        return f"ProductBasis(n={self.site_count}, d={self.local_dim})"


@dataclass(frozen=True)
class SpinLattice:
    """Sites, spin magnitude, symmetric coupling table, optional sublattices."""

    site_count: int
    spin: float
    couplings: np.ndarray
    sublattice: tuple | None = None

    def __post_init__(self):
        if not 1 <= self.site_count <= MAX_SITES:
            raise BasisSizeError(f"site_count must be in [1, {MAX_SITES}]")
        j = np.asarray(self.couplings, dtype=float)
        if j.shape != (self.site_count, self.site_count):
            raise ValueError("couplings must be an n x n table")
        if np.abs(j - j.T).max() > 1e-12:
            raise ValueError("couplings must be symmetric")
        object.__setattr__(self, "couplings", j)
        if self.sublattice is not None:
            labels = tuple(int(x) for x in self.sublattice)
            if len(labels) != self.site_count or any(x not in (0, 1) for x in labels):
                raise ValueError("sublattice labels must be one 0/1 entry per site")
            object.__setattr__(self, "sublattice", labels)

    @property
    def local_dim(self) -> int:
        return int(round(2 * self.spin + 1))

    @property
    def dimension(self) -> int:
        return self.local_dim ** self.site_count

    def basis(self) -> ProductBasis:
        return ProductBasis(self.site_count, self.local_dim)

    def bonds(self):
        for i in range(self.site_count):
            for j in range(i + 1, self.site_count):
                if self.couplings[i, j] != 0.0:
                    yield i, j, self.couplings[i, j]

    def sublattice_two_colors_bonds(self) -> bool:
        if self.sublattice is None:
            return False
        return all(self.sublattice[i] != self.sublattice[j] for i, j, _ in self.bonds())

    @classmethod
    def chain(cls, site_count: int, coupling: float, spin: float = 0.5,
              periodic: bool = False) -> "SpinLattice":
        j = np.zeros((site_count, site_count))
        for i in range(site_count - 1):
            j[i, i + 1] = j[i + 1, i] = coupling
        if periodic and site_count > 2:
            j[site_count - 1, 0] = j[0, site_count - 1] = coupling
        return cls(site_count, spin, j, tuple(i % 2 for i in range(site_count)))

    @classmethod
    def from_json_dict(cls, data: dict) -> "SpinLattice":
        n = int(data["sites"])
        spin = float(data.get("S", 0.5))
        j = np.zeros((n, n))
        for i, k, val in data.get("couplings", []):
            j[int(i), int(k)] = j[int(k), int(i)] = float(val)
        sub = data.get("sublattice")
        return cls(n, spin, j, tuple(int(x) for x in sub) if sub is not None else None)


def build_heisenberg(lattice: SpinLattice, cap: int = 2 ** MAX_SITES) -> HermitianOperator:
    """Isotropic Heisenberg Hamiltonian on the coupling graph.

    Commutation with total Sz is verified at build time.
    """
    if lattice.dimension > cap:
        raise BasisSizeError(f"product space dimension {lattice.dimension} over cap {cap}")
    sz, s_plus, s_minus = spin_matrices(lattice.spin)
    n, d = lattice.site_count, lattice.local_dim
    h = sp.csr_matrix((lattice.dimension, lattice.dimension), dtype=complex)
    for i, j, coupling in lattice.bonds():
        szi = site_operator(n, d, i, sz)
        szj = site_operator(n, d, j, sz)
        spi = site_operator(n, d, i, s_plus)
        smj = site_operator(n, d, j, s_minus)
        smi = site_operator(n, d, i, s_minus)
        spj = site_operator(n, d, j, s_plus)
        h = h + coupling * (szi @ szj + 0.5 * (spi @ smj + smi @ spj))
    op = HermitianOperator(h)
    r = total_sz(lattice)
    if commutator_norm(op, r) > 1e-12 * max(1.0, op.frobenius_norm() * r.frobenius_norm()):
        raise AssertionError("built Hamiltonian does not commute with total Sz")
    return op


class ObservableKind(str, Enum):
    TOTAL_SZ = "TOTAL_SZ"
    STAGGERED_SZ = "STAGGERED_SZ"
    CUSTOM = "CUSTOM"


def total_sz(lattice: SpinLattice) -> HermitianOperator:
    sz, _, _ = spin_matrices(lattice.spin)
    n, d = lattice.site_count, lattice.local_dim
    total = sum((site_operator(n, d, i, sz) for i in range(n)),
                start=sp.csr_matrix((lattice.dimension, lattice.dimension), dtype=complex))
    return HermitianOperator(total)


def staggered_sz(lattice: SpinLattice) -> HermitianOperator:
    if lattice.sublattice is None:
        raise ValueError("staggered observable needs sublattice labels")
    if not lattice.sublattice_two_colors_bonds():
        raise ValueError("sublattice labels do not two-color the coupling graph")
    sz, _, _ = spin_matrices(lattice.spin)
    n, d = lattice.site_count, lattice.local_dim
    total = sp.csr_matrix((lattice.dimension, lattice.dimension), dtype=complex)
    for i in range(n):
        sign = 1.0 if lattice.sublattice[i] == 0 else -1.0
        total = total + sign * site_operator(n, d, i, sz)
    return HermitianOperator(total)


def build_relevant_observable(lattice: SpinLattice, kind: ObservableKind | str,
                              custom_diagonal=None) -> HermitianOperator:
    """Observable defining the physical situation; diagonal in the product Sz basis."""
    kind = ObservableKind(kind)
    if kind is ObservableKind.TOTAL_SZ:
        return total_sz(lattice)
    if kind is ObservableKind.STAGGERED_SZ:
        return staggered_sz(lattice)
    if custom_diagonal is None:
        raise ValueError("CUSTOM kind requires a diagonal")
    diag = np.asarray(custom_diagonal, dtype=float)
    if diag.shape != (lattice.dimension,):
        raise ValueError("custom diagonal has the wrong length")
    return HermitianOperator(sp.diags(diag, dtype=complex))


@dataclass
class SSBClassification:
    commutator_norm: float
    verdict: SSBVerdict
    ground_degeneracy: int
    near_degeneracy_spread: float | None
    ground_energy: float
    tol_commutator: float
    tol_degeneracy: float
    distinct_r_values: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "commutator_norm": self.commutator_norm,
            "verdict": self.verdict.value,
            "ground_degeneracy": self.ground_degeneracy,
            "near_degeneracy_spread": self.near_degeneracy_spread,
            "ground_energy": self.ground_energy,
            "tol_commutator": self.tol_commutator,
            "tol_degeneracy": self.tol_degeneracy,
            "distinct_r_values": self.distinct_r_values,
        }


def _eigh_of(op: HermitianOperator):
    if op.dimension <= _DENSE_LIMIT:
        return np.linalg.eigh(op.dense())
    k = min(op.dimension - 2, 64)
    evals, evecs = sp.linalg.eigsh(op.matrix, k=k, which="SA")
    order = np.argsort(evals)
    return evals[order], evecs[:, order]


def classify_ssb(h: HermitianOperator, r: HermitianOperator,
                 tol_commutator: float | None = None,
                 tol_degeneracy: float | None = None) -> SSBClassification:
    """Classify the symmetry-breaking channel of (H, R).

    TYPE1: [H, R] = 0 (within tolerance) and the ground level of H hosts at
    least two joint eigenstates with distinct R eigenvalues.  TYPE2: H and R
    do not commute; the near-degeneracy spread of the minimal-energy
    R eigenstate is reported.  NO_SYMMETRY: commuting with a unique ground
    state.  Both tolerances default to relative values since the paper-level
    notions ("commutes", "near-degenerate") carry no quantitative boundary.
    """
    if h.dimension != r.dimension:
        raise ValueError(f"dimension mismatch: {h.dimension} vs {r.dimension}")
    norm_comm = commutator_norm(h, r)
    if tol_commutator is None:
        tol_commutator = 1e-10 * max(1e-300, h.frobenius_norm() * r.frobenius_norm())
    evals, evecs = _eigh_of(h)
    spectral_range = float(evals[-1] - evals[0])
    if tol_degeneracy is None:
        tol_degeneracy = 1e-9 * max(1.0, spectral_range)
    ground_energy = float(evals[0])
    ground_sel = evals - evals[0] <= tol_degeneracy
    ground_vecs = evecs[:, ground_sel]

    if norm_comm < tol_commutator:
        # joint eigenbasis exists; diagonalize R restricted to the ground level
        projected = ground_vecs.conj().T @ (r.matrix @ ground_vecs)
        r_evals = np.linalg.eigvalsh(0.5 * (projected + projected.conj().T))
        r_scale = max(1.0, float(np.abs(r_evals).max()) if r_evals.size else 1.0)
        distinct = 1
        for a, b in zip(r_evals[:-1], r_evals[1:]):
            if b - a > 1e-9 * r_scale:
                distinct += 1
        raw = int(np.count_nonzero(ground_sel))
        verdict = SSBVerdict.TYPE1 if raw >= 2 else SSBVerdict.NO_SYMMETRY
        return SSBClassification(norm_comm, verdict, raw, None, ground_energy,
                                 tol_commutator, tol_degeneracy, distinct)

    spread = None
    if h.dimension <= _DENSE_LIMIT:
        spread = _near_degeneracy_spread(h, r, evals, evecs)
    raw_degeneracy = int(np.count_nonzero(ground_sel))
    return SSBClassification(norm_comm, SSBVerdict.TYPE2, raw_degeneracy, spread,
                             ground_energy, tol_commutator, tol_degeneracy)


def _near_degeneracy_spread(h, r, h_evals, h_evecs, weight_floor: float = 0.01) -> float:
    """Energy width of the H levels carrying >= 1% of the physical ground state.

    The physical ground state is the R eigenstate with the least energy
    expectation.
    """
    r_evals, r_evecs = np.linalg.eigh(r.dense())
    h_dense = h.matrix
    energies = np.real(np.einsum("ij,ij->j", r_evecs.conj(), h_dense @ r_evecs))
    candidate = r_evecs[:, int(np.argmin(energies))]
    weights = np.abs(h_evecs.conj().T @ candidate) ** 2
    carried = h_evals[weights >= weight_floor]
    if carried.size == 0:
        return 0.0
    return float(carried.max() - carried.min())


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------

def evolve(state: ManyBodyState, h: HermitianOperator, t: float,
           hbar: float = 1.0) -> ManyBodyState:
    """Propagate amplitudes with the spectral propagator exp(-iHt/hbar)."""
    if state.dimension != h.dimension:
        raise ValueError("state and Hamiltonian live on different bases")
    evals, evecs = np.linalg.eigh(h.dense())
    coeff = evecs.conj().T @ state.amplitudes
    coeff = coeff * np.exp(-1j * evals * t / hbar)
    return ManyBodyState(evecs @ coeff, state.basis, norm_tol=1e-9)


@dataclass(frozen=True)
class UnitaryMixing:
    """Unitary change of basis between H eigenstates and R eigenstates."""

    matrix: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("mixing matrix must be square")
        if np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() > 1e-12:
            raise ValueError("mixing matrix is not unitary")
        u.flags.writeable = False
        object.__setattr__(self, "matrix", u)

    @classmethod
    def symmetric_two_state(cls) -> "UnitaryMixing":
        return cls(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0))


def two_state_oscillation(e1: float, e2: float, mixing: UnitaryMixing, t: float,
                          hbar: float = 1.0) -> float:
    """Probability |<2|Psi(t)>|^2 for a system prepared in the first R eigenstate.

    Rows of the mixing matrix expand R eigenstates over H eigenstates with
    energies (e1, e2); for the symmetric mixing this is exactly
    sin^2[(e1 - e2) t / (2 hbar)].
    """
    u = mixing.matrix
    if u.shape != (2, 2):
        raise ValueError("two-state oscillation needs a 2x2 mixing")
    phases = np.exp(-1j * np.array([e1, e2]) * t / hbar)
    amplitude = np.sum(u[1].conj() * u[0] * phases)
    return float(np.abs(amplitude) ** 2)


@dataclass
class TrappingReport:
    times: np.ndarray
    probabilities: np.ndarray
    spectral_spread: float
    initial_r_eigenvalue: float

    def to_json_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "probabilities": self.probabilities.tolist(),
            "spectral_spread": self.spectral_spread,
            "initial_r_eigenvalue": self.initial_r_eigenvalue,
        }


def trapping_probability(h: HermitianOperator, r: HermitianOperator,
                         initial_index: int, times, hbar: float = 1.0,
                         weight_floor: float = 0.01) -> TrappingReport:
    """Survival probability of the initial_index-th R eigenstate under H.

    Reported together with the width of the H spectrum carrying >= 1% of the
    initial state: the survival stays near 1 on timescales ~ hbar / spread.
    """
    if h.dimension != r.dimension:
        raise ValueError("dimension mismatch")
    r_evals, r_evecs = np.linalg.eigh(r.dense())
    initial = r_evecs[:, initial_index]
    h_evals, h_evecs = np.linalg.eigh(h.dense())
    coeff = h_evecs.conj().T @ initial
    weights = np.abs(coeff) ** 2
    carried = h_evals[weights >= weight_floor]
    spread = float(carried.max() - carried.min()) if carried.size else 0.0
    times = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(-1j * np.outer(times, h_evals) / hbar)
    survival = np.abs(phases @ (np.abs(coeff) ** 2)) ** 2
    return TrappingReport(times, survival, spread, float(r_evals[initial_index]))
