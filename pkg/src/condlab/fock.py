"""Bosonic occupation-number bases, ladder operators, and discretized fields.

Conventions fixed here and relied on everywhere else:

* basis tuples are enumerated in ascending lexicographic order, so indices
  are reproducible across runs;
* mode functions are stored unit-normalized on the grid,
  ``sum_r |b_k(r)|^2 dr = 1``, and the field operator is
  ``psi(r) = sum_k b_k(r) a_k`` with no extra volume prefactor.  A fully
  condensed N-particle state then has uniform density N/V.

Everything is immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import BasisSizeError, EmptySectorError

DEFAULT_BASIS_CAP = 10**6


def sector_dimension(particle_count: int, mode_count: int) -> int:
    """Number of ways to put N identical bosons into M modes."""
    return math.comb(particle_count + mode_count - 1, mode_count - 1)


def _compositions(total, parts):
    # ascending first component, recursively -> ascending lexicographic order
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


class FockBasis:
    """Enumerated basis of ``particle_count`` bosons in ``mode_count`` modes."""

    def __init__(self, particle_count: int, mode_count: int, cap: int = DEFAULT_BASIS_CAP):
        if mode_count < 1:
            raise ValueError(f"mode_count must be >= 1, got {mode_count}")
        if particle_count < 0:
            raise ValueError(f"particle_count must be >= 0, got {particle_count}")
        size = sector_dimension(particle_count, mode_count)
        if size > cap:
            raise BasisSizeError(
                f"sector N={particle_count}, M={mode_count} has {size} states, "
                f"over the cap {cap}"
            )
        self.particle_count = particle_count
        self.mode_count = mode_count
        self.occupations = tuple(_compositions(particle_count, mode_count))
        self._index = {occ: i for i, occ in enumerate(self.occupations)}
        self.size = size

    def index(self, occupation) -> int:
        """Basis index of an occupation tuple."""
        key = tuple(int(n) for n in occupation)
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"{key} is not a state of this (N={self.particle_count}, "
                             f"M={self.mode_count}) basis") from None

    def unit_vector(self, occupation) -> np.ndarray:
        vec = np.zeros(self.size, dtype=complex)
        vec[self.index(occupation)] = 1.0
        return vec

    def to_json_dict(self) -> dict:
        return {
            "particle_count": self.particle_count,
            "mode_count": self.mode_count,
            "occupations": [list(occ) for occ in self.occupations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def __len__(self):
        return self.size

    def __repr__(self):
        return (f"FockBasis(N={self.particle_count}, M={self.mode_count}, "
                f"size={self.size})")


@lru_cache(maxsize=None)
def fock_basis(particle_count: int, mode_count: int, cap: int = DEFAULT_BASIS_CAP) -> FockBasis:
    """Cached basis factory; bases are immutable so sharing is safe."""
    return FockBasis(particle_count, mode_count, cap)


class ManyBodyState:
    """Normalized complex amplitude vector over a basis.

    ``basis`` is any object exposing ``size`` (a FockBasis, a spin product
    basis, ...) or None for a bare vector.  Amplitudes are copied and frozen.
    """

    def __init__(self, amplitudes, basis=None, norm_tol: float = 1e-12):
        amp = np.array(amplitudes, dtype=complex)
        if amp.ndim != 1:
            raise ValueError("amplitudes must be a 1-d vector")
        if basis is not None and amp.shape[0] != basis.size:
            raise ValueError(f"amplitude length {amp.shape[0]} does not match "
                             f"basis size {basis.size}")
        norm_sq = float(np.sum(np.abs(amp) ** 2))
        if abs(norm_sq - 1.0) > norm_tol:
            raise ValueError(f"state not normalized: sum|amp|^2 = {norm_sq!r}")
        amp.flags.writeable = False
        self.amplitudes = amp
        self.basis = basis

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def phases(self) -> np.ndarray:
        """arg(amplitude) where the amplitude is nonzero, 0.0 elsewhere."""
        out = np.angle(self.amplitudes)
        out[np.abs(self.amplitudes) == 0.0] = 0.0
        return out

    def amplitude(self, occupation) -> complex:
        if self.basis is None:
            raise ValueError("state has no attached basis")
        return complex(self.amplitudes[self.basis.index(occupation)])

    def overlap(self, other: "ManyBodyState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    @classmethod
    def from_occupation(cls, basis: FockBasis, occupation, phase: float = 0.0):
        vec = basis.unit_vector(occupation) * np.exp(1j * phase)
        return cls(vec, basis)

    def __repr__(self):
        return f"ManyBodyState(dim={self.dimension}, basis={self.basis!r})"


class HermitianOperator:
    """Sparse complex Hermitian matrix, validated at construction."""

    def __init__(self, matrix, tol: float = 1e-12):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got {m.shape}")
        dev = m - m.getH()
        dev_max = np.abs(dev.data).max() if dev.nnz else 0.0
        scale = max(1.0, np.abs(m.data).max() if m.nnz else 0.0)
        if dev_max > tol * scale:
            raise ValueError(f"matrix is not Hermitian: max deviation {dev_max:.3e}")
        self.matrix = m
        self.dimension = m.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, state) -> complex:
        vec = state.amplitudes if isinstance(state, ManyBodyState) else np.asarray(state)
        return complex(np.vdot(vec, self.matrix @ vec))

    def frobenius_norm(self) -> float:
        return float(sp.linalg.norm(self.matrix, "fro"))

    def to_json_dict(self) -> dict:
        coo = self.matrix.tocoo()
        entries = sorted(
            ([int(i), int(j), [float(v.real), float(v.imag)]]
             for i, j, v in zip(coo.row, coo.col, coo.data)),
            key=lambda e: (e[0], e[1]),
        )
        return {"dimension": self.dimension, "entries": entries}

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dimension}, nnz={self.matrix.nnz})"


def commutator(a: HermitianOperator, b: HermitianOperator) -> sp.csr_matrix:
    return (a.matrix @ b.matrix - b.matrix @ a.matrix).tocsr()


def commutator_norm(a: HermitianOperator, b: HermitianOperator) -> float:
    """Frobenius norm of [A, B]."""
    return float(sp.linalg.norm(commutator(a, b), "fro"))


# ---------------------------------------------------------------------------
# ladder operators
# ---------------------------------------------------------------------------

def annihilation_matrix(basis: FockBasis, lowered: FockBasis, mode: int) -> sp.csr_matrix:
    """Matrix of a_mode from the N-sector to the (N-1)-sector.

    a_k |..n_k..> = sqrt(n_k) |..n_k-1..>
    """
    if lowered.particle_count != basis.particle_count - 1:
        raise ValueError("target basis must hold one particle fewer")
    if lowered.mode_count != basis.mode_count:
        raise ValueError(f"mode counts differ: {basis.mode_count} vs {lowered.mode_count}")
    if not 0 <= mode < basis.mode_count:
        raise ValueError(f"mode {mode} out of range [0, {basis.mode_count})")
    rows, cols, vals = [], [], []
    for col, occ in enumerate(basis.occupations):
        n = occ[mode]
        if n == 0:
            continue
        target = occ[:mode] + (n - 1,) + occ[mode + 1:]
        rows.append(lowered.index(target))
        cols.append(col)
        vals.append(math.sqrt(n))
    return sp.csr_matrix((vals, (rows, cols)), shape=(lowered.size, basis.size), dtype=complex)


def creation_matrix(basis: FockBasis, raised: FockBasis, mode: int) -> sp.csr_matrix:
    """Matrix of a+_mode from the N-sector to the (N+1)-sector (adjoint of a)."""
    return annihilation_matrix(raised, basis, mode).getH().tocsr()


def apply_annihilation(state: ManyBodyState, mode: int):
    """Apply a_mode to a Fock-sector state.

    Returns the un-normalized image vector together with its (N-1)-sector
    basis; the squared norm of the image equals <state| n_mode |state>.
    """
    basis = state.basis
    if not isinstance(basis, FockBasis):
        raise ValueError("state must live on a FockBasis")
    if basis.particle_count < 1:
        raise EmptySectorError("cannot annihilate on the zero-particle sector")
    lowered = fock_basis(basis.particle_count - 1, basis.mode_count)
    vec = annihilation_matrix(basis, lowered, mode) @ state.amplitudes
    return vec, lowered


def mode_correlations(state: ManyBodyState) -> np.ndarray:
    """One-body correlation matrix rho[k', k] = <a+_k' a_k>.

    Hermitian and positive semidefinite by construction (Gram matrix of the
    annihilated images); trace equals the particle number.
    """
    basis = state.basis
    if not isinstance(basis, FockBasis):
        raise ValueError("state must live on a FockBasis")
    if basis.particle_count == 0:
        raise EmptySectorError("one-body correlations need at least one particle")
    lowered = fock_basis(basis.particle_count - 1, basis.mode_count)
    images = np.stack([
        annihilation_matrix(basis, lowered, k) @ state.amplitudes
        for k in range(basis.mode_count)
    ])
    rho = images.conj() @ images.T
    return 0.5 * (rho + rho.conj().T)


# ---------------------------------------------------------------------------
# plane-wave modes on a periodic grid
# ---------------------------------------------------------------------------

class ModeSet:
    """Plane waves e^{ikr}/sqrt(V) tabulated on a uniform 1-d periodic grid.

    ``mode_numbers`` are integers n; the wavenumbers are k = 2 pi n / V.
    Discrete orthonormality sum_r b*_k b_k' dr = delta_kk' is validated at
    construction (exact for integer mode numbers distinct modulo the grid
    size).
    """

    def __init__(self, mode_numbers, volume: float = 1.0, grid_size: int = 64,
                 condensed_index: int = 0, tol: float = 1e-10):
        numbers = tuple(int(n) for n in mode_numbers)
        if len(numbers) != len(set(numbers)):
            raise ValueError("mode numbers must be distinct")
        if volume <= 0:
            raise ValueError("volume must be positive")
        if not 0 <= condensed_index < len(numbers):
            raise ValueError("condensed_index out of range")
        self.mode_numbers = numbers
        self.volume = float(volume)
        self.grid_size = int(grid_size)
        self.spacing = self.volume / self.grid_size
        self.grid = np.arange(self.grid_size) * self.spacing
        self.wavenumbers = np.array([2.0 * np.pi * n / self.volume for n in numbers])
        self.condensed_index = condensed_index
        self.mode_functions = np.exp(1j * np.outer(self.wavenumbers, self.grid)) / math.sqrt(self.volume)
        self.mode_functions.flags.writeable = False
        gram = (self.mode_functions.conj() @ self.mode_functions.T) * self.spacing
        if np.abs(gram - np.eye(len(numbers))).max() > tol:
            raise ValueError("mode functions are not orthonormal on this grid; "
                             "use more grid points or fewer aliased modes")

    @property
    def mode_count(self) -> int:
        return len(self.mode_numbers)

    @property
    def condensed_wavenumber(self) -> float:
        return float(self.wavenumbers[self.condensed_index])

    def function(self, mode: int) -> np.ndarray:
        return self.mode_functions[mode]

    def __repr__(self):
        return (f"ModeSet(numbers={self.mode_numbers}, V={self.volume}, "
                f"grid={self.grid_size}, k0 index={self.condensed_index})")


def field_operator(modes: ModeSet, grid_index: int, basis: FockBasis,
                   lowered: FockBasis) -> sp.csr_matrix:
    """Matrix of psi(r_g) = sum_k b_k(r_g) a_k from the N- to the (N-1)-sector."""
    if basis.mode_count != modes.mode_count:
        raise ValueError(f"basis has {basis.mode_count} modes but the mode set "
                         f"has {modes.mode_count}")
    if lowered.mode_count != basis.mode_count:
        raise ValueError("sector bases must share the mode count")
    if not 0 <= grid_index < modes.grid_size:
        raise ValueError(f"grid index {grid_index} out of range")
    out = sp.csr_matrix((lowered.size, basis.size), dtype=complex)
    for k in range(modes.mode_count):
        out = out + modes.mode_functions[k, grid_index] * annihilation_matrix(basis, lowered, k)
    return out.tocsr()


def number_operator(basis: FockBasis, mode: int) -> HermitianOperator:
    """n_k = a+_k a_k, diagonal on the occupation basis."""
    diag = np.array([occ[mode] for occ in basis.occupations], dtype=float)
    return HermitianOperator(sp.diags(diag, dtype=complex))


def total_number_operator(basis: FockBasis) -> HermitianOperator:
    diag = np.full(basis.size, float(basis.particle_count))
    return HermitianOperator(sp.diags(diag, dtype=complex))
