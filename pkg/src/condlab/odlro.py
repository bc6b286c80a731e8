"""One- and two-particle reduced density matrices, condensate detection,
macroscopic wavefunction extraction, and the two-fluid decomposition.

"Long range" is operationalized on the finite periodic grid as the maximum
factorization residual over all grid pairs; the limit |r - r'| -> infinity
has no finite-grid meaning.  The macroscopic wavefunction carries the phase
of the condensed-state amplitude on top of the single-particle mode
function, and the superfluid current is hbar/m * Im(W* grad W), which for a
plane-wave condensate equals rho_s * hbar k0 / m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySectorError, NoCondensateError
from .fock import FockBasis, ManyBodyState, ModeSet, annihilation_matrix, fock_basis, mode_correlations

ODLRO_THRESHOLD = 0.1
AMPLITUDE_FLOOR = 1e-6


@dataclass
class ReducedDensityMatrix:
    """Hermitian PSD matrix with its spectral decomposition attached.

    Order 1 is indexed by modes; order 2 by unordered mode pairs listed in
    ``pair_index``.  Eigenvalues are sorted descending, eigenvector columns
    match.
    """

    order: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    pair_index: tuple | None = None

    @classmethod
    def from_matrix(cls, order: int, matrix: np.ndarray, pair_index=None,
                    psd_tol: float = 1e-10) -> "ReducedDensityMatrix":
        matrix = 0.5 * (matrix + matrix.conj().T)
        evals, evecs = np.linalg.eigh(matrix)
        scale = max(1.0, float(evals[-1]) if evals.size else 1.0)
        if evals[0] < -psd_tol * scale:
            raise ValueError(f"matrix is not PSD: lowest eigenvalue {evals[0]:.3e}")
        order_desc = np.argsort(evals)[::-1]
        return cls(order, matrix, evals[order_desc], evecs[:, order_desc], pair_index)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def compute_rdm1(state: ManyBodyState) -> ReducedDensityMatrix:
    """One-particle RDM rho[k', k] = <a+_k' a_k>; trace = N."""
    if not isinstance(state.basis, FockBasis):
        raise ValueError("state must live on a FockBasis")
    if state.basis.particle_count == 0:
        raise EmptySectorError("one-particle RDM undefined for the vacuum sector")
    return ReducedDensityMatrix.from_matrix(1, mode_correlations(state))


def position_kernel(rdm: ReducedDensityMatrix, modes: ModeSet) -> np.ndarray:
    """<psi+(r') psi(r)> over grid pairs: kernel[g', g]."""
    if rdm.order != 1:
        raise ValueError("position kernel needs an order-1 RDM")
    if rdm.dimension != modes.mode_count:
        raise ValueError("RDM mode count does not match the mode set")
    b = modes.mode_functions
    return b.conj().T @ rdm.matrix @ b


def position_density(state: ManyBodyState, modes: ModeSet) -> np.ndarray:
    """Diagonal of the position kernel, clipped of -0.0 noise."""
    rho = mode_correlations(state)
    b = modes.mode_functions
    dens = np.einsum("ag,ab,bg->g", b.conj(), rho, b).real
    return dens


@dataclass
class OdlroDetection:
    present: bool
    condensate_fraction: float
    largest_eigenvalue: float
    threshold: float

    def to_json_dict(self) -> dict:
        return {
            "present": self.present,
            "condensate_fraction": self.condensate_fraction,
            "largest_eigenvalue": self.largest_eigenvalue,
            "threshold": self.threshold,
        }


def detect_odlro(rdm: ReducedDensityMatrix, particle_count: int,
                 threshold: float = ODLRO_THRESHOLD) -> OdlroDetection:
    """Flag a macroscopic RDM eigenvalue: present iff lambda_1 / N >= threshold."""
    if rdm.order != 1:
        raise ValueError("detection works on the order-1 RDM")
    lam = float(rdm.eigenvalues[0])
    alpha = lam / particle_count
    return OdlroDetection(alpha >= threshold, alpha, lam, threshold)


def order_parameter(rdm: ReducedDensityMatrix, particle_count: int) -> float:
    """Condensate fraction alpha = lambda_1 / N."""
    alpha = float(rdm.eigenvalues[0]) / particle_count
    if not -1e-12 <= alpha <= 1.0 + 1e-12:
        raise ValueError(f"condensate fraction {alpha!r} outside [0, 1]")
    return alpha


@dataclass
class MacroscopicWavefunction:
    """W(r) = sqrt(N) Phi_1 b_k0(r); integrates to N |Phi_1|^2."""

    values: np.ndarray
    condensate_amplitude: complex
    condensate_fraction: float
    grid: np.ndarray
    spacing: float

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.spacing)


def extract_macroscopic_wavefunction(state: ManyBodyState, modes: ModeSet,
                                     amplitude_floor: float = AMPLITUDE_FLOOR) -> MacroscopicWavefunction:
    """Project on the fully condensed configuration and attach the mode profile.

    The phase of the condensed amplitude Phi_1 rides on top of the
    single-particle mode function.  Raises when |Phi_1|^2 is below the floor:
    no macroscopic occupation of the target configuration, nothing to extract.
    """
    basis = state.basis
    if not isinstance(basis, FockBasis):
        raise ValueError("state must live on a FockBasis")
    if basis.mode_count != modes.mode_count:
        raise ValueError("state and mode set disagree on the mode count")
    n = basis.particle_count
    condensed = tuple(n if k == modes.condensed_index else 0
                      for k in range(basis.mode_count))
    phi1 = state.amplitude(condensed)
    if abs(phi1) ** 2 < amplitude_floor:
        raise NoCondensateError(
            f"condensed amplitude |Phi_1|^2 = {abs(phi1)**2:.3e} below floor {amplitude_floor}")
    values = math.sqrt(n) * phi1 * modes.mode_functions[modes.condensed_index]
    return MacroscopicWavefunction(values, phi1, abs(phi1) ** 2, modes.grid, modes.spacing)


@dataclass
class FactorizationReport:
    """Maximum deviation of the ODLRO kernel from W*(r') W(r) over grid pairs."""

    max_residual: float
    depletion_scale: float  # N (1 - alpha) / V, the natural size of the rest

    def to_json_dict(self) -> dict:
        return {"max_residual": self.max_residual, "depletion_scale": self.depletion_scale}


def factorization_residual(state: ManyBodyState, modes: ModeSet,
                           amplitude_floor: float = AMPLITUDE_FLOOR) -> FactorizationReport:
    w = extract_macroscopic_wavefunction(state, modes, amplitude_floor)
    kernel = position_kernel(compute_rdm1(state), modes)
    outer = np.outer(w.values.conj(), w.values)
    residual = float(np.abs(kernel - outer).max())
    n = state.basis.particle_count
    scale = n * (1.0 - w.condensate_fraction) / modes.volume
    return FactorizationReport(residual, scale)


@dataclass
class TwoFluidDecomposition:
    """Superfluid density/current from W, normal remainder from the total."""

    superfluid_density: np.ndarray
    superfluid_current: np.ndarray
    normal_density: np.ndarray
    total_density: np.ndarray
    mass: float
    hbar: float
    grid: np.ndarray
    spacing: float

    def min_normal_density(self) -> float:
        return float(self.normal_density.min())

    def total_particle_number(self) -> float:
        return float(np.sum(self.total_density) * self.spacing)


def _periodic_gradient(values: np.ndarray, spacing: float) -> np.ndarray:
    # second-order central differences on the periodic grid
    return (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * spacing)


def two_fluid(state: ManyBodyState, modes: ModeSet, mass: float = 1.0,
              hbar: float = 1.0) -> TwoFluidDecomposition:
    """Split density and current into the W-part and the normal remainder."""
    w = extract_macroscopic_wavefunction(state, modes)
    superfluid_density = np.abs(w.values) ** 2
    gradient = _periodic_gradient(w.values, modes.spacing)
    current = (hbar / mass) * np.imag(w.values.conj() * gradient)
    total = position_density(state, modes)
    return TwoFluidDecomposition(
        superfluid_density=superfluid_density,
        superfluid_current=current,
        normal_density=total - superfluid_density,
        total_density=total,
        mass=mass,
        hbar=hbar,
        grid=modes.grid,
        spacing=modes.spacing,
    )


def compute_rdm2(state: ManyBodyState) -> ReducedDensityMatrix:
    """Two-particle RDM over unordered mode pairs.

    Built in the symmetric two-particle subspace: weight sqrt(2) on
    distinct-mode pair indices reproduces the spectrum (and the <N(N-1)>
    trace) of the ordered-pair kernel <a+_k1' a+_k2' a_k2 a_k1>, so the pure
    condensate |N,0,...> has largest pair eigenvalue N(N-1).
    """
    basis = state.basis
    if not isinstance(basis, FockBasis):
        raise ValueError("state must live on a FockBasis")
    n, m = basis.particle_count, basis.mode_count
    if n < 2:
        raise EmptySectorError("two-particle RDM needs at least two particles")
    mid = fock_basis(n - 1, m)
    low = fock_basis(n - 2, m)
    pairs = tuple((k1, k2) for k1 in range(m) for k2 in range(k1, m))
    first_step = [annihilation_matrix(basis, mid, k) @ state.amplitudes for k in range(m)]
    images = []
    for k1, k2 in pairs:
        weight = 1.0 if k1 == k2 else math.sqrt(2.0)
        images.append(weight * (annihilation_matrix(mid, low, k2) @ first_step[k1]))
    stacked = np.stack(images)
    matrix = stacked.conj() @ stacked.T
    return ReducedDensityMatrix.from_matrix(2, matrix, pair_index=pairs)


@dataclass
class ProjectionReport:
    """Probability of the fully condensed n-particle-group configuration.

    For a single condensed mode the n = 1 and n = 2 target configurations
    coincide, so the probability is reported next to |Phi_1|^{2n} without
    asserting any relation between the two.
    """

    group_size: int
    probability: float
    amplitude_fraction: float        # |Phi_1|^2
    amplitude_fraction_power: float  # |Phi_1|^{2 n}

    def to_json_dict(self) -> dict:
        return {
            "group_size": self.group_size,
            "probability": self.probability,
            "amplitude_fraction": self.amplitude_fraction,
            "amplitude_fraction_power": self.amplitude_fraction_power,
        }


def nqs_projection_probability(state: ManyBodyState, group_size: int = 1,
                               condensed_mode: int = 0) -> ProjectionReport:
    if group_size not in (1, 2):
        raise ValueError("group size must be 1 or 2")
    basis = state.basis
    n = basis.particle_count
    target = tuple(n if k == condensed_mode else 0 for k in range(basis.mode_count))
    phi1 = state.amplitude(target)
    prob = abs(phi1) ** 2
    return ProjectionReport(group_size, prob, abs(phi1) ** 2, abs(phi1) ** (2 * group_size))
