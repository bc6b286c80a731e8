"""Named state constructors shared by the CLI, the coherent ensembles, and tests.

All recipes are deterministic.  ``two_fraction_state`` with the incoherent
spread keeps the one-body RDM diagonal by weighting only occupations whose
condensed-mode count differs from N and from each other by at least two;
that variant needs exactly two modes (with more modes, states inside one
occupation shell reconnect through the spectator modes).
"""

from __future__ import annotations

import math

import numpy as np

from .fock import FockBasis, ManyBodyState, fock_basis


def pure_condensate_state(basis: FockBasis, condensed_mode: int = 0,
                          phase: float = 0.0) -> ManyBodyState:
    """All N particles in one mode, with an optional global phase."""
    n = basis.particle_count
    occ = tuple(n if k == condensed_mode else 0 for k in range(basis.mode_count))
    return ManyBodyState.from_occupation(basis, occ, phase)


def uniform_occupation_state(basis: FockBasis) -> ManyBodyState:
    """Single Fock state with particles spread as evenly as possible."""
    n, m = basis.particle_count, basis.mode_count
    base, extra = divmod(n, m)
    occ = tuple(base + (1 if k < extra else 0) for k in range(m))
    return ManyBodyState.from_occupation(basis, occ)


def neel_boson_state(basis: FockBasis) -> ManyBodyState:
    """One boson per mode; requires N == M."""
    if basis.particle_count != basis.mode_count:
        raise ValueError("neel-boson needs as many particles as modes")
    return ManyBodyState.from_occupation(basis, (1,) * basis.mode_count)


def two_fraction_state(basis: FockBasis, alpha: float, condensed_mode: int = 0,
                       phase: float = 0.0, spread: str = "incoherent") -> ManyBodyState:
    """sqrt(alpha) on the condensate plus sqrt(1-alpha) on a depleted spread.

    spread="incoherent": uniform real weight over occupations with
    n_condensed in {N-2, N-4, ...} (two modes only) — no single-hop
    connections, so the RDM stays diagonal and the factorization residual is
    exactly (1-alpha) N / V.  spread="all": uniform over every other basis
    state, coherences included.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    n, m = basis.particle_count, basis.mode_count
    condensed = tuple(n if k == condensed_mode else 0 for k in range(m))
    vec = np.zeros(basis.size, dtype=complex)
    vec[basis.index(condensed)] = math.sqrt(alpha) * np.exp(1j * phase)
    if alpha < 1.0:
        if basis.size == 1:
            # the vacuum sector has nothing to deplete into
            vec[basis.index(condensed)] = np.exp(1j * phase)
            return ManyBodyState(vec, basis)
        if spread == "incoherent":
            if m != 2:
                raise ValueError("incoherent spread is defined for exactly 2 modes")
            counts = range(n - 2, -1, -2)
            targets = [tuple(c if k == condensed_mode else n - c for k in range(2))
                       for c in counts]
            if not targets:  # N < 2: fall back to the single depleted state
                targets = [occ for occ in basis.occupations if occ != condensed]
        elif spread == "all":
            targets = [occ for occ in basis.occupations if occ != condensed]
        else:
            raise ValueError(f"unknown spread kind {spread!r}")
        weight = math.sqrt((1.0 - alpha) / len(targets))
        for occ in targets:
            vec[basis.index(occ)] = weight
    return ManyBodyState(vec, basis)


def two_mode_product_state(n_a: int, n_b: int) -> ManyBodyState:
    """|N_a, N_b> on the two-mode sector of N_a + N_b particles."""
    if n_a < 0 or n_b < 0:
        raise ValueError("occupations must be non-negative")
    basis = fock_basis(n_a + n_b, 2)
    return ManyBodyState.from_occupation(basis, (n_a, n_b))


RECIPE_NAMES = ("pure-condensate", "two-fraction", "uniform", "neel-boson", "two-mode")


def sector_recipe(kind: str, mode_count: int, alpha: float | None = None,
                  condensed_mode: int = 0, phase: float = 0.0):
    """Recipe callable N -> ManyBodyState for coherent ensembles.

    The amplitude structure (which configurations carry weight, and with what
    fractions) is the same for every N, as the sector-superposition picture
    requires.
    """
    if kind in ("pure-condensate", "all-condensed"):
        def build(n):
            return pure_condensate_state(fock_basis(n, mode_count), condensed_mode, phase)
    elif kind == "two-fraction":
        if alpha is None:
            raise ValueError("two-fraction recipe needs alpha")
        def build(n):
            basis = fock_basis(n, mode_count)
            spread = "incoherent" if mode_count == 2 else "all"
            return two_fraction_state(basis, alpha, condensed_mode, phase, spread)
    elif kind == "uniform":
        def build(n):
            return uniform_occupation_state(fock_basis(n, mode_count))
    else:
        raise ValueError(f"unknown ensemble recipe {kind!r}")
    build.info = {"type": kind, "alpha": alpha, "k0": condensed_mode, "phase": phase,
                  "modes": mode_count}
    return build
