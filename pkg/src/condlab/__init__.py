"""condlab: a desk-scale numerical laboratory for spontaneous symmetry breaking,
off-diagonal long-range order, and measurement-induced condensate interference."""

__version__ = "0.1.0"

from .errors import (
    BasisSizeError,
    ContractViolationError,
    EmptySectorError,
    NoCondensateError,
)
from .fock import (
    FockBasis,
    HermitianOperator,
    ManyBodyState,
    ModeSet,
    annihilation_matrix,
    apply_annihilation,
    commutator_norm,
    creation_matrix,
    field_operator,
    fock_basis,
    mode_correlations,
    number_operator,
    sector_dimension,
    total_number_operator,
)

__all__ = [
    "__version__",
    "BasisSizeError",
    "ContractViolationError",
    "EmptySectorError",
    "NoCondensateError",
    "FockBasis",
    "HermitianOperator",
    "ManyBodyState",
    "ModeSet",
    "annihilation_matrix",
    "apply_annihilation",
    "commutator_norm",
    "creation_matrix",
    "field_operator",
    "fock_basis",
    "mode_correlations",
    "number_operator",
    "sector_dimension",
    "total_number_operator",
]
