"""Exception types shared across the package.

Validation problems (bad sizes, empty sectors, missing condensate amplitude)
are ValueError subclasses; violations of a numerical contract that was
promised by the caller (non-block-diagonal operators, failed commutator
identities) get their own branch so the CLI can map them to a distinct
exit code.
"""


class BasisSizeError(ValueError):
    """Requested sector exceeds the configured basis-size cap."""


class EmptySectorError(ValueError):
    """Operation needs at least one particle (or one more sector)."""


class NoCondensateError(ValueError):
    """Condensed-state amplitude below the floor; no macroscopic wavefunction."""


class ContractViolationError(RuntimeError):
    """A numerical precondition failed (operator structure, matrix identity)."""
