"""
Exception hierarchy for the residue engine.

Two families map onto the CLI exit codes: InputError (exit 1) for anything
wrong with what the user typed or supplied, PreconditionError (exit 2) for
mathematically invalid data (degenerate weights, dimension mismatches,
incomplete integration oracles, ...).
"""


class ResidueError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 2


class InputError(ResidueError, ValueError):
    """Malformed input: files, literals, expressions, CLI values."""

    exit_code = 1


class PreconditionError(ResidueError, ValueError):
    """Input is well-formed but violates a mathematical precondition."""

    exit_code = 2


# --- input errors -----------------------------------------------------------

class RationalFormatError(InputError):
    pass


class DatasetFormatError(InputError):
    pass


class ConfigError(InputError):
    pass


class ExpressionSyntaxError(InputError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class InvariantViolationError(InputError):
    """A psi-hat polynomial fails one of the InvariantPoly invariants."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class HomogeneityError(InvariantViolationError):
    pass


class SymmetryError(InvariantViolationError):
    pass


class SignFlipError(InvariantViolationError):
    pass


class InvalidPartitionError(InputError):
    pass


# --- precondition errors ----------------------------------------------------

class DimensionMismatchError(PreconditionError):
    pass


class DegenerateWeightError(PreconditionError):
    pass


class NonUnitError(PreconditionError):
    pass


class NotReducibleError(PreconditionError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class IncompleteOracleError(PreconditionError):
    def __init__(self, message, monomial=None):
        self.monomial = monomial
        super().__init__(message)


class UnsupportedDimensionError(PreconditionError):
    pass


class UnsupportedStratumError(PreconditionError):
    pass


class IrrationalSkeigenError(PreconditionError):
    pass


class ConsistencyError(PreconditionError):
    """Two routes to the same number disagree, or an internal check failed."""
