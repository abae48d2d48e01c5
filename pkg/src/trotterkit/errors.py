"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems (ArgumentError,
ValidationError, DimensionError) exit 2, capability refusals exit 3, and
convergence or search failures exit 4.
"""


class TrotterkitError(Exception):
    """Base class for all package-specific errors."""


class ArgumentError(TrotterkitError):
    """A caller passed an argument that is out of range or malformed."""


class DimensionError(TrotterkitError):
    """Operands act on different numbers of qubits, or a shape is wrong."""


class ValidationError(TrotterkitError):
    """Input data (JSON, CSV, config) failed a structural or semantic check."""


class CapabilityError(TrotterkitError):
    """The request is well-formed but exceeds what this build can compute.

    Raised for dense operations above the qubit cap, for plans whose
    structure has no efficient propagator, and for memory-guard refusals.
    """


class ConvergenceError(TrotterkitError):
    """An iterative routine failed to reach its tolerance within its budget."""


class SearchOverflowError(ConvergenceError):
    """A step-count search exceeded the hard cap without bracketing."""
