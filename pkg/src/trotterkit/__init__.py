"""Average-case error toolkit for product-formula and Taylor-series simulation.

The package computes empirical average-case simulation error over random
inputs, the matching analytic upper bounds, and the resources (Trotter number,
gate counts) each predicts.  Everything is driven by a sparse Pauli-string
representation; dense matrices appear only in oracles and small-system
reference paths.
"""

from trotterkit.errors import (
    ArgumentError,
    CapabilityError,
    ConvergenceError,
    DimensionError,
    SearchOverflowError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "CapabilityError",
    "ConvergenceError",
    "DimensionError",
    "SearchOverflowError",
    "ValidationError",
    "__version__",
]
