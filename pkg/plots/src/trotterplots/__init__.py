"""Figure rendering for the simulation toolkit's CSV output.

The physics lives entirely on the other side of the CSV boundary; this
package only reads tables and draws them.
"""

from trotterplots.figspec import (EmptyTableError, FigureSpec, KINDS,
                                  SchemaError, load_rows, read_table)
from trotterplots.render import render

__version__ = "0.1.0"

__all__ = ["EmptyTableError", "FigureSpec", "KINDS", "SchemaError",
           "load_rows", "read_table", "render", "__version__"]
