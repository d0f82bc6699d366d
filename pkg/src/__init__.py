"""
Surrogate toolkit for two-stage stochastic programs: an LP and MILP engine,
benchmark generators, neural value-function surrogates and their exact
optimization embeddings.
"""

__version__ = "1.0.0"

from .errors import ToolkitError

__all__ = ["ToolkitError"]
