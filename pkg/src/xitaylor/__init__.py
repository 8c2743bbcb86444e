"""High-precision Taylor polynomials of Riemann's xi function and their zeros."""

from .specfun import PrecisionContext

__version__ = "0.1.0"

__all__ = ["PrecisionContext", "__version__"]
