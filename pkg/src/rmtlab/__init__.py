"""Random-matrix and quantum-chaos laboratory.

Generates random, interpolating, pseudo-random, and quantum-chaotic unitary
operators; measures spectral, eigenvector, and matrix-element statistics and
Meyer-Wallach entanglement production; and quantifies randomness by fitting
distributions against a delta-parameterized interpolating-ensemble reference
library.
"""

__version__ = "0.1.0"

from .ensembles import RngStream  # noqa: F401
