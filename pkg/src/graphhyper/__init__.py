"""Graph hypersurfaces: graph polynomials, deletion-contraction conditions,
Chern-class Feynman-rule polynomials, and finite-field point counts."""

__version__ = "0.1.0"
