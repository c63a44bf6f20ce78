"""Numerical toolkit for a q-difference Painlevé system of order (n, n).

Submodules: ``qspecial`` (q-series), ``qpnn`` (the nonlinear system and its
Weyl symmetries), ``laxnn`` (its Lax pair), ``reduction`` (the n = 2 chain
down to a 2x2 system and q-Painlevé VI), ``hypergeom`` (the y = 0
particular solutions) and ``cli``.
"""

__version__ = "0.1.0"
