"""Default numerical tolerances used across the toolkit.

Structural residual checks (hermiticity, unitarity, reconstruction) use a
relative Frobenius tolerance; sign decisions on eigenvalues use an absolute
tolerance one order looser, above double-precision eigensolver noise at the
matrix sizes this toolkit targets.
"""

STRUCTURAL = 1e-10
"""Relative Frobenius tolerance for residual checks."""

SIGN = 1e-9
"""Absolute tolerance for eigenvalue-sign classification."""

DEGENERACY_GAP = 1e-9
"""Eigenvalue gap below which a cluster is treated as degenerate."""
