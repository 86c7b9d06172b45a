"""Density matrices and reservoir states.

A density matrix is validated against unit trace, hermiticity, and positivity
(in that order).  Reservoir states are stored diagonalized: eigenvalues, the
unitary eigenbasis, and a +/-1 metric signature per dimension (all +1 for
physical reservoirs).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .errors import (
    BadRank,
    DimensionMismatch,
    IndexOutOfRange,
    NotHermitian,
    NotPositive,
    TraceNotOne,
)
from .linalg import dagger, frobenius

__all__ = [
    "DensityMatrix",
    "ReservoirState",
    "new_density",
    "random_density",
    "pure_reservoir",
    "mixed_reservoir",
]


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state: unit-trace, hermitian, positive semidefinite."""

    dim: int
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        """State spectrum, descending."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


def new_density(
    m,
    tol: float = tolerances.STRUCTURAL,
    tol_sign: float = tolerances.SIGN,
) -> DensityMatrix:
    """Validate a matrix as a density matrix.

    Checks run in order: trace (TraceNotOne), hermiticity (NotHermitian),
    positivity (NotPositive).  Tiny negative eigenvalues down to ``-tol_sign``
    are accepted as floating-point noise.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"trace is {tr:.12g}, expected 1")
    if frobenius(m - dagger(m)) > tol:
        raise NotHermitian("density matrix is not hermitian within tolerance")
    w = np.linalg.eigvalsh((m + dagger(m)) / 2.0)
    if w[0] < -tol_sign:
        raise NotPositive(f"minimum eigenvalue {w[0]:.3e} below -{tol_sign:g}")
    return DensityMatrix(dim=m.shape[0], matrix=m)


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Random state of prescribed rank: G G^dag / tr(G G^dag) for a dim x rank
    standard complex Gaussian G.  Deterministic per seed."""
    if not 1 <= rank <= dim:
        raise BadRank(f"rank must satisfy 1 <= rank <= {dim}, got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dagger(g)
    rho = rho / np.trace(rho).real
    return new_density(rho)


@dataclass(frozen=True)
class ReservoirState:
    """Auxiliary-system state stored in diagonal form.

    ``eigenvalues[i]`` is the weight on eigenbasis column ``i``;
    ``metric_signature[i]`` is the +/-1 metric of dimension ``i``.  For an
    indefinite signature the state must be supported entirely on
    positive-signature directions.
    """

    dim: int
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray
    metric_signature: np.ndarray = field(default=None)

    @property
    def pure(self) -> bool:
        return int(np.sum(self.eigenvalues > tolerances.SIGN)) == 1

    def matrix(self) -> np.ndarray:
        """Dense matrix form: basis @ diag(eigenvalues) @ basis^dag."""
        return (self.eigenbasis * self.eigenvalues) @ dagger(self.eigenbasis)


def _validate_reservoir(eigs, basis, signature) -> ReservoirState:
    eigs = np.asarray(eigs, dtype=np.float64).reshape(-1)
    dim = eigs.shape[0]
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.shape != (dim, dim):
        raise DimensionMismatch(f"eigenbasis shape {basis.shape} != ({dim},{dim})")
    if frobenius(dagger(basis) @ basis - np.eye(dim)) > tolerances.STRUCTURAL:
        raise NotPositive("eigenbasis is not unitary within tolerance")
    signature = np.asarray(signature, dtype=np.int64).reshape(-1)
    if signature.shape != (dim,) or not np.all(np.abs(signature) == 1):
        raise DimensionMismatch("metric signature must be a +/-1 list of length dim")
    if np.any(eigs < -tolerances.SIGN):
        raise NotPositive("reservoir eigenvalues must be nonnegative")
    if abs(float(np.sum(eigs)) - 1.0) > tolerances.STRUCTURAL:
        raise TraceNotOne(f"reservoir eigenvalues sum to {np.sum(eigs):.12g}")
    if np.any(signature < 0):
        # occupied eigenvectors may not lean on negative-signature coordinates
        neg = signature < 0
        for i in np.nonzero(eigs > tolerances.SIGN)[0]:
            leak = float(np.linalg.norm(basis[neg, i]))
            if leak > tolerances.SIGN:
                raise NotPositive(
                    f"reservoir support leaks {leak:.3e} onto negative-metric directions"
                )
    return ReservoirState(dim=dim, eigenvalues=eigs, eigenbasis=basis,
                          metric_signature=signature)


def pure_reservoir(dim: int, which: int, metric_signature=None) -> ReservoirState:
    """Pure projection onto coordinate ``which`` with identity eigenbasis."""
    if not 0 <= which < dim:
        raise IndexOutOfRange(f"which={which} is outside [0, {dim})")
    eigs = np.zeros(dim)
    eigs[which] = 1.0
    if metric_signature is None:
        metric_signature = np.ones(dim, dtype=np.int64)
    return _validate_reservoir(eigs, np.eye(dim, dtype=np.complex128), metric_signature)


def mixed_reservoir(eigenvalues, eigenbasis=None, metric_signature=None) -> ReservoirState:
    """Reservoir state from eigenvalues (nonnegative, summing to one) and an
    optional eigenbasis / metric signature."""
    eigs = np.asarray(eigenvalues, dtype=np.float64).reshape(-1)
    dim = eigs.shape[0]
    if eigenbasis is None:
        eigenbasis = np.eye(dim, dtype=np.complex128)
    if metric_signature is None:
        metric_signature = np.ones(dim, dtype=np.int64)
    return _validate_reservoir(eigs, eigenbasis, metric_signature)
