"""Canonical operator decompositions of hermiticity-preserving maps.

The Choi form of such a map is hermitian, so it splits into eigenvalue-scaled
operator families: positive eigenvalues give the positive-part operators,
negative eigenvalues the negative-part operators, and the map acts as

    rho -> sum_a C_a rho C_a^dag - sum_b D_b rho D_b^dag.

Eigenvectors are reshaped row-major, component (r, r') of an eigenvector
becoming entry (r, r') of the operator, which makes a rank-one Choi form
reproduce plain operator conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import NotHermiticityPreserving, NotPositive
from .linalg import dagger, frobenius, hermitian_eig
from .maps import DynamicalMap, check_hermiticity_preserving, from_kraus_action

__all__ = [
    "CanonicalDecomposition",
    "decompose",
    "reconstruct",
    "verify_trace_condition",
]


@dataclass(frozen=True)
class CanonicalDecomposition:
    """Signed operator families from the Choi eigendecomposition.

    ``positive_ops`` and ``negative_ops`` are ordered by decreasing weight
    magnitude; ``eigenvalues`` holds the full Choi spectrum descending;
    ``zero_count`` counts eigenvalues within the sign tolerance of zero.
    """

    dim: int
    positive_ops: list
    negative_ops: list
    eigenvalues: np.ndarray
    zero_count: int

    @property
    def m(self) -> int:
        return len(self.positive_ops)

    @property
    def n(self) -> int:
        return len(self.negative_ops)


def decompose(m: DynamicalMap, tol_sign: float = tolerances.SIGN) -> CanonicalDecomposition:
    """Split the Choi form by eigenvalue sign into scaled operator families.

    Zero modes (|eigenvalue| <= tol_sign) are dropped from both lists; they
    contribute nothing to the map.
    """
    ok, _ = check_hermiticity_preserving(m)
    if not ok:
        raise NotHermiticityPreserving("Choi form is not hermitian")
    n = m.dim
    b = (m.b_form + dagger(m.b_form)) / 2.0
    eig = hermitian_eig(b)
    w, q = eig.eigenvalues, eig.eigenvectors

    positive_ops = [
        np.sqrt(w[i]) * q[:, i].reshape(n, n)
        for i in range(len(w))
        if w[i] > tol_sign
    ]
    # negative part ordered by decreasing magnitude: walk the spectrum upward
    negative_ops = [
        np.sqrt(-w[i]) * q[:, i].reshape(n, n)
        for i in range(len(w) - 1, -1, -1)
        if w[i] < -tol_sign
    ]
    zero_count = int(np.sum(np.abs(w) <= tol_sign))
    return CanonicalDecomposition(
        dim=n,
        positive_ops=positive_ops,
        negative_ops=negative_ops,
        eigenvalues=w,
        zero_count=zero_count,
    )


def reconstruct(dec: CanonicalDecomposition) -> DynamicalMap:
    """Rebuild the map from its signed operator families."""
    pairs = [(+1, c) for c in dec.positive_ops] + [(-1, d) for d in dec.negative_ops]
    if not pairs:
        n = dec.dim
        return DynamicalMap.from_b_form(np.zeros((n * n, n * n), dtype=np.complex128))
    return from_kraus_action(pairs)


def verify_trace_condition(dec: CanonicalDecomposition, tol: float = tolerances.STRUCTURAL):
    """Check the operator-sum trace condition
    ``sum C^dag C - sum D^dag D = identity``.

    Returns ``(flag, residual, gram_positive, gram_negative)`` where the Gram
    sums are returned for the parameterization stage.  Both Gram sums are
    positive semidefinite by construction; that is asserted defensively.
    """
    n = dec.dim
    gram_pos = np.zeros((n, n), dtype=np.complex128)
    for c in dec.positive_ops:
        gram_pos += dagger(c) @ c
    gram_neg = np.zeros((n, n), dtype=np.complex128)
    for d in dec.negative_ops:
        gram_neg += dagger(d) @ d
    for name, g in (("positive", gram_pos), ("negative", gram_neg)):
        w = np.linalg.eigvalsh((g + dagger(g)) / 2.0)
        if w.size and w[0] < -tolerances.SIGN:
            raise NotPositive(f"{name} Gram sum has eigenvalue {w[0]:.3e}")
    residual = frobenius(gram_pos - gram_neg - np.eye(n))
    flag = residual <= tol * max(1.0, float(np.sqrt(n)))
    return flag, residual, gram_pos, gram_neg
