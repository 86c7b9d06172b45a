"""Maps as contractions of extended-space evolution.

A dilation couples the system (dimension d) to a reservoir (dimension R) with
composite index ``(r, a) -> r * R + a`` (reservoir fastest).  The evolution
matrix V acts on the product space; contracting means evolving ``rho (x) tau``
and tracing out the reservoir with a +/-1 metric weight per reservoir
direction.  An all-positive metric is ordinary unitary evolution with an
ordinary partial trace; an indefinite metric makes V pseudo-unitary and
realizes maps that are not completely positive.  The indefinite construction
is a formal device: the reservoir state still lives entirely on
positive-metric directions.

The inverse constructions fill the reservoir-index-zero block columns of V
with the decomposition's operators, ``V[(r, alpha), (r', 0)] = Op_alpha[r, r']``,
and complete the rest; the completion freedom never affects the induced map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .decomposition import CanonicalDecomposition, verify_trace_condition
from .errors import (
    DimensionMismatch,
    NotApplicable,
    NotCompletelyPositive,
    NotOrthonormal,
    NotPseudoOrthonormal,
    TraceConditionViolated,
)
from .linalg import (
    dagger,
    frobenius,
    pseudo_orthonormal_completion,
    unitary_completion,
)
from .maps import DynamicalMap
from .states import DensityMatrix, ReservoirState, pure_reservoir

__all__ = [
    "Dilation",
    "dilation_from_evolution",
    "contract",
    "induced_map",
    "stinespring_dilate",
    "pseudo_dilate",
    "dilate",
]


@dataclass(frozen=True)
class Dilation:
    """Extended-space evolution whose contraction realizes a map.

    ``metric`` is the +/-1 signature over the extended space, equal to the
    reservoir signature tiled over system indices.  ``kraus_column_map``
    records which columns and reservoir rows encode the source operators.
    """

    dim_system: int
    dim_reservoir: int
    v: np.ndarray
    metric: np.ndarray
    reservoir: ReservoirState
    kraus_column_map: dict = field(default_factory=dict)

    @property
    def dim_total(self) -> int:
        return self.dim_system * self.dim_reservoir

    def isometry_residual(self) -> float:
        """Frobenius deviation of V from metric isometry:
        ``V^dag eta V - eta`` (plain unitarity when the metric is positive)."""
        eta = self.metric.astype(np.float64)
        return frobenius(dagger(self.v) @ (eta[:, None] * self.v) - np.diag(eta))


def dilation_from_evolution(
    v,
    dim_system: int,
    dim_reservoir: int,
    reservoir: ReservoirState | None = None,
    tol: float = tolerances.STRUCTURAL,
) -> Dilation:
    """Wrap an explicit evolution matrix (with an all-positive or reservoir-
    supplied metric) as a Dilation, validating the metric isometry."""
    v = np.asarray(v, dtype=np.complex128)
    total = dim_system * dim_reservoir
    if v.shape != (total, total):
        raise DimensionMismatch(f"evolution shape {v.shape} != ({total},{total})")
    if reservoir is None:
        reservoir = pure_reservoir(dim_reservoir, 0)
    if reservoir.dim != dim_reservoir:
        raise DimensionMismatch("reservoir dimension does not match")
    metric = np.tile(reservoir.metric_signature, dim_system)
    dil = Dilation(
        dim_system=dim_system,
        dim_reservoir=dim_reservoir,
        v=v,
        metric=metric,
        reservoir=reservoir,
    )
    residual = dil.isometry_residual()
    if residual > tol * max(1.0, frobenius(v)):
        if np.all(metric > 0):
            raise NotOrthonormal(f"evolution is not unitary (residual {residual:.3e})")
        raise NotPseudoOrthonormal(
            f"evolution is not a metric isometry (residual {residual:.3e})"
        )
    return dil


def contract(dil: Dilation, rho) -> np.ndarray:
    """Evolve ``rho (x) tau`` with V and trace out the reservoir with the
    metric weights.  Returns a bare matrix; with an indefinite metric the
    result can leave the state set, so the caller validates."""
    if isinstance(rho, DensityMatrix):
        rho = rho.matrix
    rho = np.asarray(rho, dtype=np.complex128)
    d, r = dil.dim_system, dil.dim_reservoir
    if rho.shape != (d, d):
        raise DimensionMismatch(f"state shape {rho.shape} != ({d},{d})")
    extended = np.kron(rho, dil.reservoir.matrix())
    evolved = dil.v @ extended @ dagger(dil.v)
    e4 = evolved.reshape(d, r, d, r)
    weights = dil.reservoir.metric_signature.astype(np.float64)
    return np.einsum("n,anbn->ab", weights, e4)


def induced_map(dil: Dilation) -> DynamicalMap:
    """Assemble the contraction as a supermatrix instead of applying it to a
    single state; agrees with :func:`contract` on every state."""
    d, r = dil.dim_system, dil.dim_reservoir
    v4 = dil.v.reshape(d, r, d, r)
    tau = dil.reservoir.matrix()
    weights = dil.reservoir.metric_signature.astype(np.float64)
    a4 = np.einsum("n,rnpa,ab,snqb->rspq", weights, v4, tau, v4.conj())
    return DynamicalMap.from_a_form(a4.reshape(d * d, d * d))


def _operator_columns(ops, dim: int, dim_reservoir: int) -> np.ndarray:
    """Stack operators into extended-space columns: column r' has entries
    ``Op_alpha[r, r']`` at row ``(r, alpha)``."""
    cols = np.zeros((dim * dim_reservoir, dim), dtype=np.complex128)
    for alpha, op in enumerate(ops):
        for r in range(dim):
            cols[r * dim_reservoir + alpha, :] = op[r, :]
    return cols


def stinespring_dilate(dec: CanonicalDecomposition,
                       tol: float = tolerances.SIGN) -> Dilation:
    """Unitary dilation of a completely positive decomposition.

    The reservoir dimension equals the number of operators; the reservoir
    starts in the pure projection on its first direction.  The operator-sum
    identity makes the filled columns orthonormal, and any unitary completion
    of the remaining columns induces the same map.
    """
    if dec.n > 0:
        raise NotCompletelyPositive(
            f"decomposition has {dec.n} negative operators; use pseudo_dilate"
        )
    flag, residual, _, _ = verify_trace_condition(dec)
    if not flag:
        raise TraceConditionViolated(
            f"operator-sum trace condition residual {residual:.3e}"
        )
    d = dec.dim
    m = dec.m
    total = d * m
    cols = _operator_columns(dec.positive_ops, d, m)
    completed = unitary_completion(cols, total, tol=max(tolerances.STRUCTURAL, 2.0 * tol))

    v = np.zeros((total, total), dtype=np.complex128)
    input_slots = [rp * m for rp in range(d)]
    rest_slots = [j for j in range(total) if j not in set(input_slots)]
    for i, slot in enumerate(input_slots):
        v[:, slot] = completed[:, i]
    for i, slot in enumerate(rest_slots):
        v[:, slot] = completed[:, d + i]

    reservoir = pure_reservoir(m, 0)
    return Dilation(
        dim_system=d,
        dim_reservoir=m,
        v=v,
        metric=np.tile(reservoir.metric_signature, d),
        reservoir=reservoir,
        kraus_column_map={
            "input_column_slots": input_slots,
            "operator_reservoir_rows": list(range(m)),
        },
    )


def pseudo_dilate(dec: CanonicalDecomposition,
                  tol: float = tolerances.SIGN) -> Dilation:
    """Pseudo-unitary dilation of a decomposition with a negative part.

    The reservoir has one direction per operator, signature +1 for the
    positive family and -1 for the negative family; the trace condition makes
    the filled columns pseudo-orthonormal.  The reservoir starts in the pure
    projection on its first (positive-metric) direction, and the contraction
    weights reservoir directions by their signature.
    """
    if dec.n == 0:
        raise NotApplicable("decomposition is completely positive; use stinespring_dilate")
    flag, residual, _, _ = verify_trace_condition(dec)
    if not flag:
        raise TraceConditionViolated(
            f"operator-sum trace condition residual {residual:.3e}"
        )
    d = dec.dim
    m, n = dec.m, dec.n
    r_dim = m + n
    total = d * r_dim
    res_signature = np.concatenate([np.ones(m, dtype=np.int64),
                                    -np.ones(n, dtype=np.int64)])
    metric = np.tile(res_signature, d)
    cols = _operator_columns(list(dec.positive_ops) + list(dec.negative_ops), d, r_dim)
    input_slots = [rp * r_dim for rp in range(d)]
    v = pseudo_orthonormal_completion(
        cols, metric, slots=input_slots, tol=max(tolerances.STRUCTURAL, 2.0 * tol)
    )
    reservoir = pure_reservoir(r_dim, 0, metric_signature=res_signature)
    return Dilation(
        dim_system=d,
        dim_reservoir=r_dim,
        v=v,
        metric=metric,
        reservoir=reservoir,
        kraus_column_map={
            "input_column_slots": input_slots,
            "operator_reservoir_rows": list(range(r_dim)),
        },
    )


def dilate(dec: CanonicalDecomposition, tol: float = tolerances.SIGN) -> Dilation:
    """Dispatch on the decomposition: unitary when there is no negative part,
    pseudo-unitary otherwise."""
    if dec.n == 0:
        return stinespring_dilate(dec, tol=tol)
    return pseudo_dilate(dec, tol=tol)
