"""Explicit parameterization of decomposed maps.

Pipeline: the two Gram sums of a decomposition share an eigenbasis (their
difference is the identity), which yields one hyperbolic angle per dimension.
Dividing the hyperbolic scale factors out of the operator families leaves
families that resolve the identity, and each family is then reduced stage by
stage: the leading operator's singular values give trigonometric angles, the
leading angle is normalized away by transferring its weight inside the family,
and the remaining operators shrink by one dimension after the sine factor is
divided out.

Every transformation applied during a stage (domain rotation, weight
transfer, row rotation, dropped columns) is recorded, so the original
operator families can be rebuilt exactly from a ParameterSet.  The recorded
free parameters are only the hyperbolic and trigonometric angles; everything
else is gauge or is determined by the identity-resolution constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .decomposition import CanonicalDecomposition, reconstruct, verify_trace_condition
from .errors import (
    BadArguments,
    DimensionMismatch,
    InsufficientOperators,
    NotPositive,
    NotResolution,
    SinhDegenerate,
    TraceConditionViolated,
)
from .linalg import dagger, fix_column_phases, frobenius, hermitian_eig
from .maps import DynamicalMap, from_kraus_action

__all__ = [
    "HyperbolicFrame",
    "StageRecord",
    "ParameterSet",
    "hyperbolic_frame",
    "extract_isometry_families",
    "reduce_stage",
    "parameterize",
    "parameter_count",
    "rebuild_operators",
    "rebuild_map",
]

_TERMINAL_TOL = 1e-10
_COMPENSATION_TOL = 1e-10
_RANK_TOL = 1e-9
_VANISH_TOL = 1e-7


@dataclass(frozen=True)
class HyperbolicFrame:
    """Common eigenbasis of the two Gram sums, with hyperbolic angles.

    ``basis`` diagonalizes both sums; ``cosh(phi)`` and ``sinh(phi)`` are
    regenerated from ``phi`` so the hyperbolic identity holds analytically.
    """

    basis: np.ndarray
    phi: np.ndarray

    @property
    def cosh(self) -> np.ndarray:
        return np.cosh(self.phi)

    @property
    def sinh(self) -> np.ndarray:
        return np.sinh(self.phi)


def hyperbolic_frame(gram_pos, gram_neg, tol: float = tolerances.SIGN) -> HyperbolicFrame:
    """Diagonalize the positive Gram sum; the trace condition makes the same
    basis diagonalize the negative one, and pins the eigenvalue pairs to
    ``cosh^2`` / ``sinh^2`` of shared hyperbolic angles."""
    gram_pos = np.asarray(gram_pos, dtype=np.complex128)
    gram_neg = np.asarray(gram_neg, dtype=np.complex128)
    n = gram_pos.shape[0]
    if gram_pos.shape != (n, n) or gram_neg.shape != (n, n):
        raise DimensionMismatch("Gram sums must be square matrices of equal size")
    for name, g in (("positive", gram_pos), ("negative", gram_neg)):
        w = np.linalg.eigvalsh((g + dagger(g)) / 2.0)
        if w[0] < -tol:
            raise NotPositive(f"{name} Gram sum has eigenvalue {w[0]:.3e}")
    if frobenius(gram_pos - gram_neg - np.eye(n)) > tol:
        raise TraceConditionViolated(
            "Gram sums do not differ by the identity within tolerance"
        )
    eig = hermitian_eig((gram_pos + dagger(gram_pos)) / 2.0)
    jsq = np.clip(eig.eigenvalues, 1.0, None)
    phi = np.arccosh(np.sqrt(jsq))
    return HyperbolicFrame(basis=eig.eigenvectors, phi=phi)


def _extract_families(dec: CanonicalDecomposition, frame: HyperbolicFrame,
                      tol: float = tolerances.SIGN):
    """Rotate both operator families into the frame basis and divide out the
    hyperbolic scale factors.  Returns the families plus the bookkeeping
    needed to invert the extraction exactly."""
    u = frame.basis
    cosh = frame.cosh
    sinh = frame.sinh
    n = dec.dim
    if u.shape != (n, n):
        raise DimensionMismatch("frame dimension does not match the decomposition")

    pos_family = [dagger(u) @ c @ u / cosh[None, :] for c in dec.positive_ops]

    support = np.nonzero(sinh > tol)[0]
    nulls = np.nonzero(sinh <= tol)[0]
    neg_family = []
    null_stubs = []
    for d in dec.negative_ops:
        dh = dagger(u) @ d @ u
        stub = dh[:, nulls]
        leak = float(np.linalg.norm(stub))
        if leak > _VANISH_TOL:
            raise SinhDegenerate(
                nulls.tolist(),
                f"negative-part operator carries weight {leak:.3e} on directions "
                "with vanishing hyperbolic scale",
            )
        neg_family.append(dh[:, support] / sinh[None, support])
        null_stubs.append(stub)
    return pos_family, neg_family, support, nulls, null_stubs


def extract_isometry_families(dec: CanonicalDecomposition, frame: HyperbolicFrame,
                              tol: float = tolerances.SIGN):
    """Return the two scale-free families.  Each satisfies
    ``sum op^dag op = identity`` (for the negative family, on the subspace
    where the hyperbolic scale is nonzero; those operators are tall when the
    scale vanishes somewhere)."""
    pos_family, neg_family, _, _, _ = _extract_families(dec, frame, tol)
    return pos_family, neg_family


@dataclass(frozen=True)
class StageRecord:
    """Everything one reduction stage did, enough to invert it exactly.

    ``theta`` holds the recorded free angles (the leading angle is normalized
    away and is not free; ``delta`` is the weight transferred to do so, which
    the identity-resolution constraint determines).  ``basis`` is the domain
    rotation diagonalizing the leading operator's Gram matrix; ``v_basis`` is
    the domain rotation applied to the remaining operators (the same matrix,
    kept under its own name for auditability).  ``row_rotations`` and
    ``removed_columns`` record, per remaining operator, the output rotation
    that empties the dropped rows and the dropped column content.
    """

    rows: int
    cols: int
    theta: np.ndarray
    delta: float
    basis: np.ndarray | None
    leading_unitary: np.ndarray | None
    leading_form: np.ndarray | None
    row_rotations: list
    removed_columns: list
    excluded: np.ndarray
    kept: np.ndarray
    terminal: bool

    @property
    def v_basis(self) -> np.ndarray | None:
        return self.basis


def _embedded_diag(values, rows, cols) -> np.ndarray:
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, v in enumerate(values):
        out[i, i] = v
    return out


def reduce_stage(ops, tol_resolution: float = 1e-8):
    """Run one reduction stage on an operator family resolving the identity.

    Consumes ``ops[0]``: its singular values become the stage angles (the
    first is normalized to zero by transferring its deficit onto the rest of
    the family along the leading singular direction, which leaves the family
    sum unchanged).  The remaining operators lose that direction and any
    direction whose sine factor is below the rank tolerance, shrink
    accordingly, and are rescaled so they again resolve the identity.

    Returns ``(record, reduced_ops)``.  A lone isometric operator is already
    in final form: its record is terminal and carries no angles.
    """
    ops = [np.asarray(op, dtype=np.complex128) for op in ops]
    if not ops:
        raise NotResolution("empty operator family")
    shape = ops[0].shape
    if any(op.shape != shape for op in ops):
        raise DimensionMismatch("family operators must share one shape")
    rows, cols = shape
    if rows < cols:
        raise DimensionMismatch("operators must have at least as many rows as columns")
    p = len(ops)

    if cols > 0:
        total = np.zeros((cols, cols), dtype=np.complex128)
        for op in ops:
            total += dagger(op) @ op
        if frobenius(total - np.eye(cols)) > tol_resolution:
            raise NotResolution(
                f"family Gram sum deviates from identity by "
                f"{frobenius(total - np.eye(cols)):.3e}"
            )

    if cols == 0:
        record = StageRecord(
            rows=rows, cols=0, theta=np.zeros(0), delta=0.0, basis=None,
            leading_unitary=None, leading_form=None, row_rotations=[],
            removed_columns=[], excluded=np.zeros(0, dtype=int),
            kept=np.zeros(0, dtype=int), terminal=True,
        )
        return record, ops[1:]

    u0, sv, wh = np.linalg.svd(ops[0], full_matrices=True)
    w = dagger(wh)
    # joint phase gauge: fixing the domain basis column phases and mirroring
    # them on the output basis leaves the operator's factorization intact
    phases = np.ones(cols, dtype=np.complex128)
    for j in range(cols):
        col = w[:, j]
        i = int(np.argmax(np.abs(col)))
        if abs(col[i]) > 0.0:
            phases[j] = col[i].conjugate() / abs(col[i])
    w = w * phases[None, :]
    u0[:, :cols] = u0[:, :cols] * phases[None, :]
    if rows > cols:
        u0[:, cols:] = fix_column_phases(u0[:, cols:])

    cos_all = np.clip(sv, 0.0, 1.0)
    theta_all = np.arccos(cos_all)
    delta = float(1.0 - cos_all[0] ** 2)

    if p == 1:
        if delta > _COMPENSATION_TOL:
            raise InsufficientOperators(
                "a single operator with a leading angle away from zero cannot "
                "absorb the normalization transfer"
            )
        record = StageRecord(
            rows=rows, cols=cols, theta=np.zeros(0), delta=delta, basis=w,
            leading_unitary=u0,
            leading_form=_embedded_diag(np.ones(cols), rows, cols),
            row_rotations=[], removed_columns=[],
            excluded=np.zeros(0, dtype=int), kept=np.arange(cols),
            terminal=True,
        )
        return record, []

    theta = theta_all[1:].copy()
    sin_all = np.sin(theta_all)
    excluded = np.array([0] + [i for i in range(1, cols) if sin_all[i] <= _RANK_TOL],
                        dtype=int)
    kept = np.array([i for i in range(1, cols) if sin_all[i] > _RANK_TOL], dtype=int)
    k_next = len(kept)

    row_rotations = []
    removed_columns = []
    reduced = []
    for op in ops[1:]:
        rotated = op @ w
        stub = rotated[:, excluded].copy()
        trimmed = rotated.copy()
        trimmed[:, excluded] = 0.0
        um, _, _ = np.linalg.svd(trimmed, full_matrices=True)
        um = fix_column_phases(um)
        # route the range onto the kept row slots, everything else elsewhere
        target_rows = list(kept) + [r for r in range(rows) if r not in set(kept)]
        q_dag = np.zeros((rows, rows), dtype=np.complex128)
        for idx, row in enumerate(target_rows):
            q_dag[:, row] = um[:, idx]
        q = dagger(q_dag)
        squeezed = q @ trimmed
        block = squeezed[np.ix_(kept, kept)]
        reduced.append(block / sin_all[None, kept])
        row_rotations.append(q)
        removed_columns.append(stub)

    leading_cos = cos_all.copy()
    leading_cos[0] = 1.0
    record = StageRecord(
        rows=rows, cols=cols, theta=theta, delta=delta, basis=w,
        leading_unitary=u0, leading_form=_embedded_diag(leading_cos, rows, cols),
        row_rotations=row_rotations, removed_columns=removed_columns,
        excluded=excluded, kept=kept, terminal=False,
    )
    return record, reduced


def _stage_invert(record: StageRecord, reduced_ops) -> list:
    """Exact inverse of one reduction stage."""
    rows, cols = record.rows, record.cols
    if cols == 0:
        return [np.zeros((rows, 0), dtype=np.complex128)] + list(reduced_ops)

    if record.terminal:
        cos_all = np.ones(cols)
    else:
        cos_all = np.concatenate(
            ([np.sqrt(max(0.0, 1.0 - record.delta))], np.cos(record.theta))
        )
    leading = record.leading_unitary @ _embedded_diag(cos_all, rows, cols) @ dagger(record.basis)
    out = [leading]

    theta_all = np.concatenate(([0.0], record.theta)) if not record.terminal else np.zeros(cols)
    sin_all = np.sin(theta_all)
    for alpha, block in enumerate(reduced_ops):
        squeezed = np.zeros((rows, cols), dtype=np.complex128)
        squeezed[np.ix_(record.kept, record.kept)] = block * sin_all[None, record.kept]
        trimmed = dagger(record.row_rotations[alpha]) @ squeezed
        trimmed[:, record.excluded] = record.removed_columns[alpha]
        out.append(trimmed @ dagger(record.basis))
    return out


def _family_stages(family, tol_resolution: float = 1e-8):
    records = []
    ops = list(family)
    while ops:
        record, ops = reduce_stage(ops, tol_resolution=tol_resolution)
        records.append(record)
    return records


def _family_rebuild(records) -> list:
    ops = []
    for record in reversed(records):
        ops = _stage_invert(record, ops)
    return ops


@dataclass(frozen=True)
class ParameterSet:
    """Angles plus recorded gauge for one decomposed map.

    Free parameters are ``phi`` (one hyperbolic angle per dimension) and the
    ``theta`` lists of every stage.  All matrices are gauge or constraint
    bookkeeping kept for exact reconstruction and audit.
    """

    dim: int
    m: int
    n: int
    phi: np.ndarray
    theta_stages_pos: list
    theta_stages_neg: list
    frame: HyperbolicFrame
    stage_records_pos: list
    stage_records_neg: list
    neg_support: np.ndarray
    neg_null: np.ndarray
    neg_null_stubs: list
    reconstruction_residual: float = field(default=np.nan)

    @property
    def residual_unitaries(self) -> list:
        return [
            rec.leading_unitary
            for rec in (*self.stage_records_pos, *self.stage_records_neg)
        ]

    @property
    def diagonalizers(self) -> list:
        return [
            rec.basis for rec in (*self.stage_records_pos, *self.stage_records_neg)
        ]

    @property
    def attained_parameter_count(self) -> int:
        total = self.dim
        for t in (*self.theta_stages_pos, *self.theta_stages_neg):
            total += len(t)
        return total

    @property
    def parameter_count_bound(self) -> int:
        return parameter_count(self.dim, self.m, self.n)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "m": self.m,
            "n": self.n,
            "phi": [float(x) for x in self.phi],
            "theta_stages_m": [[float(x) for x in t] for t in self.theta_stages_pos],
            "theta_stages_n": [[float(x) for x in t] for t in self.theta_stages_neg],
            "attained_parameter_count": self.attained_parameter_count,
            "parameter_count_bound": self.parameter_count_bound,
            "reconstruction_residual": float(self.reconstruction_residual),
        }


def parameter_count(dim: int, m: int, n: int) -> int:
    """Closed-form parameter total: ``dim^2 - [m(m-1) + n(n-1)] / 2``.

    The numerator is always even, so the result is integer-exact.  Meaningful
    as a sharp bound when the operator families have at most ``dim`` terms in
    total; outside that regime it is reported as-is.
    """
    if dim < 1 or n < 0 or m < n or m > dim * dim or m + n > dim * dim:
        raise BadArguments(f"invalid counts (dim={dim}, m={m}, n={n})")
    return dim * dim - (m * (m - 1) + n * (n - 1)) // 2


def parameterize(dec: CanonicalDecomposition,
                 tol: float = tolerances.SIGN) -> ParameterSet:
    """Full pipeline: hyperbolic frame, scale-free families, staged reduction
    of both families, and a reconstruction self-check.

    Requires the trace condition to hold on the decomposition.
    """
    flag, residual, gram_pos, gram_neg = verify_trace_condition(dec)
    if not flag:
        raise TraceConditionViolated(
            f"trace-condition residual {residual:.3e} exceeds tolerance"
        )
    frame = hyperbolic_frame(gram_pos, gram_neg, tol=tol)
    pos_family, neg_family, support, nulls, null_stubs = _extract_families(
        dec, frame, tol=tol
    )
    records_pos = _family_stages(pos_family)
    records_neg = _family_stages(neg_family)
    ps = ParameterSet(
        dim=dec.dim,
        m=dec.m,
        n=dec.n,
        phi=frame.phi,
        theta_stages_pos=[rec.theta for rec in records_pos],
        theta_stages_neg=[rec.theta for rec in records_neg],
        frame=frame,
        stage_records_pos=records_pos,
        stage_records_neg=records_neg,
        neg_support=support,
        neg_null=nulls,
        neg_null_stubs=null_stubs,
    )
    rebuilt = rebuild_map(ps)
    source = reconstruct(dec)
    rel = frobenius(rebuilt.b_form - source.b_form) / max(1.0, frobenius(source.b_form))
    return ParameterSet(
        dim=ps.dim, m=ps.m, n=ps.n, phi=ps.phi,
        theta_stages_pos=ps.theta_stages_pos,
        theta_stages_neg=ps.theta_stages_neg,
        frame=ps.frame,
        stage_records_pos=ps.stage_records_pos,
        stage_records_neg=ps.stage_records_neg,
        neg_support=ps.neg_support,
        neg_null=ps.neg_null,
        neg_null_stubs=ps.neg_null_stubs,
        reconstruction_residual=rel,
    )


def rebuild_operators(ps: ParameterSet):
    """Invert the pipeline: operators of both families from the recorded
    stages, scale factors and frame rotation reapplied."""
    u = ps.frame.basis
    cosh = ps.frame.cosh
    sinh = ps.frame.sinh
    n = ps.dim

    pos_ops = [
        u @ (mat * cosh[None, :]) @ dagger(u)
        for mat in _family_rebuild(ps.stage_records_pos)
    ]
    neg_ops = []
    for mat, stub in zip(_family_rebuild(ps.stage_records_neg), ps.neg_null_stubs):
        dh = np.zeros((n, n), dtype=np.complex128)
        dh[:, ps.neg_support] = mat * sinh[None, ps.neg_support]
        dh[:, ps.neg_null] = stub
        neg_ops.append(u @ dh @ dagger(u))
    return pos_ops, neg_ops


def rebuild_map(ps: ParameterSet) -> DynamicalMap:
    """Map reconstructed from a ParameterSet."""
    pos_ops, neg_ops = rebuild_operators(ps)
    pairs = [(+1, c) for c in pos_ops] + [(-1, d) for d in neg_ops]
    if not pairs:
        side = ps.dim * ps.dim
        return DynamicalMap.from_b_form(np.zeros((side, side), dtype=np.complex128))
    return from_kraus_action(pairs)
