"""Dense complex linear-algebra kernels shared by every other module.

Index conventions, fixed here once and used everywhere:

* Composite indices pair (system, reservoir) with the reservoir index varying
  fastest: ``(r, a) -> r * dim_reservoir + a``.  ``tensor`` (the Kronecker
  product) and ``partial_trace`` both follow this flattening.
* Eigenvalues are reported in descending order; eigenvector phases are fixed
  so the largest-magnitude entry of each column is real and positive, which
  makes outputs deterministic and comparable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NotHermitian,
    NotOrthonormal,
    NotPseudoOrthonormal,
    NullVectorEncountered,
)

__all__ = [
    "EigenSystem",
    "dagger",
    "frobenius",
    "hermitian_eig",
    "tensor",
    "partial_trace",
    "unitary_completion",
    "pseudo_orthonormal_completion",
]


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(a))


def _as_complex_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix entries must be finite")
    return m


def fix_column_phases(q: np.ndarray) -> np.ndarray:
    """Rescale each column by a unit phase so its largest-magnitude entry is
    real positive.  Zero columns are left untouched."""
    q = np.array(q, dtype=np.complex128, copy=True)
    for j in range(q.shape[1]):
        col = q[:, j]
        i = int(np.argmax(np.abs(col)))
        pivot = col[i]
        if abs(pivot) > 0.0:
            q[:, j] = col * (pivot.conjugate() / abs(pivot))
    return q


@dataclass(frozen=True)
class EigenSystem:
    """Hermitian eigendecomposition with eigenvalues sorted descending.

    Column ``k`` of ``eigenvectors`` is paired with ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(h, tol: float = tolerances.STRUCTURAL) -> EigenSystem:
    """Eigendecompose a hermitian matrix with a deterministic gauge.

    Eigenvalues come back descending.  Within degenerate clusters (gap below
    ``tolerances.DEGENERACY_GAP``) the eigenvector block is re-orthonormalized
    and every column's phase is fixed so its largest entry is real positive.

    Raises NotHermitian if ``h`` deviates from its adjoint beyond ``tol``
    (relative Frobenius), ConvergenceFailure if the underlying iterative
    solver gives up.
    """
    h = _as_complex_matrix(h)
    n, m = h.shape
    if n != m:
        raise DimensionMismatch(f"matrix is {n}x{m}, expected square")
    scale = max(1.0, frobenius(h))
    if frobenius(h - dagger(h)) > tol * scale:
        raise NotHermitian("matrix is not hermitian within tolerance")
    if n == 0:
        return EigenSystem(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    try:
        w, q = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    w = w[::-1].copy()
    q = np.ascontiguousarray(q[:, ::-1]).astype(np.complex128)

    # Re-orthonormalize degenerate clusters so the basis is a clean isometry
    # even when the solver returns slightly skewed degenerate columns.
    start = 0
    for stop in range(1, n + 1):
        if stop == n or w[stop - 1] - w[stop] > tolerances.DEGENERACY_GAP:
            if stop - start > 1:
                block, _ = np.linalg.qr(q[:, start:stop])
                q[:, start:stop] = block
            start = stop
    q = fix_column_phases(q)
    return EigenSystem(w, q)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; entry ``((a,b),(c,d)) = A[a,c] * B[b,d]`` under the
    reservoir-fastest flattening."""
    return np.kron(_as_complex_matrix(a), _as_complex_matrix(b))


def partial_trace(m, dim_system: int, dim_reservoir: int, keep: str = "system") -> np.ndarray:
    """Trace out one tensor factor of a square matrix on system x reservoir.

    ``keep="system"`` returns the dim_system-square matrix with entry
    ``(r, s) = sum_n M[(r,n),(s,n)]``; ``keep="reservoir"`` traces the system
    factor instead.  The total trace is preserved.
    """
    m = _as_complex_matrix(m)
    side = dim_system * dim_reservoir
    if m.shape != (side, side):
        raise DimensionMismatch(
            f"matrix side {m.shape[0]} != dim_system*dim_reservoir = {side}"
        )
    m4 = m.reshape(dim_system, dim_reservoir, dim_system, dim_reservoir)
    if keep == "system":
        return np.einsum("anbn->ab", m4)
    if keep == "reservoir":
        return np.einsum("nanb->ab", m4)
    raise ValueError(f"keep must be 'system' or 'reservoir', got {keep!r}")


def _columns(cols, dim: int) -> np.ndarray:
    """Normalize a column collection (list of vectors or a matrix) to a
    (dim, k) array."""
    if isinstance(cols, np.ndarray) and cols.ndim == 2:
        c = np.asarray(cols, dtype=np.complex128)
    else:
        vecs = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in cols]
        c = (
            np.stack(vecs, axis=1)
            if vecs
            else np.zeros((dim, 0), dtype=np.complex128)
        )
    if c.shape[0] != dim:
        raise DimensionMismatch(f"columns have length {c.shape[0]}, expected {dim}")
    return c


def unitary_completion(cols, dim: int, tol: float = tolerances.STRUCTURAL) -> np.ndarray:
    """Complete orthonormal columns to a full unitary matrix.

    The given columns become the first columns of the result.  Remaining
    columns are produced by Gram-Schmidt over the standard basis, picking at
    each step the basis vector with the largest residual after projection, so
    empty input yields the identity.
    """
    c = _columns(cols, dim)
    k = c.shape[1]
    if k > dim:
        raise DimensionMismatch(f"{k} columns cannot fit in dimension {dim}")
    gram = dagger(c) @ c
    if frobenius(gram - np.eye(k)) > tol:
        raise NotOrthonormal("input columns are not orthonormal within tolerance")

    v = np.zeros((dim, dim), dtype=np.complex128)
    v[:, :k] = c
    basis = np.eye(dim, dtype=np.complex128)
    used = np.zeros(dim, dtype=bool)
    for j in range(k, dim):
        fixed = v[:, :j]
        best_idx, best_norm, best_vec = -1, -1.0, None
        for i in range(dim):
            if used[i]:
                continue
            r = basis[:, i] - fixed @ (dagger(fixed) @ basis[:, i])
            r = r - fixed @ (dagger(fixed) @ r)  # second pass for robustness
            nrm = float(np.linalg.norm(r))
            if nrm > best_norm:
                best_idx, best_norm, best_vec = i, nrm, r
        v[:, j] = best_vec / best_norm
        used[best_idx] = True
    return v


def pseudo_orthonormal_completion(
    cols,
    metric,
    slots=None,
    tol: float = tolerances.STRUCTURAL,
    null_tol: float = 1e-10,
) -> np.ndarray:
    """Complete columns to a matrix V with ``V^dag diag(metric) V = diag(metric)``.

    ``metric`` is a +/-1 signature list.  Each input column must have
    self-product ``v^dag eta v`` equal to the signature of its assigned column
    slot, and the columns must be mutually eta-orthogonal.  ``slots`` fixes
    where the inputs go (default: lowest free slot of matching signature, in
    order).  Remaining slots are filled by indefinite Gram-Schmidt over the
    standard basis, pivoting on the candidate with the largest
    ``|v^dag eta v|`` after projection; a candidate below ``null_tol`` raises
    NullVectorEncountered.

    With an all-positive metric this reduces to :func:`unitary_completion` up
    to column placement.
    """
    eta = np.asarray(metric, dtype=np.float64).reshape(-1)
    dim = eta.shape[0]
    if not np.all(np.abs(eta) == 1.0):
        raise ValueError("metric entries must be +1 or -1")
    c = _columns(cols, dim)
    k = c.shape[1]
    if k > dim:
        raise DimensionMismatch(f"{k} columns cannot fit in dimension {dim}")

    # pseudo-Gram of the inputs
    pg = dagger(c) @ (eta[:, None] * c)

    if slots is None:
        slots = []
        taken = np.zeros(dim, dtype=bool)
        for i in range(k):
            self_prod = float(pg[i, i].real)
            want = 1.0 if self_prod > 0 else -1.0
            free = [j for j in range(dim) if not taken[j] and eta[j] == want]
            if not free:
                raise NotPseudoOrthonormal(
                    "no free metric slot matches an input column's signature"
                )
            slots.append(free[0])
            taken[free[0]] = True
    slots = list(slots)
    if len(slots) != k or len(set(slots)) != k:
        raise ValueError("slots must assign one distinct position per column")

    target = np.diag(eta[slots]) if k else np.zeros((0, 0))
    if frobenius(pg - target) > tol:
        raise NotPseudoOrthonormal(
            "input columns are not pseudo-orthonormal for their assigned slots"
        )

    v = np.zeros((dim, dim), dtype=np.complex128)
    fixed_cols = []
    fixed_signs = []
    for i in range(k):
        v[:, slots[i]] = c[:, i]
        fixed_cols.append(c[:, i])
        fixed_signs.append(eta[slots[i]])

    remaining_pos = [j for j in range(dim) if j not in slots and eta[j] > 0]
    remaining_neg = [j for j in range(dim) if j not in slots and eta[j] < 0]
    pool = [i for i in range(dim)]

    def project_out(vec):
        r = vec.astype(np.complex128).copy()
        for _ in range(2):  # two passes keep the projection tight
            for w, s in zip(fixed_cols, fixed_signs):
                r = r - s * w * (np.vdot(w, eta * r))
        return r

    while remaining_pos or remaining_neg:
        best = None
        for i in pool:
            r = project_out(np.eye(dim, dtype=np.complex128)[:, i])
            q = float(np.vdot(r, eta * r).real)
            if best is None or abs(q) > abs(best[1]):
                best = (i, q, r)
        idx, q, r = best
        if abs(q) < null_tol:
            raise NullVectorEncountered(
                f"completion candidate has |v^dag eta v| = {abs(q):.3e}"
            )
        sign = 1.0 if q > 0 else -1.0
        bucket = remaining_pos if sign > 0 else remaining_neg
        if not bucket:
            raise NullVectorEncountered(
                "candidate signature has no remaining metric slot"
            )
        slot = bucket.pop(0)
        w = r / np.sqrt(abs(q))
        v[:, slot] = w
        fixed_cols.append(w)
        fixed_signs.append(sign)
        pool.remove(idx)

    return v
