"""Dynamical maps in action form and Choi form.

A map is stored twice: the action supermatrix ``a_form`` with row pair
``(r, s)`` and column pair ``(r', s')`` so that ``(A rho)_{rs} =
A[(r,s),(r',s')] rho_{r's'}``, and the Choi-form matrix ``b_form`` obtained by
swapping the inner indices, ``B[(r,r'),(s,s')] = A[(r,s),(r',s')]``.  Both use
the flattening ``(x, y) -> x*N + y``.  The swap is a pure entry permutation,
an involution, and keeps the two forms bitwise consistent.

The Choi form carries the structure: it is hermitian exactly when the map
preserves hermiticity, positive semidefinite exactly when the map is
completely positive, and its partial trace over the output factor is the
identity exactly when the map preserves trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .errors import (
    BadWeights,
    DimensionMismatch,
    NotHermiticityPreserving,
    NotPerfectSquare,
)
from .linalg import dagger, frobenius
from .states import DensityMatrix

__all__ = [
    "DynamicalMap",
    "MapClassification",
    "BlockPositivityCertificate",
    "reshuffle",
    "from_kraus_action",
    "apply_map",
    "check_hermiticity_preserving",
    "check_trace_preserving",
    "is_completely_positive",
    "is_block_positive",
    "classify",
    "convex_combine",
    "identity_map",
    "transpose_map",
    "depolarizing_map",
    "unitary_conjugation_map",
    "tensor_with_identity",
    "maximally_entangled_projector",
]


def _square_root_side(side: int) -> int:
    n = int(round(side ** 0.5))
    if n * n != side:
        raise NotPerfectSquare(f"supermatrix side {side} is not a perfect square")
    return n


def reshuffle(s) -> np.ndarray:
    """Swap the inner indices of a supermatrix:
    ``out[(a,b),(c,d)] = in[(a,c),(b,d)]``.

    Converts action form to Choi form and back; applying it twice returns the
    original bitwise (it only moves entries).
    """
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {s.shape}")
    n = _square_root_side(s.shape[0])
    return np.ascontiguousarray(
        s.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
    )


@dataclass(frozen=True)
class DynamicalMap:
    """A linear map on N x N matrices, held in both forms."""

    dim: int
    a_form: np.ndarray
    b_form: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_a_form(cls, a, meta=None) -> "DynamicalMap":
        a = np.ascontiguousarray(np.asarray(a, dtype=np.complex128))
        n = _square_root_side(a.shape[0])
        if a.shape != (n * n, n * n):
            raise DimensionMismatch(f"supermatrix must be square, got {a.shape}")
        return cls(dim=n, a_form=a, b_form=reshuffle(a), meta=meta or {})

    @classmethod
    def from_b_form(cls, b, meta=None) -> "DynamicalMap":
        b = np.ascontiguousarray(np.asarray(b, dtype=np.complex128))
        n = _square_root_side(b.shape[0])
        if b.shape != (n * n, n * n):
            raise DimensionMismatch(f"supermatrix must be square, got {b.shape}")
        return cls(dim=n, a_form=reshuffle(b), b_form=b, meta=meta or {})


def from_kraus_action(operators) -> DynamicalMap:
    """Map built from signed operator conjugations:
    ``rho -> sum_k sign_k * Op_k rho Op_k^dag``.

    ``operators`` is a sequence of ``(sign, matrix)`` pairs with sign +1 or -1
    and all matrices N x N.
    """
    ops = []
    signs = []
    for sign, op in operators:
        if sign not in (+1, -1):
            raise DimensionMismatch(f"sign must be +1 or -1, got {sign}")
        op = np.asarray(op, dtype=np.complex128)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise DimensionMismatch(f"operator must be square, got {op.shape}")
        ops.append(op)
        signs.append(float(sign))
    if not ops:
        raise DimensionMismatch("at least one operator is required")
    n = ops[0].shape[0]
    if any(op.shape != (n, n) for op in ops):
        raise DimensionMismatch("all operators must share the same dimension")
    b = np.zeros((n * n, n * n), dtype=np.complex128)
    for sign, op in zip(signs, ops):
        v = op.reshape(-1)
        b += sign * np.outer(v, v.conj())
    return DynamicalMap.from_b_form(b)


def apply_map(m: DynamicalMap, rho) -> np.ndarray:
    """Act on a state: ``(A rho)_{rs} = A[(r,s),(r',s')] rho_{r's'}``.

    Accepts a DensityMatrix or a bare matrix; returns a bare matrix since the
    output of a non-positive map need not be a state.
    """
    if isinstance(rho, DensityMatrix):
        rho = rho.matrix
    rho = np.asarray(rho, dtype=np.complex128)
    n = m.dim
    if rho.shape != (n, n):
        raise DimensionMismatch(f"state shape {rho.shape} != ({n},{n})")
    return (m.a_form @ rho.reshape(-1)).reshape(n, n)


def check_hermiticity_preserving(m: DynamicalMap, tol: float = tolerances.STRUCTURAL):
    """Hermiticity preservation = hermiticity of the Choi form.
    Returns (flag, residual)."""
    b = m.b_form
    residual = frobenius(b - dagger(b))
    return residual <= tol * max(1.0, frobenius(b)), residual


def check_trace_preserving(m: DynamicalMap, tol: float = tolerances.STRUCTURAL):
    """Trace preservation = the output-factor partial trace of the Choi form
    equals the identity.  Returns (flag, residual)."""
    n = m.dim
    b4 = m.b_form.reshape(n, n, n, n)
    t = np.einsum("nanb->ab", b4)
    residual = frobenius(t - np.eye(n))
    return residual <= tol * max(1.0, frobenius(m.b_form)), residual


def choi_spectrum(m: DynamicalMap) -> np.ndarray:
    """Spectrum of the (hermitized) Choi form, descending."""
    b = m.b_form
    return np.linalg.eigvalsh((b + dagger(b)) / 2.0)[::-1]


def is_completely_positive(m: DynamicalMap, tol_sign: float = tolerances.SIGN):
    """Complete positivity = positive semidefinite Choi form.
    Returns (flag, min_choi_eigenvalue); requires hermiticity preservation."""
    ok, _ = check_hermiticity_preserving(m)
    if not ok:
        raise NotHermiticityPreserving("Choi form is not hermitian")
    w = choi_spectrum(m)
    return bool(w[-1] >= -tol_sign), float(w[-1])


@dataclass(frozen=True)
class BlockPositivityCertificate:
    """Audit trail of the product-vector minimization."""

    restarts: int
    starts_total: int
    converged: int
    best_start: int
    skipped: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "starts_total": self.starts_total,
            "converged": self.converged,
            "best_start": self.best_start,
            "skipped": self.skipped,
        }


def _product_form_min(b4: np.ndarray, v0: np.ndarray, max_iter: int = 200):
    """Alternating minimization of ``f(x, v) = sum conj(x_r v_a) B4[r,a,s,b]
    x_s v_b`` over unit vectors.  Each half-step solves a hermitian
    eigenproblem exactly, so f never increases."""
    v = v0 / np.linalg.norm(v0)
    f_prev = np.inf
    for _ in range(max_iter):
        h = np.einsum("a,rasb,b->rs", v.conj(), b4, v)
        w, q = np.linalg.eigh((h + dagger(h)) / 2.0)
        x = q[:, 0]
        g = np.einsum("r,rasb,s->ab", x.conj(), b4, x)
        w, q = np.linalg.eigh((g + dagger(g)) / 2.0)
        v = q[:, 0]
        f = float(w[0])
        if abs(f_prev - f) <= 1e-13 * max(1.0, abs(f)):
            return f, True
        f_prev = f
    return f_prev, False


def is_block_positive(
    m: DynamicalMap,
    restarts: int = 50,
    seed: int = 0,
    tol_sign: float = tolerances.SIGN,
):
    """Heuristic positivity check: minimize the Choi form over factorizable
    vectors ``u_{rr'} = x_r conj(y_{r'})`` by alternating eigen-minimization.

    Starts from every standard basis vector plus ``restarts`` random unit
    vectors.  Returns (flag, found_minimum, certificate); a true flag means no
    negative expectation was found, which is a one-sided verdict.
    """
    ok, _ = check_hermiticity_preserving(m)
    if not ok:
        raise NotHermiticityPreserving("Choi form is not hermitian")
    n = m.dim
    b = (m.b_form + dagger(m.b_form)) / 2.0
    b4 = b.reshape(n, n, n, n)
    rng = np.random.default_rng(seed)
    starts = [np.eye(n, dtype=np.complex128)[:, j] for j in range(n)]
    for _ in range(restarts):
        starts.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    best, best_idx, converged = np.inf, -1, 0
    for idx, v0 in enumerate(starts):
        f, conv = _product_form_min(b4, v0)
        converged += int(conv)
        if f < best:
            best, best_idx = f, idx
    cert = BlockPositivityCertificate(
        restarts=restarts,
        starts_total=len(starts),
        converged=converged,
        best_start=best_idx,
    )
    return bool(best >= -tol_sign), float(best), cert


@dataclass(frozen=True)
class MapClassification:
    """Joint result of the structural checks on one map.

    CP and block-positivity fields are None when hermiticity preservation
    fails, since neither notion applies.  By construction a completely
    positive verdict forces the block-positive flag, with the minimum Choi
    eigenvalue recorded as the witness.
    """

    hermiticity_preserving: bool
    hermiticity_residual: float
    trace_preserving: bool
    trace_residual: float
    completely_positive: bool | None
    choi_min: float | None
    choi_spectrum: np.ndarray | None
    block_positive: bool | None
    block_minimum: float | None
    certificate: BlockPositivityCertificate | None

    def to_json_dict(self) -> dict:
        return {
            "hermiticity_preserving": self.hermiticity_preserving,
            "hermiticity_residual": self.hermiticity_residual,
            "trace_preserving": self.trace_preserving,
            "trace_residual": self.trace_residual,
            "cp": self.completely_positive,
            "choi_min": self.choi_min,
            "choi_spectrum": None
            if self.choi_spectrum is None
            else [float(x) for x in self.choi_spectrum],
            "block_positive": self.block_positive,
            "block_minimum": self.block_minimum,
            "certificate": None if self.certificate is None else self.certificate.to_json_dict(),
        }


def classify(
    m: DynamicalMap,
    restarts: int = 50,
    seed: int = 0,
    tol: float = tolerances.STRUCTURAL,
    tol_sign: float = tolerances.SIGN,
) -> MapClassification:
    """Run all four structural checks.  Individual failures are recorded, not
    raised.  The product-vector optimizer is skipped when the map is already
    completely positive."""
    herm_ok, herm_res = check_hermiticity_preserving(m, tol)
    trace_ok, trace_res = check_trace_preserving(m, tol)
    if not herm_ok:
        return MapClassification(
            hermiticity_preserving=False,
            hermiticity_residual=herm_res,
            trace_preserving=trace_ok,
            trace_residual=trace_res,
            completely_positive=None,
            choi_min=None,
            choi_spectrum=None,
            block_positive=None,
            block_minimum=None,
            certificate=None,
        )
    spectrum = choi_spectrum(m)
    choi_min = float(spectrum[-1])
    cp = bool(choi_min >= -tol_sign)
    if cp:
        block_ok, block_min = True, choi_min
        cert = BlockPositivityCertificate(
            restarts=0, starts_total=0, converged=0, best_start=-1,
            skipped="completely positive; Choi minimum is the witness",
        )
    else:
        block_ok, block_min, cert = is_block_positive(
            m, restarts=restarts, seed=seed, tol_sign=tol_sign
        )
    return MapClassification(
        hermiticity_preserving=True,
        hermiticity_residual=herm_res,
        trace_preserving=trace_ok,
        trace_residual=trace_res,
        completely_positive=cp,
        choi_min=choi_min,
        choi_spectrum=spectrum,
        block_positive=block_ok,
        block_minimum=block_min,
        certificate=cert,
    )


def convex_combine(maps, weights) -> DynamicalMap:
    """Convex mixture of maps, combined on the Choi form.

    Weights must be nonnegative and sum to one within 1e-12.  Mixtures of more
    components than N^2 are legal but flagged in ``meta['exceeds_component_bound']``.
    """
    maps = list(maps)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if len(maps) == 0 or w.shape[0] != len(maps):
        raise BadWeights("need one weight per map")
    if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
        raise BadWeights(f"weights must be nonnegative and sum to 1, got sum {np.sum(w)!r}")
    n = maps[0].dim
    if any(mp.dim != n for mp in maps):
        raise DimensionMismatch("all maps must share the same dimension")
    b = np.zeros_like(maps[0].b_form)
    for wi, mp in zip(w, maps):
        b += wi * mp.b_form
    meta = {
        "components": len(maps),
        "exceeds_component_bound": len(maps) > n * n,
    }
    return DynamicalMap.from_b_form(b, meta=meta)


# -- standard map constructors -------------------------------------------------

def identity_map(dim: int) -> DynamicalMap:
    """The map rho -> rho."""
    return DynamicalMap.from_a_form(np.eye(dim * dim, dtype=np.complex128))


def transpose_map(dim: int) -> DynamicalMap:
    """The map rho -> rho^T: positive but not completely positive."""
    a = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for r in range(dim):
        for s in range(dim):
            a[r * dim + s, s * dim + r] = 1.0
    return DynamicalMap.from_a_form(a)


def depolarizing_map(p: float, dim: int = 2) -> DynamicalMap:
    """rho -> (1-p) rho + p tr(rho) I/dim.  Completely positive for
    0 <= p <= dim^2 / (dim^2 - 1)."""
    n = dim
    a = (1.0 - p) * np.eye(n * n, dtype=np.complex128)
    for r in range(n):
        for rp in range(n):
            a[r * n + r, rp * n + rp] += p / n
    return DynamicalMap.from_a_form(a)


def unitary_conjugation_map(u) -> DynamicalMap:
    """rho -> U rho U^dag."""
    return from_kraus_action([(+1, u)])


def maximally_entangled_projector(dim: int) -> np.ndarray:
    """Unnormalized projector |Phi><Phi| with |Phi> = sum_i e_i (x) e_i."""
    phi = np.eye(dim, dtype=np.complex128).reshape(-1)
    return np.outer(phi, phi.conj())


def tensor_with_identity(m: DynamicalMap, dim_ancilla: int) -> DynamicalMap:
    """Extend a map to act as ``m (x) id`` on system (x) ancilla, with the
    composite index (system, ancilla), ancilla fastest."""
    n = m.dim
    a4 = m.a_form.reshape(n, n, n, n)  # [r, s, r', s']
    d = dim_ancilla
    eye = np.eye(d)
    big = np.einsum("rspq,km,lo->rkslpmqo", a4, eye, eye)
    side = n * d
    return DynamicalMap.from_a_form(big.reshape(side * side, side * side))
