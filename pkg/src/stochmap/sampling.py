"""Seeded random generators for states, unitaries, and map ensembles.

Every generator owns its randomness through an explicit seed and is
deterministic per seed.  Three map ensembles cover the classification lattice:
completely positive (normalized random operator families), positive but not
completely positive (transpose-and-noise compositions dressed with random
unitaries, certified by classification with bounded rejection), and plain
hermiticity-preserving trace-preserving (random hermitian Choi forms projected
onto the trace condition).
"""

from __future__ import annotations

import numpy as np

from .errors import BadArguments, SamplingBudgetExhausted
from .linalg import dagger, hermitian_eig
from .maps import (
    DynamicalMap,
    classify,
    convex_combine,
    depolarizing_map,
    from_kraus_action,
    transpose_map,
    unitary_conjugation_map,
)

__all__ = [
    "random_unitary",
    "random_cp_map",
    "random_ncp_map",
    "random_hermiticity_preserving_map",
    "random_signed_family",
    "random_trace_preserving_map",
]


def _ginibre(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(dim: int, seed=None, rng=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    if rng is None:
        rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


def _inverse_sqrt(h: np.ndarray) -> np.ndarray:
    eig = hermitian_eig((h + dagger(h)) / 2.0)
    w = np.clip(eig.eigenvalues, 1e-14, None)
    q = eig.eigenvectors
    return (q / np.sqrt(w)[None, :]) @ dagger(q)


def random_signed_family(dim: int, m: int, n: int, seed: int):
    """Random operator families (C_1..C_m, D_1..D_n) satisfying
    ``sum C^dag C - sum D^dag D = identity`` exactly up to rounding.

    The negative family is scaled down until the signed Gram sum is positive
    definite, then the whole family is normalized by its inverse square root.
    """
    if m < 1 or n < 0:
        raise BadArguments("need m >= 1 and n >= 0")
    rng = np.random.default_rng(seed)
    cs = [_ginibre(rng, dim, dim) for _ in range(m)]
    ds = [_ginibre(rng, dim, dim) for _ in range(n)]
    gram_pos = sum(dagger(c) @ c for c in cs)
    if ds:
        gram_neg = sum(dagger(d) @ d for d in ds)
        lo = float(np.linalg.eigvalsh((gram_pos + dagger(gram_pos)) / 2.0)[0])
        hi = float(np.linalg.eigvalsh((gram_neg + dagger(gram_neg)) / 2.0)[-1])
        eps = 0.5 * np.sqrt(lo / max(hi, 1e-300))
        ds = [eps * d for d in ds]
        total = gram_pos - (eps ** 2) * gram_neg
    else:
        total = gram_pos
    x = _inverse_sqrt(total)
    return [c @ x for c in cs], [d @ x for d in ds]


def random_cp_map(dim: int, kraus_count: int, seed: int) -> DynamicalMap:
    """Random completely positive trace-preserving map from a normalized
    operator family."""
    cs, _ = random_signed_family(dim, kraus_count, 0, seed)
    return from_kraus_action([(+1, c) for c in cs])


def random_trace_preserving_map(dim: int, m: int, n: int, seed: int) -> DynamicalMap:
    """Random trace-preserving map built from a signed family of the given
    sizes.  With n = 0 the result is completely positive; with n >= 1 it is
    generically not."""
    cs, ds = random_signed_family(dim, m, n, seed)
    return from_kraus_action([(+1, c) for c in cs] + [(-1, d) for d in ds])


def random_hermiticity_preserving_map(dim: int, seed: int) -> DynamicalMap:
    """Random hermiticity-preserving trace-preserving map: a Gaussian
    hermitian Choi form shifted so its output-factor partial trace is the
    identity."""
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, dim * dim, dim * dim)
    b = (g + dagger(g)) / (2.0 * dim)
    b4 = b.reshape(dim, dim, dim, dim)
    t = np.einsum("nanb->ab", b4)
    correction = np.kron(np.eye(dim), (t - np.eye(dim)) / dim)
    return DynamicalMap.from_b_form(b - correction)


def random_ncp_map(
    dim: int,
    seed: int,
    max_tries: int = 200,
    restarts: int = 12,
) -> DynamicalMap:
    """Random positive-but-not-completely-positive trace-preserving map.

    Draws compositions ``conj_U2 . transpose . depolarize(q) . conj_U1``
    (positive and trace-preserving by construction), optionally blended with a
    random completely positive map, and keeps a draw only when classification
    certifies CP false and block-positive true.  Raises
    SamplingBudgetExhausted when ``max_tries`` draws all fail.
    """
    if dim < 2:
        raise BadArguments("dim must be at least 2")
    rng = np.random.default_rng(seed)
    q_max = dim / (dim + 1.0) - 0.05
    for _ in range(max_tries):
        q = float(rng.uniform(0.0, q_max))
        u1 = random_unitary(dim, rng=rng)
        u2 = random_unitary(dim, rng=rng)
        a = (
            unitary_conjugation_map(u2).a_form
            @ transpose_map(dim).a_form
            @ depolarizing_map(q, dim).a_form
            @ unitary_conjugation_map(u1).a_form
        )
        candidate = DynamicalMap.from_a_form(a)
        blend = float(rng.uniform(0.0, 0.3))
        if blend > 1e-3:
            cp_part = random_cp_map(dim, dim, int(rng.integers(2 ** 31)))
            candidate = convex_combine([candidate, cp_part], [1.0 - blend, blend])
        verdict = classify(candidate, restarts=restarts, seed=int(rng.integers(2 ** 31)))
        if verdict.completely_positive is False and verdict.block_positive:
            return candidate
    raise SamplingBudgetExhausted(
        f"no acceptable draw within {max_tries} tries (dim={dim}, seed={seed})"
    )
