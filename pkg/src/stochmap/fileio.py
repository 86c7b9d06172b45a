"""JSON matrix interchange format.

Plain matrix kinds (``density``, ``map_a``, ``map_b``, ``unitary``) carry a
``dim`` header and a row-major nested array of ``[re, im]`` pairs.  Structured
kinds (``decomposition``, ``dilation``, ``parameters``) nest the same encoding
per field.  All numbers must be finite; floats serialize with Python's
shortest round-trip representation, so write-then-read is bit-exact.

The action form is the canonical on-disk map representation; ``map_b`` files
are accepted and converted on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .decomposition import CanonicalDecomposition
from .dilation import Dilation
from .errors import FileFormatError
from .maps import DynamicalMap
from .states import ReservoirState, mixed_reservoir

__all__ = [
    "MatrixFile",
    "PLAIN_KINDS",
    "matrix_to_data",
    "data_to_matrix",
    "write_matrix_file",
    "read_matrix_file",
    "load_map",
    "write_decomposition",
    "read_decomposition",
    "write_dilation",
    "read_dilation",
]

PLAIN_KINDS = ("density", "map_a", "map_b", "unitary")
ALL_KINDS = PLAIN_KINDS + ("decomposition", "dilation", "parameters")


@dataclass(frozen=True)
class MatrixFile:
    """Parsed plain matrix file."""

    kind: str
    dim: int
    matrix: np.ndarray
    metadata: dict = field(default_factory=dict)


def matrix_to_data(m: np.ndarray) -> list:
    """Nested row-major [re, im] pairs."""
    m = np.asarray(m, dtype=np.complex128)
    out = []
    for row in m:
        out.append([[float(z.real), float(z.imag)] for z in row])
    return out


def data_to_matrix(data, context: str = "data") -> np.ndarray:
    """Parse nested [re, im] pairs, checking shape regularity and finiteness."""
    if not isinstance(data, list) or not data:
        raise FileFormatError(f"{context}: expected a non-empty nested array")
    rows = len(data)
    cols = None
    out = np.zeros((rows, len(data[0]) if isinstance(data[0], list) else 0),
                   dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list):
            raise FileFormatError(f"{context}: row {i} is not an array")
        if cols is None:
            cols = len(row)
            out = np.zeros((rows, cols), dtype=np.complex128)
        if len(row) != cols:
            raise FileFormatError(f"{context}: row {i} has ragged length")
        for j, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
            ):
                raise FileFormatError(f"{context}: entry ({i},{j}) is not an [re, im] pair")
            re, im = float(pair[0]), float(pair[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise FileFormatError(f"{context}: entry ({i},{j}) is not finite")
            out[i, j] = re + 1j * im
    return out


def _expected_side(kind: str, dim: int) -> int:
    return dim if kind in ("density", "unitary") else dim * dim


def _dump(path, payload) -> None:
    text = json.dumps(payload, indent=1, allow_nan=False)
    Path(path).write_text(text + "\n")


def _load(path) -> dict:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: JSON parse error at position {exc.pos}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    return payload


def write_matrix_file(path, kind: str, matrix, metadata=None) -> None:
    """Write a plain matrix file of the given kind."""
    if kind not in PLAIN_KINDS:
        raise FileFormatError(f"unknown plain kind {kind!r}")
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise FileFormatError(f"matrix must be square, got {m.shape}")
    side = m.shape[0]
    if kind in ("density", "unitary"):
        dim = side
    else:
        dim = int(round(side ** 0.5))
        if dim * dim != side:
            raise FileFormatError(f"supermatrix side {side} is not a perfect square")
    if not np.all(np.isfinite(m)):
        raise FileFormatError("matrix entries must be finite")
    _dump(path, {
        "kind": kind,
        "dim": dim,
        "data": matrix_to_data(m),
        "metadata": dict(metadata or {}),
    })


def read_matrix_file(path) -> MatrixFile:
    """Read and validate a plain matrix file."""
    payload = _load(path)
    kind = payload.get("kind")
    if kind not in PLAIN_KINDS:
        raise FileFormatError(f"{path}: kind {kind!r} is not a plain matrix kind")
    dim = payload.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise FileFormatError(f"{path}: bad dim {dim!r}")
    matrix = data_to_matrix(payload.get("data"), context=str(path))
    side = _expected_side(kind, dim)
    if matrix.shape != (side, side):
        raise FileFormatError(
            f"{path}: data shape {matrix.shape} does not match kind={kind}, dim={dim}"
        )
    metadata = payload.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise FileFormatError(f"{path}: metadata must be an object")
    return MatrixFile(kind=kind, dim=dim, matrix=matrix, metadata=metadata)


def load_map(path) -> DynamicalMap:
    """Load a map file; Choi-form files are converted to action form."""
    mf = read_matrix_file(path)
    if mf.kind == "map_a":
        return DynamicalMap.from_a_form(mf.matrix)
    if mf.kind == "map_b":
        return DynamicalMap.from_b_form(mf.matrix)
    raise FileFormatError(f"{path}: kind {mf.kind!r} is not a map")


def write_decomposition(path, dec: CanonicalDecomposition, metadata=None) -> None:
    _dump(path, {
        "kind": "decomposition",
        "dim": dec.dim,
        "eigenvalues": [float(x) for x in dec.eigenvalues],
        "zero_count": dec.zero_count,
        "m": dec.m,
        "n": dec.n,
        "positive_ops": [matrix_to_data(c) for c in dec.positive_ops],
        "negative_ops": [matrix_to_data(d) for d in dec.negative_ops],
        "metadata": dict(metadata or {}),
    })


def read_decomposition(path) -> CanonicalDecomposition:
    payload = _load(path)
    if payload.get("kind") != "decomposition":
        raise FileFormatError(f"{path}: not a decomposition file")
    dim = payload.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise FileFormatError(f"{path}: bad dim {dim!r}")
    try:
        eigenvalues = np.asarray([float(x) for x in payload["eigenvalues"]])
        zero_count = int(payload["zero_count"])
        pos = [data_to_matrix(d, "positive_ops") for d in payload["positive_ops"]]
        neg = [data_to_matrix(d, "negative_ops") for d in payload["negative_ops"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    for op in (*pos, *neg):
        if op.shape != (dim, dim):
            raise FileFormatError(f"{path}: operator shape {op.shape} != ({dim},{dim})")
    return CanonicalDecomposition(
        dim=dim, positive_ops=pos, negative_ops=neg,
        eigenvalues=eigenvalues, zero_count=zero_count,
    )


def write_dilation(path, dil: Dilation, metadata=None) -> None:
    _dump(path, {
        "kind": "dilation",
        "dim_system": dil.dim_system,
        "dim_reservoir": dil.dim_reservoir,
        "v": matrix_to_data(dil.v),
        "metric": [int(x) for x in dil.metric],
        "reservoir": {
            "eigenvalues": [float(x) for x in dil.reservoir.eigenvalues],
            "eigenbasis": matrix_to_data(dil.reservoir.eigenbasis),
            "metric_signature": [int(x) for x in dil.reservoir.metric_signature],
        },
        "kraus_column_map": dil.kraus_column_map,
        "metadata": dict(metadata or {}),
    })


def read_dilation(path) -> Dilation:
    payload = _load(path)
    if payload.get("kind") != "dilation":
        raise FileFormatError(f"{path}: not a dilation file")
    try:
        d = int(payload["dim_system"])
        r = int(payload["dim_reservoir"])
        v = data_to_matrix(payload["v"], "v")
        metric = np.asarray([int(x) for x in payload["metric"]], dtype=np.int64)
        res = payload["reservoir"]
        reservoir = mixed_reservoir(
            [float(x) for x in res["eigenvalues"]],
            data_to_matrix(res["eigenbasis"], "reservoir.eigenbasis"),
            np.asarray([int(x) for x in res["metric_signature"]], dtype=np.int64),
        )
        column_map = payload.get("kraus_column_map") or {}
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    if v.shape != (d * r, d * r):
        raise FileFormatError(f"{path}: evolution shape {v.shape} != ({d * r},{d * r})")
    if metric.shape != (d * r,) or not np.all(np.abs(metric) == 1):
        raise FileFormatError(f"{path}: metric must be a +/-1 list of length {d * r}")
    return Dilation(
        dim_system=d, dim_reservoir=r, v=v, metric=metric,
        reservoir=reservoir, kraus_column_map=column_map,
    )
