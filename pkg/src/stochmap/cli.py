"""Command-line surface.

``stochmap <command> [flags]`` with commands validate, classify, decompose,
parameterize, dilate, contract, mix, apply, random.  JSON reports go to
stdout, a short human summary to stderr.

Exit codes: 0 success, 1 I/O or parse error, 2 constraint or precondition
violation, 3 algorithmic failure (optimizer, completion, or sampling).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fileio, tolerances
from .decomposition import decompose, reconstruct, verify_trace_condition
from .dilation import contract, dilate, induced_map
from .errors import (
    ConvergenceFailure,
    FileFormatError,
    InsufficientOperators,
    NullVectorEncountered,
    SamplingBudgetExhausted,
    SinhDegenerate,
    StochmapError,
)
from .linalg import dagger, frobenius
from .maps import (
    apply_map,
    check_hermiticity_preserving,
    check_trace_preserving,
    classify,
    convex_combine,
)
from .parameterization import parameterize
from .sampling import (
    random_cp_map,
    random_hermiticity_preserving_map,
    random_ncp_map,
)
from .states import new_density

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONSTRAINT = 2
EXIT_ALGORITHM = 3

_ALGORITHMIC = (
    ConvergenceFailure,
    NullVectorEncountered,
    InsufficientOperators,
    SinhDegenerate,
    SamplingBudgetExhausted,
)


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=1, allow_nan=False))


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _load_density(path, tol):
    mf = fileio.read_matrix_file(path)
    if mf.kind != "density":
        raise FileFormatError(f"{path}: expected a density file, got kind {mf.kind!r}")
    return new_density(mf.matrix, tol=tol.structural, tol_sign=tol.sign)


class _Tols:
    def __init__(self, structural, sign):
        self.structural = structural
        self.sign = sign


def cmd_validate(args, tol) -> int:
    mf = fileio.read_matrix_file(args.path)
    checks = []
    info = {}
    if mf.kind == "density":
        m = mf.matrix
        trace_res = abs(complex(np.trace(m)) - 1.0)
        herm_res = frobenius(m - dagger(m))
        min_eig = float(np.linalg.eigvalsh((m + dagger(m)) / 2.0)[0])
        checks = [
            {"name": "trace", "residual": trace_res, "pass": trace_res <= tol.structural},
            {"name": "hermiticity", "residual": herm_res, "pass": herm_res <= tol.structural},
            {"name": "positivity", "residual": min_eig, "pass": min_eig >= -tol.sign},
        ]
    elif mf.kind in ("map_a", "map_b"):
        dyn = fileio.load_map(args.path)
        herm_ok, herm_res = check_hermiticity_preserving(dyn, tol.structural)
        trace_ok, trace_res = check_trace_preserving(dyn, tol.structural)
        checks = [
            {"name": "hermiticity_preserving", "residual": herm_res, "pass": herm_ok},
            {"name": "trace_preserving", "residual": trace_res, "pass": trace_ok},
        ]
        if herm_ok:
            verdict = classify(dyn, restarts=args.restarts, seed=args.seed,
                               tol=tol.structural, tol_sign=tol.sign)
            info["classification"] = verdict.to_json_dict()
    elif mf.kind == "unitary":
        res = frobenius(dagger(mf.matrix) @ mf.matrix - np.eye(mf.dim))
        checks = [{"name": "unitarity", "residual": res, "pass": res <= tol.structural}]
    all_pass = all(c["pass"] for c in checks)
    _emit({"file": str(args.path), "kind": mf.kind, "checks": checks, **info})
    for c in checks:
        _say(f"{c['name']}: {'pass' if c['pass'] else 'FAIL'} (residual {c['residual']:.3e})")
    return EXIT_OK if all_pass else EXIT_CONSTRAINT


def cmd_classify(args, tol) -> int:
    dyn = fileio.load_map(args.path)
    verdict = classify(dyn, restarts=args.restarts, seed=args.seed,
                       tol=tol.structural, tol_sign=tol.sign)
    _emit(verdict.to_json_dict())
    _say(
        f"hermiticity {verdict.hermiticity_preserving}, trace {verdict.trace_preserving}, "
        f"cp {verdict.completely_positive}, block_positive {verdict.block_positive}"
    )
    return EXIT_OK


def cmd_decompose(args, tol) -> int:
    dyn = fileio.load_map(args.path)
    dec = decompose(dyn, tol_sign=tol.sign)
    ok, residual, _, _ = verify_trace_condition(dec, tol=tol.structural)
    rebuilt = reconstruct(dec)
    round_trip = frobenius(rebuilt.b_form - dyn.b_form) / max(1.0, frobenius(dyn.b_form))
    out_dir = Path(args.out) if args.out else Path(args.path).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / (Path(args.path).stem + ".decomposition.json")
    fileio.write_decomposition(out_path, dec, metadata={"source": str(args.path)})
    _emit({
        "file": str(args.path),
        "out": str(out_path),
        "m": dec.m,
        "n": dec.n,
        "zero_count": dec.zero_count,
        "eigenvalues": [float(x) for x in dec.eigenvalues],
        "trace_condition": {"pass": ok, "residual": residual},
        "round_trip_residual": round_trip,
    })
    _say(f"m={dec.m} n={dec.n}; trace-condition residual {residual:.3e}; "
         f"round-trip residual {round_trip:.3e}")
    return EXIT_OK


def cmd_parameterize(args, tol) -> int:
    dyn = fileio.load_map(args.path)
    herm_ok, _ = check_hermiticity_preserving(dyn, tol.structural)
    trace_ok, trace_res = check_trace_preserving(dyn, tol.structural)
    if not herm_ok or not trace_ok:
        _say(f"precondition failed: hermiticity {herm_ok}, trace {trace_ok} "
             f"(trace residual {trace_res:.3e})")
        return EXIT_CONSTRAINT
    dec = decompose(dyn, tol_sign=tol.sign)
    ps = parameterize(dec, tol=tol.sign)
    _emit(ps.to_json_dict())
    _say(f"m={ps.m} n={ps.n}; attained {ps.attained_parameter_count} parameters "
         f"(bound {ps.parameter_count_bound}); reconstruction residual "
         f"{ps.reconstruction_residual:.3e}")
    return EXIT_OK


def cmd_dilate(args, tol) -> int:
    dyn = fileio.load_map(args.path)
    dec = decompose(dyn, tol_sign=tol.sign)
    dil = dilate(dec, tol=tol.sign)
    rebuilt = induced_map(dil)
    round_trip = frobenius(rebuilt.b_form - dyn.b_form) / max(1.0, frobenius(dyn.b_form))
    out_dir = Path(args.out) if args.out else Path(args.path).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / (Path(args.path).stem + ".dilation.json")
    fileio.write_dilation(out_path, dil, metadata={"source": str(args.path)})
    _emit({
        "file": str(args.path),
        "out": str(out_path),
        "kind": "unitary" if bool(np.all(dil.metric > 0)) else "pseudo_unitary",
        "dim_reservoir": dil.dim_reservoir,
        "metric_signature": [int(x) for x in dil.reservoir.metric_signature],
        "isometry_residual": dil.isometry_residual(),
        "round_trip_residual": round_trip,
    })
    _say(f"reservoir dim {dil.dim_reservoir}; round-trip residual {round_trip:.3e}")
    return EXIT_OK


def cmd_contract(args, tol) -> int:
    dil = fileio.read_dilation(args.dilation)
    rho = _load_density(args.state, tol)
    out = contract(dil, rho)
    try:
        new_density(out, tol=tol.structural, tol_sign=tol.sign)
        valid, reason = True, None
    except StochmapError as exc:
        valid, reason = False, type(exc).__name__
    _emit({
        "dilation": str(args.dilation),
        "state": str(args.state),
        "result": fileio.matrix_to_data(out),
        "density_valid": valid,
        "density_violation": reason,
    })
    _say(f"contraction {'is' if valid else 'is NOT'} a valid density matrix")
    return EXIT_OK


def cmd_mix(args, tol) -> int:
    try:
        weights = [float(w) for w in args.weights.split(",")]
    except ValueError as exc:
        raise FileFormatError(f"bad --weights: {exc}") from exc
    maps = [fileio.load_map(p) for p in args.paths]
    mixed = convex_combine(maps, weights)
    out_path = args.out or "mixed.map_a.json"
    fileio.write_matrix_file(out_path, "map_a", mixed.a_form,
                             metadata={"weights": weights, "sources": list(args.paths)})
    _emit({"out": str(out_path), "components": len(maps), "meta": mixed.meta})
    _say(f"wrote mixture of {len(maps)} maps to {out_path}")
    return EXIT_OK


def cmd_apply(args, tol) -> int:
    dyn = fileio.load_map(args.map)
    rho = _load_density(args.state, tol)
    out = apply_map(dyn, rho)
    if args.out:
        fileio.write_matrix_file(args.out, "density", out,
                                 metadata={"map": str(args.map), "state": str(args.state)})
    _emit({"map": str(args.map), "state": str(args.state),
           "result": fileio.matrix_to_data(out)})
    _say("applied map to state")
    return EXIT_OK


def cmd_random(args, tol) -> int:
    if args.dim < 2:
        raise FileFormatError("--dim must be at least 2")
    if args.kind == "cp":
        dyn = random_cp_map(args.dim, args.kraus or args.dim, args.seed)
    elif args.kind == "ncp":
        dyn = random_ncp_map(args.dim, args.seed, max_tries=args.max_tries)
    else:
        dyn = random_hermiticity_preserving_map(args.dim, args.seed)
    fileio.write_matrix_file(args.out, "map_a", dyn.a_form, metadata={
        "generator": "stochmap random",
        "kind": args.kind,
        "seed": args.seed,
        "dim": args.dim,
    })
    _emit({"out": str(args.out), "kind": args.kind, "dim": args.dim, "seed": args.seed})
    _say(f"wrote {args.kind} map to {args.out}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochmap",
        description="Stochastic maps on density matrices: validation, "
                    "classification, decomposition, parameterization, dilation.",
    )
    parser.add_argument("--tolerance-structural", type=float,
                        default=tolerances.STRUCTURAL,
                        help="relative Frobenius tolerance for residual checks")
    parser.add_argument("--tolerance-sign", type=float, default=tolerances.SIGN,
                        help="absolute tolerance for eigenvalue-sign decisions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the constraints of a matrix file")
    p.add_argument("path")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="full classification of a map file")
    p.add_argument("path")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("decompose", help="canonical operator decomposition")
    p.add_argument("path")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("parameterize", help="angles and parameter counts")
    p.add_argument("path")
    p.set_defaults(func=cmd_parameterize)

    p = sub.add_parser("dilate", help="unitary or pseudo-unitary dilation")
    p.add_argument("path")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("contract", help="contract a dilation against a state")
    p.add_argument("dilation")
    p.add_argument("state")
    p.set_defaults(func=cmd_contract)

    p = sub.add_parser("mix", help="convex mixture of map files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--weights", required=True, help="comma-separated weights")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("apply", help="apply a map file to a density file")
    p.add_argument("map")
    p.add_argument("state")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("random", help="generate a random map file")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--kind", choices=("cp", "ncp", "hermpres"), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kraus", type=int, default=None,
                   help="operator count for --kind cp (default: dim)")
    p.add_argument("--max-tries", type=int, default=200,
                   help="rejection budget for --kind ncp")
    p.set_defaults(func=cmd_random)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    tol = _Tols(args.tolerance_structural, args.tolerance_sign)
    try:
        return args.func(args, tol)
    except FileFormatError as exc:
        _say(f"error: {exc}")
        return EXIT_IO
    except OSError as exc:
        _say(f"error: {exc}")
        return EXIT_IO
    except _ALGORITHMIC as exc:
        _say(f"algorithmic failure: {type(exc).__name__}: {exc}")
        return EXIT_ALGORITHM
    except StochmapError as exc:
        _say(f"constraint violation: {type(exc).__name__}: {exc}")
        return EXIT_CONSTRAINT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
