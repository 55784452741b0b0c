"""Command-line front end: generate states, reconstruct, verify, compare.

Exit codes: 0 success, 2 usage error, 3 file/parse error, 4 check or
comparison failure, 5 optimizer non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .hilbert import (
    DensityMatrix,
    haar_random_basis,
    random_density_matrix,
    standard_basis,
)
from .reconstruct import (
    ConvergenceError,
    ImplicitConfig,
    explicit_reconstruct,
    explicit_reconstruct_real,
    haar_average_reconstruct,
    implicit_reconstruct,
    pauli_reconstruct_2d,
    transition_matrix,
)
from .serialize import (
    dump_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    oracle_table_from_json,
)
from .valuation import (
    ExactOracle,
    NoisyOracle,
    OracleLookupError,
    TabulatedOracle,
    ValuationOracle,
)
from .verify import (
    check_additivity,
    check_basis_independence,
    check_density,
    check_haar_moment,
    check_unistochastic,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CHECK = 4
EXIT_NO_CONVERGENCE = 5

METHODS = ("explicit", "explicit-real", "implicit", "haar-average", "pauli2d")
SUITES = ("density", "additivity", "haar-moment", "basis-independence", "unistochastic", "all")


class UsageError(Exception):
    pass


def _load_matrix(path: str) -> np.ndarray:
    obj = load_json(path)
    if isinstance(obj, dict) and "repaired" in obj and "method" in obj:
        return matrix_from_json(obj["repaired"])
    if isinstance(obj, dict):
        return matrix_from_json(obj)
    raise ValueError(f"{path}: not a matrix or reconstruction report file")


def _build_oracle(args, field: str) -> ValuationOracle:
    obj = load_json(args.infile)
    if isinstance(obj, list):
        if args.shots:
            raise UsageError("--shots applies to generated states, not oracle tables")
        vectors, values = oracle_table_from_json(obj)
        return TabulatedOracle(vectors, values, field=field)
    state = DensityMatrix(matrix_from_json(obj))
    if args.shots:
        return NoisyOracle(state, shots=args.shots, seed=args.seed, field=field)
    return ExactOracle(state, field=field)


def _write_or_print(obj: dict | list, out: str | None) -> None:
    if out:
        dump_json(obj, out)
    else:
        print(json.dumps(obj, indent=2))


def cmd_gen(args) -> int:
    rank = args.rank if args.rank is not None else args.dim
    state = random_density_matrix(args.dim, rank, args.seed, field=args.field)
    dump_json(matrix_to_json(state.matrix), args.out)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    field = "real" if args.method == "explicit-real" else "complex"
    oracle = _build_oracle(args, field)
    if args.method == "pauli2d" and oracle.dim != 2:
        raise UsageError("method pauli2d requires dim 2")
    basis = standard_basis(oracle.dim)
    if args.method == "explicit":
        report = explicit_reconstruct(oracle, basis)
    elif args.method == "explicit-real":
        report = explicit_reconstruct_real(oracle, basis)
    elif args.method == "pauli2d":
        report = pauli_reconstruct_2d(oracle, basis)
    elif args.method == "implicit":
        cfg = ImplicitConfig(seed=args.seed)
        if args.tol is not None:
            cfg = ImplicitConfig(tol=args.tol, seed=args.seed)
        report = implicit_reconstruct(oracle, cfg)
    elif args.method == "haar-average":
        report = haar_average_reconstruct(oracle, args.num_bases, args.seed)
    else:  # unreachable given argparse choices
        raise UsageError(f"unknown method {args.method}")
    _write_or_print(report.to_json(), args.out)
    if args.out:
        print(f"{report.method}: {report.query_count} queries, "
              f"residual {report.residual:.3e} -> {args.out}")
    return EXIT_OK


def _verify_reports(args) -> list:
    suites = [args.suite] if args.suite != "all" else [
        "density", "additivity", "basis-independence", "unistochastic", "haar-moment"
    ]
    reports = []
    raw = None
    if args.infile:
        raw = matrix_from_json(load_json(args.infile))

    # oracle-backed suites need a valid state; density deliberately does not
    def state() -> DensityMatrix:
        if raw is None:
            raise UsageError(f"suite {suite} needs --in")
        return DensityMatrix(raw)

    for suite in suites:
        if suite == "density":
            if raw is None:
                raise UsageError("suite density needs --in")
            reports.append(check_density(raw, args.tol or 1e-10))
        elif suite == "additivity":
            oracle: ValuationOracle
            if args.shots:
                oracle = NoisyOracle(state(), shots=args.shots, seed=args.seed)
                tol = args.tol if args.tol is not None else 5 / np.sqrt(args.shots)
            else:
                oracle = ExactOracle(state())
                tol = args.tol if args.tol is not None else 1e-10
            trials = args.num_bases or 100
            reports.append(check_additivity(oracle, trials, args.seed, tol))
        elif suite == "basis-independence":
            oracle = ExactOracle(state())
            # pairwise comparisons are quadratic in the basis count, so the
            # shared --num-bases knob only applies when this suite runs alone
            count = args.num_bases if (args.num_bases and args.suite != "all") else 5
            reports.append(
                check_basis_independence(oracle, count, args.seed, args.tol or 1e-10)
            )
        elif suite == "haar-moment":
            dim = args.dim or (raw.shape[0] if raw is not None else None)
            if dim is None:
                raise UsageError("suite haar-moment needs --dim or --in")
            reports.append(check_haar_moment(dim, args.num_bases or 100_000, args.seed))
        elif suite == "unistochastic":
            dim = args.dim or (raw.shape[0] if raw is not None else None)
            if dim is None:
                raise UsageError("suite unistochastic needs --dim or --in")
            s = transition_matrix(
                haar_random_basis(dim, args.seed),
                haar_random_basis(dim, args.seed + 1),
            )
            reports.append(check_unistochastic(s, args.tol or 1e-12))
    return reports


def cmd_verify(args) -> int:
    reports = _verify_reports(args)
    width = max(len(r.check) for r in reports)
    for r in reports:
        status = "ok  " if r.passed else "FAIL"
        print(f"{r.check:<{width}}  {status}  deviation={r.deviation:.3e}  "
              f"tolerance={r.tolerance:.3e}")
    payload = [r.to_json() for r in reports]
    print(json.dumps(payload))
    if args.out:
        dump_json(payload, args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def cmd_compare(args) -> int:
    a = _load_matrix(args.path_a)
    b = _load_matrix(args.path_b)
    if a.shape != b.shape:
        raise UsageError(f"shape mismatch: {a.shape} vs {b.shape}")
    distance = float(np.linalg.norm(a - b))
    print(f"frobenius_distance {distance:.17e}")
    return EXIT_OK if distance <= args.tol else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gleason",
        description="Reconstruct density matrices from ray-valuation oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random density matrix file")
    p_gen.add_argument("--dim", type=int, required=True)
    p_gen.add_argument("--rank", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--field", choices=("complex", "real"), default="complex")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_rec = sub.add_parser(
        "reconstruct",
        help="reconstruct a state from a valuation oracle",
        description="Reads either a density-matrix file (valuated exactly, or "
        "with binomial shot noise when --shots > 0) or a tabulated-oracle "
        "file. Basis-driven methods query the standard basis, so tabulated "
        "oracles must cover its query set.",
    )
    p_rec.add_argument("--method", choices=METHODS, required=True)
    p_rec.add_argument("--in", dest="infile", required=True)
    p_rec.add_argument("--shots", type=int, default=0,
                       help="0 queries the state exactly")
    p_rec.add_argument("--seed", type=int, default=0)
    p_rec.add_argument("--num-bases", type=int, default=1000,
                       help="sample count for method haar-average")
    p_rec.add_argument("--tol", type=float, default=None,
                       help="sweep tolerance for method implicit")
    p_rec.add_argument("--out", default=None)
    p_rec.set_defaults(func=cmd_reconstruct)

    p_ver = sub.add_parser("verify", help="run identity checks")
    p_ver.add_argument("--suite", choices=SUITES, required=True)
    p_ver.add_argument("--in", dest="infile", default=None)
    p_ver.add_argument("--dim", type=int, default=None)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--shots", type=int, default=0)
    p_ver.add_argument("--num-bases", type=int, default=None,
                       help="trial/sample/basis count, per suite")
    p_ver.add_argument("--tol", type=float, default=None)
    p_ver.add_argument("--out", default=None)
    p_ver.set_defaults(func=cmd_verify)

    p_cmp = sub.add_parser("compare", help="Frobenius distance of two matrix files")
    p_cmp.add_argument("path_a")
    p_cmp.add_argument("path_b")
    p_cmp.add_argument("--tol", type=float, default=1e-10)
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (OracleLookupError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
