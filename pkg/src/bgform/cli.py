"""Command-line interface.

Exit codes: 0 ok, 2 breakdown, 3 degraded result, 64 parse or usage error,
65 structural precondition violated (odd dimension, wrong structure).
"""
from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import _backend
from .arme import (
    DEGRADED_THRESHOLD,
    ArmeProblem,
    StructureError,
    arme_residual,
    arme_solve,
)
from .matrix import MatrixParseError, format_matrix, frobenius_norm, read_matrix, write_matrix
from .reduction import DEFAULT_TOL, HOUSEHOLDER, SIGN_CONVENTIONS, VARIANTS, BreakdownError, reduce
from .structure import DEFAULT_STRUCTURE_TOL, BlockMat, classify, gen_hamiltonian, gen_skew_hamiltonian

EXIT_OK = 0
EXIT_BREAKDOWN = 2
EXIT_DEGRADED = 3
EXIT_PARSE = 64
EXIT_STRUCTURE = 65

BENCH_HEADER = [
    "n", "seed", "variant", "passes", "s21_residual", "symplectic_dev",
    "arme_residual", "breakdown", "wall_time_ms",
]

GENERATORS = {
    "skew-hamiltonian": gen_skew_hamiltonian,
    "hamiltonian": gen_hamiltonian,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _load_block(path: str) -> BlockMat:
    try:
        s = read_matrix(path)
    except MatrixParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_PARSE) from None
    if s.rows != s.cols or s.rows % 2:
        raise CliError(
            f"{path}: expected an even-dimension square matrix, got {s.rows}x{s.cols}",
            EXIT_STRUCTURE,
        )
    return BlockMat.from_full(s)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


# commands -------------------------------------------------------------------

def cmd_check(args) -> int:
    s = _load_block(args.path)
    print(_dump(classify(s, args.tol).to_dict()))
    return EXIT_OK


def _reduction_is_degraded(res) -> bool:
    rep = res.report
    bound = DEGRADED_THRESHOLD * max(1.0, res.original.norm())
    return max(rep.s21_below_diag_norm, rep.s11_below_subdiag_norm) > bound or (
        rep.symplectic_dev > DEGRADED_THRESHOLD
    )


def cmd_reduce(args) -> int:
    s = _load_block(args.path)
    res = reduce(s, args.variant, args.tol, sign=args.householder_sign, passes=args.passes)
    report = res.report.to_dict()
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_matrix(out / "s_prime.txt", res.reduced.to_full())
        write_matrix(out / "left.txt", res.transform.left)
        write_matrix(out / "y.txt", res.transform.y)
        if args.write_u:
            write_matrix(out / "u.txt", res.transform.assemble_u())
        (out / "report.json").write_text(_dump(report) + "\n", encoding="utf-8")
    print(_dump(report))
    if res.report.breakdown is not None:
        return EXIT_BREAKDOWN
    return EXIT_DEGRADED if _reduction_is_degraded(res) else EXIT_OK


def cmd_solve_arme(args) -> int:
    s = _load_block(args.path)
    try:
        problem = ArmeProblem(s, args.structure_tol)
    except StructureError as exc:
        raise CliError(f"{args.path}: {exc}", EXIT_STRUCTURE) from None
    try:
        sol = arme_solve(problem, args.variant, args.tol, args.householder_sign, args.passes)
    except BreakdownError as exc:
        payload = {"status": "breakdown", "report": exc.partial.report.to_dict()}
        code = EXIT_BREAKDOWN
    else:
        if args.out:
            write_matrix(args.out, sol.y)
        payload = sol.to_dict()
        code = EXIT_OK if sol.ok else EXIT_DEGRADED
    if args.report:
        Path(args.report).write_text(_dump(payload) + "\n", encoding="utf-8")
    print(_dump(payload))
    return code


def cmd_gen(args) -> int:
    s = GENERATORS[args.kind](args.n, args.seed).to_full()
    if args.out:
        write_matrix(args.out, s)
    else:
        sys.stdout.write(format_matrix(s))
    return EXIT_OK


@dataclass
class BenchRecord:
    n: int
    seed: int
    variant: str
    passes: int
    s21_residual: float
    symplectic_dev: float
    arme_residual: float
    breakdown: bool
    wall_time_ms: float


def bench_cell(n: int, seed: int, variant: str, passes: int, sign: str = "stable") -> BenchRecord:
    """One benchmark cell on ``gen_skew_hamiltonian(n, seed)``.

    Residuals are relative to ``max(1, |S|_F)``: ``s21_residual`` is the full
    reduced (2,1) block (zero in exact arithmetic), ``arme_residual`` the ARME
    residual of the returned ``Y`` against the original matrix.
    """
    s = gen_skew_hamiltonian(n, seed)
    t0 = time.perf_counter()
    res = reduce(s, variant, sign=sign, passes=passes)
    elapsed = (time.perf_counter() - t0) * 1e3
    scale = max(1.0, s.norm())
    _, resid = arme_residual(res.transform.y, s)
    return BenchRecord(
        n=n,
        seed=seed,
        variant=variant,
        passes=passes,
        s21_residual=frobenius_norm(res.reduced.s21) / scale,
        symplectic_dev=res.report.symplectic_dev,
        arme_residual=resid / scale,
        breakdown=res.report.breakdown is not None,
        wall_time_ms=elapsed,
    )


def run_bench(n_min, n_max, trials, variant=HOUSEHOLDER, passes=1, seed=0, jobs=1,
              sign="stable") -> list[BenchRecord]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    cells = [(n, sd) for n in range(n_min, n_max + 1) for sd in range(seed, seed + trials)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda c: bench_cell(c[0], c[1], variant, passes, sign), cells))
    else:
        records = [bench_cell(n, sd, variant, passes, sign) for n, sd in cells]
    return sorted(records, key=lambda r: (r.n, r.seed))


def write_bench_csv(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for r in records:
        writer.writerow([
            r.n, r.seed, r.variant, r.passes,
            f"{r.s21_residual:.6e}", f"{r.symplectic_dev:.6e}", f"{r.arme_residual:.6e}",
            int(r.breakdown), f"{r.wall_time_ms:.3f}",
        ])


def bench_summary(records) -> list[dict]:
    by_n: dict[int, list[BenchRecord]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r)
    return [
        {
            "n": n,
            "median_s21_residual": statistics.median(r.s21_residual for r in rows),
            "median_arme_residual": statistics.median(r.arme_residual for r in rows),
            "max_arme_residual": max(r.arme_residual for r in rows),
            "breakdowns": sum(r.breakdown for r in rows),
        }
        for n, rows in sorted(by_n.items())
    ]


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise CliError("--trials must be >= 1", EXIT_PARSE)
    if args.n_min > args.n_max:
        raise CliError("--n-min must not exceed --n-max", EXIT_PARSE)
    records = run_bench(args.n_min, args.n_max, args.trials, args.variant, args.passes,
                        args.seed, args.jobs, args.householder_sign)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_bench_csv(records, fh)
    else:
        write_bench_csv(records, sys.stdout)
    for row in bench_summary(records):
        print(
            "n={n:3d}  median s21 {median_s21_residual:.3e}  median arme {median_arme_residual:.3e}"
            "  max arme {max_arme_residual:.3e}  breakdowns {breakdowns}".format(**row),
            file=sys.stderr,
        )
    return EXIT_OK


# parser ----------------------------------------------------------------------

def _add_reduction_flags(p) -> None:
    p.add_argument("--variant", choices=VARIANTS, default=HOUSEHOLDER)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                   help="relative threshold for 'already reduced' and breakdown tests")
    p.add_argument("--passes", type=_positive_int, default=1)
    p.add_argument("--householder-sign", choices=SIGN_CONVENTIONS, default="stable",
                   help="stable: s = sign(x1)|x|; paper: s = +|x|")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bgform", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", choices=_backend.available_backends(),
                        help="kernel backend (default: compiled when available)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="print structure report as JSON")
    p.add_argument("path")
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_STRUCTURE_TOL)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="reduce to Bunse-Gerstner form")
    p.add_argument("path")
    _add_reduction_flags(p)
    p.add_argument("--out-dir", help="write s_prime.txt, left.txt, y.txt, report.json here")
    p.add_argument("--write-u", action="store_true", help="also write the dense U as u.txt")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve-arme", help="solve the antisymmetric Riccati equation")
    p.add_argument("path")
    _add_reduction_flags(p)
    p.add_argument("--out", help="file for the solution Y")
    p.add_argument("--report", help="file for the JSON report")
    p.add_argument("--structure-tol", type=_positive_float, default=DEFAULT_STRUCTURE_TOL)
    p.set_defaults(func=cmd_solve_arme)

    p = sub.add_parser("gen", help="generate a random structured matrix")
    p.add_argument("--kind", choices=sorted(GENERATORS), default="skew-hamiltonian")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="residual growth benchmark on random skew-Hamiltonian input")
    p.add_argument("--n-min", type=_positive_int, default=4)
    p.add_argument("--n-max", type=_positive_int, default=16)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="first seed; trials use seed..seed+trials-1")
    p.add_argument("--variant", choices=VARIANTS, default=HOUSEHOLDER)
    p.add_argument("--passes", type=_positive_int, default=1)
    p.add_argument("--householder-sign", choices=SIGN_CONVENTIONS, default="stable")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        _backend.set_backend(args.backend)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"bgform: {exc}", file=sys.stderr)
        return exc.code
