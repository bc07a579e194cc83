"""Command-line entry point.

Exit codes: 0 success, 2 usage or precondition failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, Optional

from . import __version__
from .density import moments, mixture_density
from .mixed import ROOT_XTOL, InfeasibleSplitError, QuantizationResult, SolverError
from .oracle import DEFAULT_MAX_ITERS, DEFAULT_RESTARTS, DEFAULT_TOL, lloyd, verify
from .plot import codepoints_svg, density_svg
from .selector import seed_sequence, solve

EXIT_USAGE = 2
EXIT_NUMERIC = 3
TABLE_FIELDS = ("n", "k", "m", "case", "codebook", "error", "oracle_error", "gap", "failure")


class UsageError(Exception):
    pass


def _g17(x: float) -> str:
    return "%.17g" % x


@dataclass(frozen=True)
class TableRow:
    n: int
    k: Optional[int]
    m: Optional[int]
    case: Optional[str]
    codebook: tuple[float, ...]  # left half, plus 3/4 for odd n
    error: Optional[float]
    oracle_error: Optional[float] = None
    gap: Optional[float] = None
    failure: Optional[str] = None

    def to_json(self) -> str:
        rec = asdict(self)
        rec["codebook"] = list(self.codebook)
        return json.dumps(rec)

    @classmethod
    def from_json(cls, line: str) -> "TableRow":
        rec = json.loads(line)
        rec["codebook"] = tuple(rec["codebook"])
        return cls(**rec)

    def to_csv(self) -> list[str]:
        def cell(v):
            if v is None:
                return ""
            return _g17(v) if isinstance(v, float) else str(v)

        return [
            str(self.n), cell(self.k), cell(self.m), cell(self.case),
            " ".join(_g17(x) for x in self.codebook),
            cell(self.error), cell(self.oracle_error), cell(self.gap), cell(self.failure),
        ]

    @classmethod
    def from_csv(cls, cells: list[str]) -> "TableRow":
        n, k, m, case, cb, err, oerr, gap, failure = cells

        def opt(s, conv):
            return conv(s) if s != "" else None

        return cls(
            n=int(n), k=opt(k, int), m=opt(m, int), case=opt(case, str),
            codebook=tuple(float(x) for x in cb.split()),
            error=opt(err, float), oracle_error=opt(oerr, float), gap=opt(gap, float),
            failure=opt(failure, str),
        )


def table_row(n: int, with_oracle: bool = False, restarts: int = DEFAULT_RESTARTS,
              tol: float = DEFAULT_TOL, seed: int = 0) -> TableRow:
    try:
        if with_oracle:
            res, report, _, err_gap = verify(n, restarts=restarts, tol=tol, seed=seed)
            oracle_error, gap = report.error, err_gap
        else:
            res, oracle_error, gap = solve(n), None, None
    except (SolverError, InfeasibleSplitError, ArithmeticError, ValueError) as exc:
        return TableRow(n, None, None, None, (), None, failure=f"{type(exc).__name__}: {exc}")
    return TableRow(n, res.k, res.m, res.case, res.left_half, res.error, oracle_error, gap)


def _row_job(args) -> TableRow:
    return table_row(*args)


def table_rows(lo: int, hi: int, with_oracle: bool = False, jobs: int = 1,
               restarts: int = DEFAULT_RESTARTS, tol: float = DEFAULT_TOL, seed: int = 0) -> Iterator[TableRow]:
    """Rows for ``lo..hi`` in ascending n; content does not depend on ``jobs``."""
    tasks = [(n, with_oracle, restarts, tol, seed) for n in range(lo, hi + 1)]
    if jobs <= 1 or len(tasks) == 1:
        yield from map(_row_job, tasks)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_row_job, tasks)


def write_table(rows: Iterable[TableRow], fmt: str, out) -> None:
    if fmt == "json":
        for row in rows:
            out.write(row.to_json() + "\n")
            out.flush()
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TABLE_FIELDS)
    for row in rows:
        writer.writerow(row.to_csv())
        out.flush()


def read_table(text: str, fmt: str) -> list[TableRow]:
    if fmt == "json":
        return [TableRow.from_json(line) for line in text.splitlines() if line.strip()]
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != TABLE_FIELDS:
        raise ValueError(f"unexpected header {header}")
    return [TableRow.from_csv(cells) for cells in reader]


def result_record(res: QuantizationResult) -> dict:
    return {
        "n": res.n,
        "k": res.k,
        "m": res.m,
        "case": res.case,
        "codebook": list(res.codebook),
        "error": res.error,
        "meta": {"tol": ROOT_XTOL, "version": __version__},
    }


def _text(rec: dict) -> str:
    pts = " ".join("%.6g" % x for x in rec["codebook"])
    return (
        f"n = {rec['n']}\n"
        f"codebook: {pts}\n"
        f"error: {rec['error']:.6g}\n"
        f"split: k={rec['k']} m={rec['m']} case={rec['case']}\n"
    )


# -- commands ------------------------------------------------------------------

def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise UsageError(f"--p must lie in (0, 1), got {p}")


def cmd_quantize(args) -> int:
    _check_p(args.p)
    if args.p != 0.5:
        if args.n > 1:
            raise UsageError(
                f"closed-form optimal sets for n >= 2 exist only for p = 0.5; "
                f"use `mixquant oracle -n {args.n} --p {args.p}` for a numerical answer"
            )
        mean, var = moments(mixture_density(args.p))
        rec = {"n": 1, "k": int(mean <= 0.5), "m": 0, "case": "explicit", "codebook": [mean],
               "error": var, "meta": {"tol": ROOT_XTOL, "version": __version__}}
    else:
        rec = result_record(solve(args.n))
    print(json.dumps(rec) if args.format == "json" else _text(rec), end="\n" if args.format == "json" else "")
    return 0


def cmd_table(args) -> int:
    if args.lo > args.hi:
        raise UsageError(f"--from ({args.lo}) must not exceed --to ({args.hi})")
    rows = table_rows(args.lo, args.hi, args.with_oracle, args.jobs, args.restarts, args.tol, args.seed)
    write_table(rows, args.format, sys.stdout)
    return 0


def cmd_sequence(args) -> int:
    print(seed_sequence(args.n))
    return 0


def cmd_oracle(args) -> int:
    _check_p(args.p)
    rep = lloyd(mixture_density(args.p), args.n, restarts=args.restarts,
                max_iters=args.max_iters, tol=args.tol, seed=args.seed)
    rec = asdict(rep)
    rec["codebook"] = list(rep.codebook)
    if args.format == "json":
        print(json.dumps(rec))
    else:
        print(f"n = {rep.n}\ncodebook: {' '.join('%.6g' % x for x in rep.codebook)}\n"
              f"error: {rep.error:.6g}\nrestart: {rep.restart_index} iterations: {rep.iterations} "
              f"converged: {rep.converged}")
    return 0


def cmd_verify(args) -> int:
    res, rep, point_gap, err_gap = verify(args.n, restarts=args.restarts, tol=args.tol, seed=args.seed)
    rec = {
        "n": args.n,
        "closed_form": result_record(res),
        "oracle": {"codebook": list(rep.codebook), "error": rep.error, "restart_index": rep.restart_index,
                   "iterations": rep.iterations, "converged": rep.converged, "seed": rep.seed, "prng": rep.prng},
        "max_point_gap": point_gap,
        "error_gap": err_gap,
    }
    if args.format == "json":
        print(json.dumps(rec))
    else:
        print(f"n = {args.n}\nclosed-form error: {res.error:.6g}\noracle error: {rep.error:.6g}\n"
              f"error gap: {err_gap:.3g}\nmax point gap: {point_gap:.3g}")
    return 0


def cmd_plot(args) -> int:
    if args.kind == "density":
        _check_p(args.p)
        svg = density_svg(mixture_density(args.p))
    else:
        svg = codepoints_svg([solve(n).codebook for n in range(1, args.max_n + 1)])
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    return 0


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _env_seed() -> int:
    raw = os.environ.get("MIXQUANT_SEED")
    return int(raw) if raw else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixquant", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def oracle_opts(sp):
        sp.add_argument("--restarts", type=_positive, default=DEFAULT_RESTARTS)
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--seed", type=int, default=_env_seed())

    sp = sub.add_parser("quantize", help="optimal codebook and error for n points")
    sp.add_argument("-n", "--n", type=_positive, required=True)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.set_defaults(func=cmd_quantize)

    sp = sub.add_parser("table", help="one row per n")
    sp.add_argument("--from", dest="lo", type=_positive, required=True)
    sp.add_argument("--to", dest="hi", type=_positive, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--with-oracle", action="store_true")
    sp.add_argument("--jobs", type=_positive, default=os.cpu_count() or 1)
    oracle_opts(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("sequence", help="print the seed a(n)")
    sp.add_argument("-n", "--n", type=_positive, required=True)
    sp.set_defaults(func=cmd_sequence)

    sp = sub.add_parser("oracle", help="Lloyd-Max multi-restart quantizer")
    sp.add_argument("-n", "--n", type=_positive, required=True)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--max-iters", type=_positive, default=DEFAULT_MAX_ITERS)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    oracle_opts(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify", help="compare the closed form with Lloyd-Max")
    sp.add_argument("-n", "--n", type=_positive, required=True)
    sp.add_argument("--format", choices=("json", "text"), default="text")
    oracle_opts(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("plot", help="write an SVG figure")
    sp.add_argument("--kind", choices=("codepoints", "density"), default="codepoints")
    sp.add_argument("--max-n", type=_positive, default=9)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mixquant {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, InfeasibleSplitError, ArithmeticError) as exc:
        print(f"mixquant {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
