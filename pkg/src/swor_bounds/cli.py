"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 domain error (including a
bound evaluated outside its hypotheses), 3 usage or parse error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core_types import (
    BinParams,
    BoundsError,
    DomainError,
    HGParams,
    Population,
    UsageError,
    parse_number,
)
from .figures import COLUMNS, FIGURES, GridSpec, crossover, figure_rows
from .kernels import BACKEND
from .majorization import MAX_ENUM_N, kemperman_majorize, sub_majorize, verify_convex_order
from .oracle import bernoulli_decomposition, hg_pmf, hg_tail, tv_distance, ehm_tv_bound
from .rank_tests import KINDS, build_setup, figure5_curves
from .registry import (
    INPUT_KIND,
    BoundId,
    MatrixInput,
    PopInput,
    evaluate,
    evaluate_grid,
    hypergeometric_population,
    input_for,
)
from . import verify as verify_mod

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, Fraction):
        return repr(float(v))
    return str(v)


def write_csv(path: str, header: Sequence[str], rows) -> None:
    """Write all rows to a temporary file, then rename it over ``path``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(c) for c in row])
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_text(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def read_population(path: str) -> Population:
    try:
        return Population.from_text(_read_text(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def read_matrix(path: str) -> np.ndarray:
    rows = []
    for line in _read_text(path).splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                rows.append([float(parse_number(t)) for t in line.replace(",", " ").split()])
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"{path}: cannot parse row {line!r}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise UsageError(f"{path}: score matrix must be square")
    return np.array(rows)


# --- input assembly -------------------------------------------------------------

def _add_input_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--n", type=int, help="sample size")
    g.add_argument("--D", type=int, help="successes in the population")
    g.add_argument("--N", type=int, help="population size")
    g.add_argument("--p", help="success probability for binomial bounds (p/q allowed)")
    g.add_argument("--pop", help="population file: one number per line, '#' comments, p/q allowed")
    g.add_argument("--matrix", help="score matrix file: whitespace or comma separated rows")
    g.add_argument("--delta", type=float, help="delta for bm_general (default 1e-7)")
    o = p.add_argument_group("bound options")
    o.add_argument("--t", type=float, help="event level for talagrand_hyper_ii")
    o.add_argument("--K2", type=float, help="constant for talagrand_bin_iii (default 1)")
    o.add_argument("--mu0", type=float, help="truncation level for D/N in the Talagrand bounds")
    o.add_argument("--psi0", type=float, help="truncation level for n/N in the Talagrand bounds")
    o.add_argument("--b-minus-a", type=float, dest="b_minus_a", help="override the population range")


def build_input(bound: BoundId, a) -> tuple:
    """(BoundInput, descriptor string) from parsed flags."""
    kind = INPUT_KIND[bound]
    if kind is HGParams:
        _need(a, "n", "D", "N")
        return HGParams(a.n, a.D, a.N), f"n={a.n};D={a.D};N={a.N}"
    if kind is BinParams:
        _need(a, "n")
        if a.p is not None:
            p = Fraction(parse_number(a.p)) if "/" in a.p else Fraction(a.p)
        elif a.D is not None and a.N is not None:
            p = Fraction(a.D, a.N)
        else:
            raise UsageError("binomial bounds need --p or --D and --N")
        return BinParams(a.n, p), f"n={a.n};p={p}"
    if kind is PopInput:
        _need(a, "n")
        if a.pop:
            pop = read_population(a.pop)
            desc = f"pop={a.pop};n={a.n}"
        else:
            _need(a, "D", "N")
            pop = hypergeometric_population(a.D, a.N)
            desc = f"n={a.n};D={a.D};N={a.N}"
        if a.delta is not None:
            desc += f";delta={a.delta!r}"
        return PopInput(pop, a.n, a.delta), desc
    n = a.n if a.n is not None else 1
    if a.matrix:
        return MatrixInput(read_matrix(a.matrix), n), f"matrix={a.matrix};n={n}"
    _need(a, "n", "D", "N")
    return input_for(bound, a.n, a.D, a.N), f"serfling_matrix;n={a.n};D={a.D};N={a.N}"


def _need(a, *names) -> None:
    missing = [f"--{x}" for x in names if getattr(a, x) is None]
    if missing:
        raise UsageError("missing " + ", ".join(missing))


def _opts(a) -> dict:
    return dict(t=a.t, K2=a.K2, mu0=a.mu0, psi0=a.psi0, b_minus_a=a.b_minus_a)


def _bound_id(text: str) -> BoundId:
    try:
        return BoundId(text)
    except ValueError:
        raise UsageError(f"unknown bound {text!r}; choose from {', '.join(b.value for b in BoundId)}")


# --- commands ---------------------------------------------------------------------

def cmd_eval(a) -> int:
    bound = _bound_id(a.bound)
    inp, _ = build_input(bound, a)
    bv = evaluate(bound, inp, a.lam, **_opts(a))
    print(f"{bound.value} {fmt(bv.raw)} {fmt(bv.clamped)} {fmt(bv.domain_ok)}")
    if not bv.domain_ok:
        print(f"domain: {bv.domain_msg}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_sweep(a) -> int:
    if a.steps < 2 or not a.lambda_min < a.lambda_max:
        raise UsageError("sweep needs --steps >= 2 and --lambda-min < --lambda-max")
    lams = np.linspace(a.lambda_min, a.lambda_max, a.steps)
    rows = []
    for name in a.bounds:
        bound = _bound_id(name)
        inp, desc = build_input(bound, a)
        raw, ok, _ = evaluate_grid(bound, inp, lams, **_opts(a))
        for lam, r, o in zip(lams, raw, ok):
            rows.append((bound.value, desc, float(lam), float(r), min(float(r), 1.0), bool(o)))
    header = ("bound_id", "input", "lambda", "raw", "clamped", "domain_ok")
    if a.out:
        write_csv(a.out, header, rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(c) for c in row])
    return EXIT_OK


def cmd_figure(a) -> int:
    spec = GridSpec(a.lambda_min, a.lambda_max, a.steps)
    rows = figure_rows(a.figure, spec)
    write_csv(a.out, COLUMNS, (r.cells() for r in rows))
    print(f"wrote {len(rows)} rows to {a.out}")
    return EXIT_OK


def cmd_crossover(a) -> int:
    roots = crossover(_bound_id(a.bound_a), _bound_id(a.bound_b), a.n, a.D, a.N,
                      lo=a.lo, hi=a.hi, scan=a.scan)
    print(" ".join(fmt(r) for r in roots) if roots else "none")
    return EXIT_OK


def cmd_oracle(a) -> int:
    params = HGParams(a.n, a.D, a.N)
    if a.what in ("pmf", "tail"):
        if a.k is None:
            raise UsageError("--k is required")
        p = hg_pmf(params, a.k) if a.what == "pmf" else hg_tail(params, a.k)
        print(f"{p.num}/{p.den} {fmt(p.float_shadow)}")
    elif a.what == "tv":
        p = tv_distance(params)
        print(f"{p.num}/{p.den} {fmt(p.float_shadow)} ehm_bound={fmt(ehm_tv_bound(params))}")
    else:
        print(" ".join(fmt(x) for x in bernoulli_decomposition(params)))
    return EXIT_OK


def cmd_major(a) -> int:
    pop = read_population(a.input)
    if a.action == "run":
        res = kemperman_majorize(pop)
        sub = sub_majorize(pop)
        print(f"ones={res.ones} zeros={res.zeros} exceptional={_show(res.exceptional)} "
              f"index={res.exceptional_index} D_major={res.D_major} alpha={_show(res.alpha)} "
              f"sub_ones={sum(1 for v in sub.values if v == 1)}")
        if a.out:
            write_csv(a.out, ("index", "input", "majorized", "sub_majorized"),
                      ((i, _show(x), _show(y), _show(z)) for i, (x, y, z)
                       in enumerate(zip(pop.values, res.output.values, sub.values))))
        return EXIT_OK
    if a.n is None:
        raise UsageError("verify-order needs --n")
    res = kemperman_majorize(pop)
    targets = {"major": res.output, "submajor": sub_majorize(pop)}
    bad = 0
    # sub-majorization only orders increasing convex functions
    for label, fam in (("major", a.family), ("submajor", "increasing")):
        rep = verify_convex_order(pop, targets[label], a.n, fam)
        status = "ok" if rep.ok else "VIOLATION"
        print(f"{label}: {status} checks={rep.checks} worst_margin={fmt(rep.worst_margin)}")
        for v in rep.violations:
            bad += 1
            print(f"  {v.phi}: lhs={fmt(v.lhs)} rhs={fmt(v.rhs)}")
    return EXIT_FAIL if bad else EXIT_OK


def _show(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, Fraction):
        return str(v)
    return fmt(v)


def cmd_ranktest(a) -> int:
    setup = build_setup(a.kind, a.n, a.m)
    pop = setup.population
    res = kemperman_majorize(pop.shifted_unit())
    print(f"kind={setup.kind} n={setup.n} m={setup.m} N={setup.N} "
          f"null_mean={fmt(float(setup.null_mean))} null_var={fmt(float(setup.null_var))}")
    print(f"a={fmt(float(pop.a))} b={fmt(float(pop.b))} ones={res.ones} zeros={res.zeros} "
          f"exceptional={_show(res.exceptional)}")
    if a.figure5:
        rows = figure5_curves(a.kind, a.n, a.m, fixture=a.fixture)
        write_csv(a.figure5, COLUMNS, (("fig5", f"{a.kind} {r['curve']}", r["lambda"], r["raw"],
                                        r["clamped"], r["domain_ok"]) for r in rows))
        print(f"wrote {len(rows)} rows to {a.figure5}")
    return EXIT_OK


def cmd_verify(a) -> int:
    reports = verify_mod.run(a.suite)
    for rep in reports:
        print("\n".join(rep.lines()))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


# --- parser -------------------------------------------------------------------------

def _add_eval(sub) -> None:
    p = sub.add_parser("eval", help="evaluate one bound at one lambda")
    p.add_argument("bound")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    _add_input_args(p)
    p.set_defaults(func=cmd_eval)


def _add_sweep(sub) -> None:
    p = sub.add_parser("sweep", help="evaluate bounds over a lambda grid, CSV output")
    p.add_argument("bounds", nargs="+")
    p.add_argument("--lambda-min", type=float, default=0.0)
    p.add_argument("--lambda-max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    _add_input_args(p)
    p.set_defaults(func=cmd_sweep)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="swor-bounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _add_eval(sub)
    _add_sweep(sub)
    bounds = sub.add_parser("bounds", help="alias group for eval and sweep")
    bsub = bounds.add_subparsers(dest="bounds_command", required=True, parser_class=_Parser)
    _add_eval(bsub)
    _add_sweep(bsub)

    p = sub.add_parser("figure", help="write the curves of a comparison figure as CSV")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--out", required=True)
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--steps", type=int)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("crossover", help="lambdas where two bounds swap order")
    p.add_argument("bound_a")
    p.add_argument("bound_b")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=3.0)
    p.add_argument("--scan", type=int, default=200)
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("oracle", help="exact hypergeometric quantities")
    p.add_argument("what", choices=("pmf", "tail", "tv", "decompose"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("major", help="Kemperman majorization of a population file")
    p.add_argument("action", choices=("run", "verify-order"))
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--family", choices=("increasing", "convex"), default="increasing")
    p.add_argument("--out", help="CSV of the input and both majorizing populations")
    p.set_defaults(func=cmd_major)

    p = sub.add_parser("ranktest", help="Wilcoxon / Klotz score populations")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--figure5", help="write the bound comparison curves to this CSV")
    p.add_argument("--fixture", action="store_true", help="use the rounded range b - a = 8.29 for klotz")
    p.set_defaults(func=cmd_ranktest)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("suite", choices=("kernels", "dominance", "orders", "all"))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
