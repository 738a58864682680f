"""Command-line front end.

Exit codes: 0 success, 1 a requested verification failed, 2 usage error
(argparse's default), 3 the solver failed to produce an optimum.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import asymptotics, lpmodel, lpsolve, report
from .elimination import STRATEGIES, eliminate, growth_factor, wilkinson_matrix
from .matrix import load_matrix, random_matrix
from .scalars import MODES, RATIONAL_REAL

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _add_instance_flags(p, with_n: bool = True) -> None:
    if with_n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--program", choices=("wilkinson", "geomean", "improved"),
                   default="improved")
    p.add_argument("--selector", choices=lpmodel.SELECTORS, default="band")
    p.add_argument("--band-width", type=int, default=lpmodel.DEFAULT_BAND_WIDTH)
    p.add_argument("--precision-bits", type=int, default=lpmodel.DEFAULT_PRECISION_BITS)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="growthbound",
        description="Certified growth-factor bounds for complete-pivoting elimination.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="solve one instance and report the bound")
    _add_instance_flags(p)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("certify", help="write or check a dual certificate")
    p.add_argument("--check", metavar="PATH", help="verify an existing certificate file")
    _add_instance_flags(p, with_n=False)
    p.add_argument("--n", type=int)
    p.add_argument("--out", help="certificate path (default certificate-n<N>.json)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("ge", help="elimination utilities")
    ge_sub = p.add_subparsers(dest="ge_command", required=True)
    g = ge_sub.add_parser("run", help="eliminate a matrix and report pivots and growth")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix-file", help="text matrix file")
    src.add_argument("--wilkinson", type=int, metavar="N")
    src.add_argument("--random", type=int, metavar="N")
    g.add_argument("--strategy", choices=STRATEGIES, default="complete")
    g.add_argument("--mode", choices=MODES, default=RATIONAL_REAL,
                   help="scalar mode for generated matrices")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--format", choices=("text", "json"), default="text")
    g.set_defaults(func=cmd_ge_run)

    p = sub.add_parser("figure", help="reproduce the experiment figures")
    fig_sub = p.add_subparsers(dest="figure_command", required=True)

    f = fig_sub.add_parser("growth-bounds", help="bound comparison sweep")
    f.add_argument("--nmax", type=int, default=1000)
    f.add_argument("--points", type=int, default=40)
    f.add_argument("--selector", choices=lpmodel.SELECTORS, default="band")
    f.add_argument("--band-width", type=int, default=lpmodel.DEFAULT_BAND_WIDTH)
    f.add_argument("--certify", action="store_true")
    f.add_argument("--out", default="growth-bounds", help="output basename")
    f.add_argument("--format", choices=("csv", "svg"), default="svg",
                   help="svg renders the plot next to the CSV")
    f.set_defaults(func=cmd_figure_growth)

    f = fig_sub.add_parser("active-constraints", help="active rows at the optimum")
    f.add_argument("--n", type=int, default=500)
    f.add_argument("--selector", choices=lpmodel.SELECTORS, default="full")
    f.add_argument("--band-width", type=int, default=lpmodel.DEFAULT_BAND_WIDTH)
    f.add_argument("--out", default="active-constraints", help="output basename")
    f.add_argument("--format", choices=("csv", "svg"), default="svg")
    f.set_defaults(func=cmd_figure_active)

    p = sub.add_parser("demo", help="worked demonstrations")
    demo_sub = p.add_subparsers(dest="demo_command", required=True)
    d = demo_sub.add_parser("appendix-a", help="partial vs complete pivoting instability")
    d.add_argument("--n", type=int, default=100)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.set_defaults(func=cmd_demo_appendix_a)

    p = sub.add_parser("constants", help="print the constants of the explicit bound")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("selftest", help="quick end-to-end verification")
    p.set_defaults(func=cmd_selftest)

    return top


def cmd_bound(args) -> int:
    rep, _, _, cert = report.run_bound(
        args.n, args.program, args.selector, args.band_width,
        certify=args.certify, precision_bits=args.precision_bits)
    payload = rep.as_dict()
    if args.out:
        report.dump_json(payload, args.out)
    if args.format == "json":
        sys.stdout.write(report.dump_json(payload))
    else:
        bound = rep.float_objective
        label = "float objective"
        if rep.certified_bound is not None:
            bound = float(rep.certified_bound)
            label = "certified bound"
        print(f"n = {rep.n}, program = {rep.program}, rows = {rep.rows}")
        print(f"{label}: log growth <= {bound:.12g}")
        if bound < 700.0:
            print(f"growth factor <= {math.exp(bound):.6g}")
        else:
            print(f"growth factor <= exp({bound:.6g})")
        print(f"classical closed form: {rep.wilkinson_closed_form:.12g}")
        print(f"explicit curve value:  {rep.theorem1_value:.12g}")
    if args.certify and not rep.verified:
        print("certification failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.check:
        with open(args.check, "r", encoding="ascii") as fh:
            payload = json.load(fh)
        ok, detail = lpsolve.verify_certificate(payload)
        if ok:
            n = payload.get("n")
            bound = payload.get("bound", "")
            print(f"certificate ok: n = {n}, bound = {bound}")
            return EXIT_OK
        print(f"certificate rejected: {detail}", file=sys.stderr)
        return EXIT_VERIFY
    if args.n is None:
        print("certify needs --n (or --check PATH)", file=sys.stderr)
        return EXIT_USAGE
    _, work, sol, cert = report.run_bound(
        args.n, args.program, args.selector, args.band_width,
        certify=True, precision_bits=args.precision_bits)
    if not cert.verified:
        print(f"certification failed: {cert.detail}", file=sys.stderr)
        return EXIT_VERIFY
    path = args.out or f"certificate-n{args.n}.json"
    lpsolve.save_certificate(work, cert, path)
    print(f"wrote {path}")
    print(f"certified log-growth bound: {float(cert.bound):.12g}")
    return EXIT_OK


def cmd_ge_run(args) -> int:
    if args.matrix_file:
        m = load_matrix(args.matrix_file)
        source = args.matrix_file
    elif args.wilkinson is not None:
        m = wilkinson_matrix(args.wilkinson, args.mode)
        source = f"wilkinson n={args.wilkinson}"
    else:
        import random

        m = random_matrix(args.random, args.mode, random.Random(args.seed))
        source = f"random n={args.random} seed={args.seed}"
    trace = eliminate(m, strategy=args.strategy)
    g = growth_factor(trace)
    pivots = [float(trace.pivot_magnitude(k)) for k in range(1, trace.n + 1)]
    payload = {
        "source": source,
        "n": trace.n,
        "mode": m.mode,
        "strategy": args.strategy,
        "growth_factor": float(g),
        "pivot_magnitudes": pivots,
    }
    if args.out:
        report.dump_json(payload, args.out)
    if args.format == "json":
        sys.stdout.write(report.dump_json(payload))
    else:
        print(f"{source}: {args.strategy} pivoting on {m.mode}")
        print(f"growth factor: {float(g):.12g}")
        shown = ", ".join(f"{p:.6g}" for p in pivots[:8])
        tail = ", ..." if len(pivots) > 8 else ""
        print(f"pivot magnitudes: {shown}{tail}")
    return EXIT_OK


def cmd_figure_growth(args) -> int:
    if args.nmax < 2:
        print("--nmax must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    rows = report.growth_figure_rows(args.nmax, args.points, args.selector,
                                     args.band_width, args.certify)
    csv_path = f"{args.out}.csv"
    report.write_csv(csv_path, report.GROWTH_FIELDS, rows)
    written = [csv_path]
    if args.format == "svg":
        svg_path = f"{args.out}.svg"
        report.save_growth_svg(rows, svg_path)
        written.append(svg_path)
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_figure_active(args) -> int:
    rec, rows, rep = report.active_figure_rows(args.n, args.selector, args.band_width)
    csv_path = f"{args.out}.csv"
    report.write_csv(csv_path, report.ACTIVE_FIELDS, rows)
    written = [csv_path]
    if args.format == "svg":
        svg_path = f"{args.out}.svg"
        report.save_active_svg(rec, svg_path)
        written.append(svg_path)
    print(f"n = {rec.n}: {len(rec.active)} active rows of {rep.rows}")
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_demo_appendix_a(args) -> int:
    demo = report.demo_instability(args.n, args.seed)
    if args.out:
        report.dump_json(demo.as_dict(), args.out)
    if args.format == "json":
        sys.stdout.write(report.dump_json(demo.as_dict()))
    else:
        sys.stdout.write(demo.text())
    return EXIT_OK


def cmd_constants(args) -> int:
    table = asymptotics.constants_table()
    if args.json:
        sys.stdout.write(report.dump_json(table.as_dict()))
        return EXIT_OK
    for name, entry in table.as_dict().items():
        print(f"{name:>20} = {entry['value']:.12g}    {entry['formula']}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    import os
    import random
    import tempfile

    from fractions import Fraction

    from . import elimination
    from .matrix import det_bareiss

    failures = []

    def check(name, ok):
        print(f"{'ok' if ok else 'FAIL'}  {name}")
        if not ok:
            failures.append(name)

    lp = lpmodel.cumulative_transform(lpmodel.build_wilkinson_lp(50))
    sol = lpsolve.solve_float(lp)
    closed = lpsolve.wilkinson_closed_form_dual(50)
    check("float solve matches closed form at n=50",
          abs(sol.objective_value - float(closed.bound)) <= 1e-7)

    lp8 = lpmodel.cumulative_transform(lpmodel.build_wilkinson_lp(8))
    exact = lpsolve.exact_simplex(lp8)
    closed8 = lpsolve.wilkinson_closed_form_dual(8)
    check("exact simplex equals closed form at n=8", exact.bound == closed8.bound)

    imp = lpmodel.cumulative_transform(lpmodel.build_improved_lp(40, "band"))
    cert = lpsolve.certify(imp, lpsolve.solve_float(imp))
    check("band certificate verifies at n=40", cert.verified)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "cert.json")
        lpsolve.save_certificate(imp, cert, path)
        ok, _ = lpsolve.verify_certificate(lpsolve.load_certificate(path))
        check("certificate round-trips through disk", ok)

    w = elimination.wilkinson_matrix(6, RATIONAL_REAL)
    tr = elimination.eliminate(w, strategy=elimination.PARTIAL)
    check("worst-case growth at n=6 is 32", elimination.growth_factor(tr) == Fraction(32))

    m = random_matrix(6, RATIONAL_REAL, random.Random(7))
    tr = elimination.eliminate(m)
    prod = Fraction(1)
    for k in range(1, 7):
        prod *= tr.pivot_magnitude(k)
    check("pivot product equals |det| exactly", prod == abs(det_bareiss(m)))

    # growth must push intermediates past 53 bits before partial pivoting
    # shows any error on the dyadic right-hand side
    demo = report.demo_instability(50, seed=1)
    check("partial pivoting loses accuracy by n=50",
          demo.relerr_partial > 1e-3 + 1e3 * demo.relerr_complete)

    if failures:
        print(f"{len(failures)} check(s) failed", file=sys.stderr)
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except lpsolve.SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except lpsolve.CertificationError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
