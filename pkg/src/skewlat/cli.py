"""Command-line front end: ``skewlat psi|compare|bounds|simulate|e8-demo``.

Every command writes CSV (header line, comma separated, 17 significant
digits, LF endings) to ``--out`` or stdout, and with ``--figure`` also
renders the same data to an image file. Exit status is 0 when all
requested checks pass, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import fileio, plotting
from .enumeration import enumerate_shells
from .errors import LatticeError
from .lattice import (
    DEFAULT_TOL,
    E8_DIAGONAL,
    diagonal_lattice,
    dual,
    e8_lattice,
    integer_lattice,
    is_skewing,
    nest,
    same_lattice,
    volume,
)
from .simulator import ChannelConfig, sweep
from .theta import e8_theta_psi, orthogonal_psi, psi_auto, psi_direct, psi_poisson
from .wiretap import CosetCode, SkewComparison, compare_skewing, ecdp_bound, rate, rep_bound

log = logging.getLogger("skewlat")

E8_GRID = "0.1:5:50:log"
E8_DIRECT_MIN_X = 0.5
E8_DIRECT_AGREEMENT = 1e-8


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _grid(spec: str) -> list[float]:
    try:
        return fileio.parse_grid(spec)
    except ValueError as exc:
        raise LatticeError(f"--grid: {exc}") from None


def cmd_psi(args) -> int:
    lat = fileio.read_lattice(args.lattice, args.tol)
    method = {"auto": psi_auto, "direct": psi_direct, "poisson": psi_poisson}[args.method]
    grid = _grid(args.grid)
    vals = [method(lat, x, args.tol) for x in grid]
    rows = [(x, v.value, v.truncation_bound, v.method) for x, v in zip(grid, vals)]
    _emit(fileio.csv_text(("x", "psi", "truncation_bound", "method"), rows), args.out)
    if args.figure:
        plotting.plot_curves(grid, {Path(args.lattice).stem: [v.value for v in vals]}, args.figure,
                             ylabel=r"$\psi(x)$", logx=True, logy=True)
    return 0


def _comparison_rows(cmp: SkewComparison):
    return list(zip(cmp.orth.x_grid, cmp.orth.values, cmp.skew.values, cmp.margins))


def cmd_compare(args) -> int:
    orth = fileio.read_lattice(args.lattice, args.tol)
    spec = fileio.read_skew(args.skew)
    grid = _grid(args.grid)
    cmp = compare_skewing(orth, spec, grid, args.tol)
    _emit(fileio.csv_text(("x", "psi_orth", "psi_skew", "margin"), _comparison_rows(cmp)), args.out)
    if args.figure:
        plotting.plot_psi_comparison(grid, cmp.orth.values, cmp.skew.values, args.figure)
    bad = [x for x, ok in zip(grid, cmp.strict) if not ok]
    if bad:
        print(f"skewlat compare: strict ordering not certified at {len(bad)} grid point(s), "
              f"first x={bad[0]:.6g}", file=sys.stderr)
        return 1
    return 0


def cmd_bounds(args) -> int:
    dense = fileio.read_lattice(args.lattice, args.tol)
    sigmas = _grid(args.grid)
    which = args.which
    if which in ("ecdp", "both") and not args.relation:
        raise LatticeError("--relation is required for the ECDP bound")
    code = CosetCode(nest(dense, fileio.read_relation(args.relation))) if args.relation else None
    curves, flags = {}, {}
    if which in ("ecdp", "both"):
        b = [ecdp_bound(code, s, args.tol) for s in sigmas]
        curves["ecdp"] = [v.value for v in b]
        flags["ecdp"] = [v.capped for v in b]
    if which in ("rep", "both"):
        r = [rep_bound(dense, s, args.tol) for s in sigmas]
        curves["rep"] = r
        flags["rep"] = [v > 1.0 for v in r]
    if which == "both":
        header = ("sigma", "ecdp", "ecdp_capped", "rep", "rep_capped")
        rows = zip(sigmas, curves["ecdp"], flags["ecdp"], curves["rep"], flags["rep"])
    else:
        header = ("sigma", "value", "capped")
        rows = zip(sigmas, curves[which], flags[which])
    _emit(fileio.csv_text(header, rows), args.out)
    if args.figure:
        plotting.plot_curves(sigmas, curves, args.figure, xlabel=r"$\sigma$", ylabel="bound",
                             logx=True, logy=True, markers=flags)
    return 0


def cmd_simulate(args) -> int:
    lat = fileio.read_lattice(args.lattice, args.tol)
    sigmas = _grid(args.grid)
    base = ChannelConfig(sigmas[0], args.trials, args.seed)
    if args.relation:
        target, op = CosetCode(nest(lat, fileio.read_relation(args.relation))), "coset"
    else:
        target, op = lat, "rep"
    results = sweep(op, target, sigmas, base, workers=args.workers)
    rows = [(s, r.estimate, r.stderr, r.trials) for s, r in zip(sigmas, results)]
    _emit(fileio.csv_text(("sigma", "estimate", "stderr", "trials"), rows), args.out)
    if args.figure:
        plotting.plot_estimates(sigmas, [r.estimate for r in results], [r.stderr for r in results],
                                args.figure, ylabel="REP" if op == "rep" else "coset decision rate")
    return 0


def e8_checks(tol: float = DEFAULT_TOL, direct_min_x: float | None = E8_DIRECT_MIN_X,
              grid_spec: str = E8_GRID):
    """psi curves of E8 and of diag(2,1,...,1,1/2), plus structural checks.

    Returns ``(rows, checks)``: CSV rows ``(x, psi_orth, psi_e8, margin)`` and
    a list of ``(name, passed, detail)``.
    """
    grid = fileio.parse_grid(grid_spec)
    e8 = e8_lattice(tol)
    orth = diagonal_lattice(E8_DIAGONAL, tol)
    checks = []

    def check(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    o = [orthogonal_psi(E8_DIAGONAL, x, tol) for x in grid]
    s = [e8_theta_psi(x, tol) for x in grid]
    margins = [a.value - b.value - a.truncation_bound - b.truncation_bound for a, b in zip(o, s)]
    rows = [(x, a.value, b.value, m) for x, a, b, m in zip(grid, o, s, margins)]
    check("psi ordering", all(m > 0 for m in margins),
          f"min margin {min(margins):.3e} over {len(grid)} points")

    if direct_min_x is not None:
        worst = 0.0
        for x, closed in zip(grid, s):
            if x >= direct_min_x:
                worst = max(worst, abs(psi_direct(e8, x, 0.4 * E8_DIRECT_AGREEMENT).value - closed.value))
        check("closed form vs enumeration", worst <= E8_DIRECT_AGREEMENT,
              f"max |diff| {worst:.3e} for x >= {direct_min_x}")

    shells = enumerate_shells(e8, 2.0)
    want = ((0.0, 1), (2.0, 240), (4.0, 2160))
    got = tuple((round(n, 6), c) for n, c in shells.entries)
    check("shell counts", got == want, f"{got}")
    check("unimodular", abs(volume(e8) - 1.0) <= tol, f"|det| = {volume(e8):.12g}")
    check("self-dual", same_lattice(dual(e8), e8))
    check("is skewing", is_skewing(e8, orth))

    half = integer_lattice(8, 0.5)
    z_e8 = np.rint(np.linalg.solve(half.generator, e8.generator)).astype(np.int64)
    z_orth = np.rint(np.linalg.solve(half.generator, orth.generator)).astype(np.int64)
    code_e8, code_orth = CosetCode(nest(half, z_e8)), CosetCode(nest(half, z_orth))
    check("index 256", code_e8.index == 256 and code_orth.index == 256,
          f"E8 {code_e8.index}, orthogonal {code_orth.index}")
    check("equal rates 1 bpcu", rate(code_e8) == rate(code_orth) == 1.0,
          f"E8 {rate(code_e8)}, orthogonal {rate(code_orth)}")
    return rows, checks


def cmd_e8_demo(args) -> int:
    t0 = time.perf_counter()
    rows, checks = e8_checks(args.tol, None if args.skip_direct else E8_DIRECT_MIN_X, args.grid)
    _emit(fileio.csv_text(("x", "psi_orth", "psi_e8", "margin"), rows), args.out)
    if args.figure:
        x = [r[0] for r in rows]
        plotting.plot_psi_comparison(x, [r[1] for r in rows], [r[2] for r in rows], args.figure,
                                     orth_label=r"$\Lambda_o$ = diag(2,1,...,1,1/2)",
                                     skew_label=r"$E_8$")
    report = sys.stdout if args.out else sys.stderr
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""), file=report)
    print(f"{sum(ok for _, ok, _ in checks)}/{len(checks)} checks passed in "
          f"{time.perf_counter() - t0:.1f} s", file=report)
    return 0 if all(ok for _, ok, _ in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewlat", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid_default=None):
        sp.add_argument("--grid", default=grid_default, required=grid_default is None,
                        help="min:max:count:linear|log, or a comma list")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--out", help="CSV output path (default stdout)")
        sp.add_argument("--figure", help="also render the data to this image file")

    sp = sub.add_parser("psi", help="psi function of a lattice on an x grid")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--method", choices=("auto", "direct", "poisson"), default="auto")
    common(sp)
    sp.set_defaults(func=cmd_psi)

    sp = sub.add_parser("compare", help="psi of an orthogonal lattice vs a skewing")
    sp.add_argument("--lattice", required=True, help="orthogonal (diagonal) lattice file")
    sp.add_argument("--skew", required=True, help="skew spec file")
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("bounds", help="ECDP / REP bounds over a sigma grid")
    sp.add_argument("--lattice", required=True, help="dense lattice file")
    sp.add_argument("--relation", help="integer relation matrix file for the sparse lattice")
    sp.add_argument("--which", choices=("ecdp", "rep", "both"), default="both")
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("simulate", help="Monte Carlo REP (lattice) or coset decision rate (with --relation)")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--relation")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("e8-demo", help="E8 vs diag(2,1,...,1,1/2): psi curves and checks")
    sp.add_argument("--skip-direct", action="store_true",
                    help="skip the closed-form vs enumeration check (the slow part)")
    common(sp, grid_default=E8_GRID)
    sp.set_defaults(func=cmd_e8_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    t0 = time.perf_counter()
    try:
        code = args.func(args)
        log.info("%s finished in %.2f s with status %d", args.command, time.perf_counter() - t0, code)
        return code
    except (LatticeError, ValueError) as exc:
        print(f"skewlat {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
