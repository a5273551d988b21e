"""Command-line front end.

Exit codes: 0 success with all checks passing, 1 checks ran and failed,
2 usage or validation error, 3 computational or I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from . import arithmetic as ar
from .mesh import MAX_DEPTH, ConvergenceError, MeshError, build_icosphere, laplace_spectrum, mesh_area, read_mesh, write_mesh
from .orbifolds import SignatureError, enumerate_signatures, parse_signature, reflection_supergroup, verify_cover
from .report import FORMATS, SCAN_COLUMNS, emit, field_row, orbifold_row
from .spectral import INDEX_BOUND, VIGNERAS_LAMBDA, VOL_S2, VOL_S3, li_yau_slack, spectral_record, volume_bound_chain

log = logging.getLogger("kleinrefl")

CHECKPOINT_ENV = "KLEINREFL_CHECKPOINT_DIR"
EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _add_output(p, default_format):
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--format", choices=FORMATS, default=default_format, help=f"report format (default: {default_format})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kleinrefl",
        description="Checks behind the finiteness of arithmetic Kleinian maximal reflection groups.",
        epilog=f"Exit codes: 0 ok, 1 a check failed, 2 usage error, 3 computational failure. "
        f"Set {CHECKPOINT_ENV} to checkpoint long scans.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbifold", help="reflection supergroup of a spherical 2-orbifold group")
    p.add_argument("--symbol", help='Conway symbol, e.g. "*235", "3*2", "3x"; omit to list every case')
    p.add_argument("--max-order", type=int, default=50, help="largest order in the full listing (default: 50)")
    _add_output(p, "table")

    p = sub.add_parser("spectrum", help="P1 Laplace spectrum of an icosphere and the m=2 eigenvalue bound")
    p.add_argument("--depth", type=int, default=5, help=f"icosphere subdivision depth, 0..{MAX_DEPTH} (default: 5)")
    p.add_argument("--mesh", type=Path, help="read a v/f text mesh instead of building an icosphere")
    p.add_argument("--k", type=int, default=5, help="number of eigenvalues (default: 5)")
    p.add_argument("--tol", type=float, default=1e-10, help="eigenpair residual tolerance (default: 1e-10)")
    p.add_argument("--conf-vol", type=float, default=VOL_S2, help="conformal volume used in the bound (default: 4 pi)")
    p.add_argument("--slack-tol", type=float, default=0.05 * 8 * math.pi,
                   help="allowed negative slack from discretization (default: 0.05 * 8 pi)")
    p.add_argument("--maxiter", type=int, help="eigensolver iteration budget")
    p.add_argument("--save-mesh", type=Path, help="also write the mesh in v/f text format")
    _add_output(p, "json")

    p = sub.add_parser("chain", help="covolume bound from lambda_1 >= 3/4 and V_c <= 4 Vol(S^3)")
    p.add_argument("--lambda-min", type=float, default=VIGNERAS_LAMBDA, help="lambda_1 lower bound (default: 0.75)")
    p.add_argument("--vc-sphere3", type=float, default=VOL_S3, help="Vol(S^3) (default: 2 pi^2)")
    p.add_argument("--index-bound", type=int, default=INDEX_BOUND, help="reflection supergroup index (default: 4)")
    _add_output(p, "table")

    for name, d_min, tol, helptext in (
        ("scan", -10_000, 1e-6, "Borel covolume filter over fundamental discriminants"),
        ("verify-hatcher", -84, 1e-8, "check the 16 known reflective Bianchi discriminants"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--min-disc", type=int, default=d_min, help=f"most negative discriminant (default: {d_min})")
        p.add_argument("--max-disc", type=int, default=-3, help="least negative discriminant (default: -3)")
        p.add_argument("--cutoff", type=float, default=ar.DEFAULT_CUTOFF, help="covolume cutoff (default: 64 pi^2)")
        p.add_argument("--tol", type=float, default=tol, help=f"L(2, chi) truncation tolerance (default: {tol:g})")
        p.add_argument("--max-terms", type=int, default=ar.MAX_TERMS, help="L-series term budget per discriminant")
        p.add_argument("--parallel", type=int, nargs="?", const=os.cpu_count() or 1, default=1, metavar="N",
                       help="worker processes (bare flag: one per CPU)")
        _add_output(p, "csv")
    return parser


def _validate(args) -> None:
    cmd = args.command
    if cmd == "spectrum":
        if args.mesh is None and not 0 <= args.depth <= MAX_DEPTH:
            raise UsageError(f"--depth must be in [0, {MAX_DEPTH}]")
        if args.k < 1:
            raise UsageError("--k must be >= 1")
        if args.tol <= 0 or args.conf_vol <= 0 or args.slack_tol < 0:
            raise UsageError("--tol and --conf-vol must be positive, --slack-tol nonnegative")
        if args.maxiter is not None and args.maxiter < 1:
            raise UsageError("--maxiter must be >= 1")
    elif cmd == "chain":
        if args.lambda_min <= 0 or args.vc_sphere3 <= 0 or args.index_bound < 1:
            raise UsageError("chain constants must be positive")
    elif cmd in ("scan", "verify-hatcher"):
        if not args.min_disc <= args.max_disc < 0:
            raise UsageError("need --min-disc <= --max-disc < 0")
        if args.tol <= 0 or args.cutoff <= 0 or args.max_terms < 1 or args.parallel < 1:
            raise UsageError("--tol, --cutoff, --max-terms and --parallel must be positive")
    elif cmd == "orbifold" and args.max_order < 1:
        raise UsageError("--max-order must be >= 1")


def _cmd_orbifold(args):
    if args.symbol is None:
        rows, ok = [], True
        for sig in enumerate_signatures(args.max_order):
            res = reflection_supergroup(sig)
            good = verify_cover(res, sig)
            ok &= good
            rows.append(orbifold_row(sig, res, good))
        return rows, ok
    try:
        sig = parse_signature(args.symbol)
    except SignatureError as exc:
        raise UsageError(str(exc)) from exc
    res = reflection_supergroup(sig)
    good = verify_cover(res, sig)
    return orbifold_row(sig, res, good), good


def _cmd_spectrum(args):
    mesh = read_mesh(args.mesh) if args.mesh else build_icosphere(args.depth)
    if args.k > mesh.n_vertices - 1:
        raise UsageError(f"--k must be at most {mesh.n_vertices - 1} for this mesh")
    if args.save_mesh:
        write_mesh(mesh, args.save_mesh)
    spectrum = laplace_spectrum(mesh, k=args.k, tol=args.tol, maxiter=args.maxiter)
    check = li_yau_slack(spectrum.lambda1, mesh_area(mesh), 2, args.conf_vol)
    depth = None if args.mesh else args.depth
    return spectral_record(depth, mesh.n_vertices, spectrum, check), check.holds_within(args.slack_tol)


def _cmd_chain(args):
    chain = volume_bound_chain(args.lambda_min, args.vc_sphere3, args.index_bound)
    return chain, True


def _run_scan(args):
    checkpoint = None
    ckpt_dir = os.environ.get(CHECKPOINT_ENV)
    if ckpt_dir:
        checkpoint = Path(ckpt_dir) / f"{args.command}_{-args.max_disc}_{-args.min_disc}.jsonl"

    def progress(done, total, last):
        log.info("%d/%d discriminants, last |d| = %d", done, total, last)

    return ar.scan(
        args.min_disc, args.max_disc, args.cutoff, args.tol,
        workers=args.parallel, max_terms=args.max_terms, checkpoint=checkpoint, progress=progress,
    )


def _cmd_scan(args):
    report = _run_scan(args)
    ok = all(ar.brauer_siegel_holds(r) for r in report.records)
    ok &= all(r.passes_crude for r in report.records if r.passes_exact and r.w == 2)
    return report, ok


def _cmd_verify_hatcher(args):
    report = _run_scan(args)
    ok = ar.hatcher_check(report)
    found = report.by_discriminant()
    rows = []
    for d in ar.HATCHER_DISCRIMINANTS:
        rec = found.get(d)
        rows.append(field_row(rec) if rec else dict.fromkeys(SCAN_COLUMNS, "") | {"d": d})
    log.info("hatcher check: %s", "PASS" if ok else "FAIL")
    return rows, ok


COMMANDS = {
    "orbifold": _cmd_orbifold,
    "spectrum": _cmd_spectrum,
    "chain": _cmd_chain,
    "scan": _cmd_scan,
    "verify-hatcher": _cmd_verify_hatcher,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        _validate(args)
        report, ok = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"kleinrefl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MeshError, ConvergenceError, ar.LSeriesBudgetError, ArithmeticError, OSError) as exc:
        print(f"kleinrefl {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    text = emit(report, args.format)
    try:
        if args.out:
            args.out.write_text(text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except OSError as exc:
        print(f"kleinrefl {args.command}: cannot write report: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK if ok else EXIT_FAILED


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
