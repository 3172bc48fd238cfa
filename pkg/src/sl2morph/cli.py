"""Command-line driver.

Subcommands mirror the stages: ``setup`` and ``toolbox`` build and cache the
preprocessing, ``basis`` runs the change-of-basis computation with progress
lines (the one stage whose running time can stretch on unlucky random
choices), ``map`` pushes a matrix through the morphism, and ``verify`` runs
the chosen suites. Everything is deterministic in (p, seed); caches live
under --cache-dir keyed by those parameters.

Exit codes: 0 success, 1 verification failures, 2 usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .blackbox import make_blackbox_sl2
from .errors import ForeignElementError, RetryBudgetExceeded
from .matrices import element_order, parse_matrix_text
from .pipeline import build_context, map_element
from .primefield import PrimeModulus, odd_part
from .sharpflat import basis_from_lines, basis_to_lines, sharp_vs_flat
from .toolbox import (
    setup_to_lines,
    toolbox_from_lines,
    toolbox_sl2,
    toolbox_to_lines,
)
from .utils import derive_rng
from .verify import SUITES, run_suites


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, required=True, help="odd prime >= 13")
    parser.add_argument("--seed", type=int, default=1, help="construction seed")
    parser.add_argument("--word-length", type=int, default=10, help="torus word length")
    parser.add_argument(
        "--cache-dir", default=".sl2morph-cache", help="directory for stage caches"
    )


def _cache_path(args, stage: str) -> Path:
    return Path(args.cache_dir) / f"{stage}_p{args.p}_s{args.seed}_w{args.word_length}.txt"


def _write_cache(path: Path, lines: List[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def _load_toolbox(args, G):
    path = _cache_path(args, "toolbox")
    if path.exists():
        return toolbox_from_lines(path.read_text().splitlines(), G), True
    tb = toolbox_sl2(
        G.generators, G.exponent_hint, G, derive_rng(args.seed, "toolbox"), word_length=args.word_length
    )
    _write_cache(path, toolbox_to_lines(tb))
    return tb, False


def _load_context(args, progress=None):
    from .bbfield import KField

    G = make_blackbox_sl2(PrimeModulus(args.p), args.seed)
    tb, _ = _load_toolbox(args, G)
    K = KField(tb)
    basis = None
    bpath = _cache_path(args, "basis")
    if bpath.exists():
        try:
            basis = basis_from_lines(bpath.read_text().splitlines(), tb, K)
        except ValueError as exc:
            print(f"ignoring stale basis cache: {exc}", file=sys.stderr)
    if basis is None:
        basis = sharp_vs_flat(tb, K, derive_rng(args.seed, "basis"), progress=progress)
        _write_cache(bpath, basis_to_lines(basis))
    return build_context(args.p, args.seed, args.word_length, toolbox=tb, basis=basis)


def cmd_setup(args) -> int:
    G = make_blackbox_sl2(PrimeModulus(args.p), args.seed)
    eo = odd_part(G.exponent_hint)
    from .pgl2 import setup_for_pgl2

    setup = setup_for_pgl2(
        G.generators, eo, G, derive_rng(args.seed, "toolbox"), word_length=args.word_length
    )
    path = _cache_path(args, "setup")
    _write_cache(path, setup_to_lines(setup))
    print(f"group p={args.p} generators={len(G.generators)} exponent={G.exponent_hint}")
    print(f"setup involution {setup.involution_i.handle}")
    print(f"setup lists centralizer={len(setup.centralizer_list)} torus={len(setup.torus_S)}")
    print(f"cached {path}")
    return 0


def cmd_toolbox(args) -> int:
    G = make_blackbox_sl2(PrimeModulus(args.p), args.seed)
    tb, cached = _load_toolbox(args, G)
    print(f"toolbox for p={args.p} seed={args.seed} ({'cache' if cached else 'fresh'})")
    for line in toolbox_to_lines(tb):
        print(line)
    return 0


def cmd_basis(args) -> int:
    from .bbfield import KField

    G = make_blackbox_sl2(PrimeModulus(args.p), args.seed)
    tb, _ = _load_toolbox(args, G)
    K = KField(tb)

    def progress(stage: str, attempt: int) -> None:
        print(f"BASIS {stage} attempt={attempt}")

    bpath = _cache_path(args, "basis")
    if bpath.exists():
        try:
            basis_from_lines(bpath.read_text().splitlines(), tb, K)
            print(f"basis cache valid: {bpath}")
            return 0
        except ValueError:
            pass
    basis = sharp_vs_flat(tb, K, derive_rng(args.seed, "basis"), progress=progress)
    _write_cache(bpath, basis_to_lines(basis))
    for line in basis_to_lines(basis):
        print(line)
    print(f"cached {bpath}")
    return 0


def cmd_map(args) -> int:
    ctx = _load_context(args)
    try:
        g = parse_matrix_text(args.matrix, ctx.F)
    except ValueError as exc:
        print(f"bad matrix: {exc}", file=sys.stderr)
        return 2
    image, trace = map_element(g, ctx)
    if args.trace:
        for line in trace.lines():
            print(f"TRACE {line}")
    order = element_order(image, ctx.E, ctx.G.mul, lambda z: z == ctx.G.identity)
    print(f"image {image.handle}")
    print(f"image-order {order}")
    return 0


def cmd_verify(args) -> int:
    names = [s.strip() for s in args.suites.split(",") if s.strip()]
    for name in names:
        if name not in SUITES:
            print(f"unknown suite {name!r}; choose from {sorted(SUITES)}", file=sys.stderr)
            return 2
    ctx = _load_context(args)
    rng = derive_rng(args.seed, "verify")
    reports = run_suites(ctx, names, args.samples, rng)
    for report in reports:
        print(report.line())
        for failure in report.failures:
            print(f"  FAIL case={failure.case} seed={failure.seed} {failure.message}")
    if args.report:
        from .figures import write_report_csv

        path = write_report_csv(reports, args.report)
        print(f"report {path}")
    if args.figures:
        from .figures import render_figures

        for path in render_figures(reports, args.figures):
            print(f"figure {path}")
    return 0 if all(r.ok for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sl2morph",
        description="morphisms from SL2 over a prime field into a black box group",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_setup = sub.add_parser("setup", help="build and cache the group oracle and PGL2 setup")
    _add_common(p_setup)
    p_setup.set_defaults(fn=cmd_setup)

    p_tb = sub.add_parser("toolbox", help="build, cache and print the preprocessing toolbox")
    _add_common(p_tb)
    p_tb.set_defaults(fn=cmd_toolbox)

    p_basis = sub.add_parser("basis", help="compute the change of basis with progress lines")
    _add_common(p_basis)
    p_basis.set_defaults(fn=cmd_basis)

    p_map = sub.add_parser("map", help="map a matrix 'a,b;c,d' through the morphism")
    _add_common(p_map)
    p_map.add_argument("matrix", help="row-major matrix text, e.g. \"2,1;3,2\"")
    p_map.add_argument("--trace", action="store_true", help="print one line per stage")
    p_map.set_defaults(fn=cmd_map)

    p_verify = sub.add_parser("verify", help="run verification suites")
    _add_common(p_verify)
    p_verify.add_argument("--samples", type=int, default=100, help="cases per suite")
    p_verify.add_argument(
        "--suites",
        default="orders,homomorphism,steinberg",
        help="comma-separated suite names",
    )
    p_verify.add_argument("--report", default=None, help="write per-case CSV here")
    p_verify.add_argument("--figures", default=None, help="render summary figures into this directory")
    p_verify.set_defaults(fn=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, ForeignElementError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RetryBudgetExceeded as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
