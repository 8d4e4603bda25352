"""Command line front end: ``hyperdet {hdet,precompute,concurrence,verify,bench}``.

Exit codes::

    0  success
    1  a verify property failed
    2  unreadable or malformed input, or a state that is not normalized
    3  shape, odd particle count or symmetry violation
    4  a size budget would be exceeded
    5  the cache directory could not be written
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import bench, cache, core, quantum, verify
from .documents import LAYOUTS, DocumentError, format_scalar, loads_json, parse_tensor
from .errors import (
    BackendError,
    NormalizationError,
    OddOrderError,
    ResourceError,
    ShapeError,
    StorageError,
    SymmetryError,
)
from .hdet import CONTRACTOR_BUDGET, ENGINES, evaluate

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_SHAPE, EXIT_RESOURCE, EXIT_STORAGE = range(6)

_EXIT_CODES = (
    ((DocumentError, NormalizationError, BackendError), EXIT_PARSE),
    ((ShapeError, OddOrderError, SymmetryError), EXIT_SHAPE),
    (ResourceError, EXIT_RESOURCE),
    (StorageError, EXIT_STORAGE),
)


def default_cache_dir() -> Path:
    env = os.environ.get("HYPERDET_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "hyperdet"


def _read_document(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror or exc}") from None
    return loads_json(text, source=path)


def _store(args) -> cache.ContractorStore:
    return cache.ContractorStore(args.cache_dir, budget=args.budget)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text!r}")


def _sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.replace(",", " ").split():
        try:
            d, N = (int(x) for x in item.lower().split("x"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"sizes are written dxN, got {item!r}")
        out.append((d, N))
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_hdet(args) -> int:
    A, _ = parse_tensor(_read_document(args.input), args.backend, args.layout)
    res = evaluate(
        A,
        args.engine,
        _store(args),
        tol=args.tolerance,
        levicivita_budget=args.budget,
        contractor_budget=args.budget,
    )
    print(format_scalar(res.value))
    print(f"engine: {res.engine}")
    return EXIT_OK


def cmd_precompute(args) -> int:
    E = cache.ensure_contractor(args.d, args.N, args.cache_dir, args.budget, args.backend)
    path = Path(args.cache_dir) / cache.CacheKey(cache.CONTRACTOR, args.d, args.N, args.backend).filename
    print(f"side {E.side}")
    print(f"entries {E.entries}")
    print(f"path {path}")
    if args.N % 2:
        print(
            f"warning: N={args.N} is odd; the contractor is antisymmetric, so every "
            "hyperdeterminant it yields is identically zero",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_concurrence(args) -> int:
    try:
        s = quantum.parse_state(_read_document(args.input))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (NormalizationError, ShapeError, DocumentError)):
            raise
        raise DocumentError(str(exc)) from None
    tol = core.SYMMETRY_TOL if args.tolerance is None else args.tolerance
    boson = quantum.is_boson(s, tol)
    value, engine = quantum.evaluate_concurrence(s, _store(args), tol)
    print(repr(float(value)))
    print(f"engine: {engine}")
    if not boson:
        print("warning: state is not a boson; used a general engine", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_suite(args.seed, args.sizes or verify.DEFAULT_SIZES, args.trials,
                               store=_store(args))
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status}  {r.name}"
        line += f"  ({r.cases} cases)" if r.passed else f"  {r.detail}"
        print(line)
        if r.counterexample is not None:
            print(f"  counterexample: {json.dumps(r.counterexample)}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_bench(args) -> int:
    report = bench.run_bench(
        d=args.d,
        Ns=args.N,
        engines=args.engines,
        store=_store(args),
        backend=args.backend,
        max_terms=args.max_terms,
        contractor_budget=args.budget,
        seed=args.seed,
    )
    if args.format == "jsonl":
        for row in report.jsonl():
            print(json.dumps(row))
    else:
        print(bench.format_table(report))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperdet", description="Cayley hyperdeterminant tools")
    parser.add_argument("-v", "--verbose", action="store_true", help="log contractor sizes")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, budget=CONTRACTOR_BUDGET):
        p.add_argument("--cache-dir", default=None,
                       help="persist contractors here (default: in memory only)")
        p.add_argument("--budget", type=int, default=budget, help="maximum entries to build")

    p = sub.add_parser("hdet", help="hyperdeterminant of a tensor document")
    p.add_argument("--input", required=True)
    p.add_argument("--engine", choices=ENGINES, default="auto")
    p.add_argument("--backend", choices=(core.RATIONAL, core.FLOAT64), default=None,
                   help="default: rational for integer or p/q data, float64 for decimals")
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--layout", choices=LAYOUTS, default=LAYOUTS[0])
    common(p)
    p.set_defaults(func=cmd_hdet)

    p = sub.add_parser("precompute", help="build and store a contractor")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--backend", choices=(core.RATIONAL, core.FLOAT64), default=core.RATIONAL)
    common(p)
    p.set_defaults(func=cmd_precompute)

    p = sub.add_parser("concurrence", help="2|hdet| of a pure state document")
    p.add_argument("--input", required=True)
    p.add_argument("--tolerance", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_concurrence)

    p = sub.add_parser("verify", help="run the cross-engine property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", type=_sizes, default=None, help="e.g. 2x2,2x4,3x2")
    p.add_argument("--trials", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time the engines across orders")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", type=_int_list, default=[2, 4, 6, 8, 10, 12])
    p.add_argument("--engines", type=lambda s: s.split(","), default=list(bench.ENGINES))
    p.add_argument("--backend", choices=(core.RATIONAL, core.FLOAT64), default=core.FLOAT64)
    p.add_argument("--max-terms", type=int, default=bench.MAX_TERMS)
    p.add_argument("--format", choices=("table", "jsonl"), default="table")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.command == "precompute" and args.cache_dir is None:
        args.cache_dir = default_cache_dir()
    if getattr(args, "engines", None):
        unknown = set(args.engines) - set(bench.ENGINES)
        if unknown:
            print(f"error: unknown engines {sorted(unknown)}", file=sys.stderr)
            return EXIT_PARSE
    try:
        return args.func(args)
    except Exception as exc:
        for types, code in _EXIT_CODES:
            if isinstance(exc, types):
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise

if __name__ == "__main__":
    sys.exit(main())
