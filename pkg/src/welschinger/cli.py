"""Command-line front end.

Verbs: compute a single invariant, reproduce the reference value table,
dump the term-level trace of one evaluation, run property scans, build
monotonicity chains, and inspect cache files.  Exit codes: 0 success,
1 property violation, 2 parse error, 3 validation error, 4 internal
assertion failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import List, Optional, Tuple

from .engine import Evaluator, Store, cache_load, cache_save, make_key
from .errors import (
    CacheError,
    InternalCheckError,
    ParseError,
    ValidationError,
)
from .invariants import (
    blowdown_scan,
    growth_report,
    invariant_report,
    monotonicity_check,
    nef_chain,
    path_equivalence_scan,
    positivity_scan,
    sample_monotone_pairs,
    symmetry_scan,
    top_key,
    welschinger,
)
from .surfaces import SurfaceSpec, parse_surface
from .tangency import TangencyVector

GOLDEN_TABLE = {
    # (column, class shorthand) -> value; columns are fixed surface/twist
    # configurations, rows the first two anticanonical multiples.
    "-K": (8, 6, 4, 2, 0, 4, 0, 4),
    "-2K": (1000, 522, 236, 78, 0, 512, 0, 160),
}

TABLE_COLUMNS: List[Tuple[str, str, str]] = [
    ("P2[6,0]", "0", "p2"),
    ("P2[4,1]", "0", "p2"),
    ("P2[2,2]", "0", "p2"),
    ("P2[0,3]", "0", "p2"),
    ("B", "0", "conic"),
    ("B", "F", "conic"),
    ("B1", "0", "cubic"),
    ("B1", "F", "cubic"),
]

# On the contracted model the anticanonical rows pull back to these classes.
CONIC_ROWS = {"-K": "2,1,1", "-2K": "4,2,2"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="welschinger",
        description="Exact Welschinger invariants of real del Pezzo surfaces "
        "of degree >= 3",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p: argparse.ArgumentParser, with_surface: bool = True):
        if with_surface:
            p.add_argument("--surface", required=True, help="P2[a,b], B1 or B")
            p.add_argument("--twist", default="0", choices=["0", "F"])
            p.add_argument("--blowdown", default="", help="indices i,j,...")
            p.add_argument("--E", dest="e_choice", default=None,
                           help="auxiliary (-1)-curve, class DSL")
        p.add_argument("--cache", default=None, help="persistent store path")
        p.add_argument("--no-cache", action="store_true")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--json", action="store_true")
        p.add_argument("--csv", action="store_true")
        p.add_argument("--no-timing", action="store_true")

    p = sub.add_parser("compute", help="one invariant value")
    add_common(p)
    p.add_argument("--class", dest="class_text", required=True)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("table", help="reproduce the reference value table")
    add_common(p, with_surface=False)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("trace", help="term-level dump of one evaluation")
    add_common(p)
    p.add_argument("--class", dest="class_text", required=True)
    p.add_argument("--alpha", default=None, help="fixed tangencies, k:c,... or 0")
    p.add_argument("--beta", default=None, help="moving tangencies, k:c,... or 0")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("scan", help="property verification suites")
    add_common(p)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument(
        "--mode",
        required=True,
        choices=["positivity", "monotonicity", "symmetry", "blowdown", "epath"],
    )
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("chain", help="nef-big chain between two classes")
    add_common(p)
    p.add_argument("--from", dest="from_text", required=True)
    p.add_argument("--to", dest="to_text", required=True)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("growth", help="exact values of W(nD)")
    add_common(p)
    p.add_argument("--class", dest="class_text", required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("cache", help="inspect a persistent store")
    p.add_argument("action", choices=["info"])
    p.add_argument("path")
    p.set_defaults(func=cmd_cache)
    return parser


def _spec(args) -> SurfaceSpec:
    return parse_surface(
        args.surface, twist=args.twist, blowdown=args.blowdown, e_choice=args.e_choice
    )


def _cache_path(args) -> Optional[str]:
    if args.no_cache:
        return None
    return args.cache or os.environ.get("WELSCHINGER_CACHE")


def _load_store(path: Optional[str]) -> Store:
    if path and os.path.exists(path):
        return cache_load(path)
    return {}


def _evaluator(spec: SurfaceSpec, args) -> Tuple[Evaluator, Optional[str], Store]:
    path = _cache_path(args)
    store = _load_store(path)
    return Evaluator(spec, store=store), path, store


def _save(ev: Evaluator, path: Optional[str], store: Store) -> None:
    if path:
        ev.dump(store)
        cache_save(store, path)


def cmd_compute(args) -> int:
    spec = _spec(args)
    d = spec.parse_class(args.class_text)
    ev, path, store = _evaluator(spec, args)
    report = invariant_report(spec, d, ev)
    _save(ev, path, store)
    if args.json:
        payload = {
            "surface": report.surface_id,
            "class": report.class_text,
            "value": str(report.value),
            "point_count": report.point_count,
            "cache": report.cache_stats,
        }
        if not args.no_timing:
            payload["elapsed_s"] = round(report.elapsed, 6)
        print(json.dumps(payload, sort_keys=True))
    else:
        print(report.value)
    return 0


def cmd_table(args) -> int:
    path = _cache_path(args)
    store = _load_store(path)
    rows = {}
    started = time.perf_counter()
    evaluators = []
    for surface, twist, kind in TABLE_COLUMNS:
        spec = parse_surface(surface, twist=twist)
        ev = Evaluator(spec, store=store)
        evaluators.append((spec, ev, kind))
    for row_name in ("-K", "-2K"):
        values = []
        for spec, ev, kind in evaluators:
            text = CONIC_ROWS[row_name] if kind == "conic" else row_name
            values.append(welschinger(spec, spec.parse_class(text), ev))
        rows[row_name] = tuple(values)
    elapsed = time.perf_counter() - started
    for _, ev, _ in evaluators:
        ev.dump(store)
    if path:
        cache_save(store, path)

    mismatches = []
    for row_name, values in rows.items():
        if values != GOLDEN_TABLE[row_name]:
            mismatches.append((row_name, values, GOLDEN_TABLE[row_name]))
    header = [f"{s},{t}" for s, t, _ in TABLE_COLUMNS]
    if args.json:
        payload = {
            "columns": header,
            "rows": {k: [str(v) for v in vals] for k, vals in rows.items()},
            "golden_match": not mismatches,
        }
        if not args.no_timing:
            payload["elapsed_s"] = round(elapsed, 3)
        print(json.dumps(payload, sort_keys=True))
    else:
        width = max(len(h) for h in header) + 2
        label = "D"
        print(label.ljust(8) + "".join(h.rjust(width) for h in header))
        for row_name, values in rows.items():
            print(
                row_name.ljust(8)
                + "".join(str(v).rjust(width) for v in values)
            )
        if not args.no_timing:
            print(f"# elapsed: {elapsed:.2f}s", file=sys.stderr)
    if mismatches:
        for row_name, got, want in mismatches:
            print(f"MISMATCH {row_name}: got {got}, reference {want}",
                  file=sys.stderr)
        return 1
    if not args.json:
        print("all 16 values match the reference table")
    return 0


def cmd_trace(args) -> int:
    spec = _spec(args)
    d = spec.parse_class(args.class_text)
    ev, path, store = _evaluator(spec, args)
    if args.alpha is None and args.beta is None:
        key = top_key(spec, d)
    else:
        try:
            alpha = TangencyVector.parse(args.alpha or "0")
            beta = TangencyVector.parse(args.beta or "0")
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        key = make_key(spec, d, alpha, beta)
    records = ev.expand(key)
    total = ev.eval(key)
    _save(ev, path, store)
    for record in records:
        print(json.dumps(record.to_dict(spec), sort_keys=True))
    print(json.dumps({"total": str(total)}))
    contributions = sum(r.contribution for r in records)
    if contributions != total:
        raise InternalCheckError(
            f"trace total {contributions} differs from eval {total}"
        )
    return 0


def _emit_rows(args, header: List[str], rows: List[tuple]) -> None:
    if args.json:
        print(json.dumps([dict(zip(header, r)) for r in rows]))
    elif args.csv:
        print(",".join(header))
        for r in rows:
            print(",".join(str(x) for x in r))
    else:
        for r in rows:
            print("  ".join(str(x) for x in r))


def cmd_scan(args) -> int:
    if args.bound < 1:
        raise ValidationError("scan bound must be >= 1")
    mode = args.mode
    spec = _spec(args)
    ev, path, store = _evaluator(spec, args)
    violations = 0
    if mode == "positivity":
        rows = positivity_scan(spec, args.bound, ev, threads=args.threads)
        out = [(spec.class_str(d), str(v), "ok" if pos else "NON-POSITIVE")
               for d, v, pos in rows]
        violations = sum(1 for _, _, pos in rows if not pos)
        _emit_rows(args, ["class", "value", "status"], out)
        if violations and spec.lattice.model == "cubic" and spec.twist == "0":
            print("note: expected: outside theorem scope (untwisted, "
                  "disconnected real part)", file=sys.stderr)
    elif mode == "monotonicity":
        pairs = sample_monotone_pairs(spec, 10, antik_cap=args.bound)
        out = []
        for d_prime, d in pairs:
            rep = monotonicity_check(spec, d, d_prime, ev)
            out.append(
                (spec.class_str(d_prime), spec.class_str(d), rep.product,
                 rep.lhs, rep.rhs, "ok" if rep.holds else "VIOLATION")
            )
            violations += 0 if rep.holds else 1
        _emit_rows(
            args, ["from", "to", "product", "W(D)", "bound", "status"], out
        )
    elif mode == "symmetry":
        rows = symmetry_scan(spec, args.bound, evaluator=ev)
        out = [(spec.class_str(a), spec.class_str(b), v1, v2,
                "ok" if same else "VIOLATION") for a, b, v1, v2, same in rows]
        violations = sum(1 for r in rows if not r[4])
        _emit_rows(args, ["class", "relabeled", "value", "value2", "status"], out)
    elif mode == "blowdown":
        rows = blowdown_scan(args.bound)
        out = [(spec.class_str(d), v1, v2, "ok" if same else "VIOLATION")
               for d, v1, v2, same in rows]
        violations = sum(1 for r in rows if not r[3])
        _emit_rows(args, ["class", "full", "filtered", "status"], out)
    else:  # epath
        rows = path_equivalence_scan(args.bound)
        out = [(spec.class_str(d), v1, v2, "ok" if same else "VIOLATION")
               for d, v1, v2, same in rows]
        violations = sum(1 for r in rows if not r[3])
        _emit_rows(args, ["class", "full", "reduced", "status"], out)
    _save(ev, path, store)
    return 1 if violations else 0


def cmd_chain(args) -> int:
    spec = _spec(args)
    d_prime = spec.parse_class(args.from_text)
    d = spec.parse_class(args.to_text)
    chain = nef_chain(spec, d_prime, d)
    cur = d_prime
    rows = []
    for line in chain:
        step = spec.intersect(cur, line)
        cur = cur + line
        rows.append((spec.class_str(line), step, spec.class_str(cur)))
    _emit_rows(args, ["line", "meets", "partial_sum"], rows)
    return 0


def cmd_growth(args) -> int:
    spec = _spec(args)
    d = spec.parse_class(args.class_text)
    ev, path, store = _evaluator(spec, args)
    rows = growth_report(spec, d, args.n_max, ev)
    _save(ev, path, store)
    out = [
        (r.n, str(r.value), "" if r.ratio is None else f"{r.ratio:.6f}")
        for r in rows
    ]
    _emit_rows(args, ["n", "value", "log_ratio"], out)
    return 0


def cmd_cache(args) -> int:
    store = cache_load(args.path)
    by_surface: dict = {}
    for key in store:
        sid = key.split("|", 1)[0]
        by_surface[sid] = by_surface.get(sid, 0) + 1
    print(f"records: {len(store)}")
    for sid in sorted(by_surface):
        print(f"  {sid}: {by_surface[sid]}")
    return 0


_VALUE_FLAGS = {
    "--class", "--from", "--to", "--alpha", "--beta", "--E", "--surface",
    "--blowdown", "--cache", "--twist", "--bound", "--mode", "--threads",
    "--n-max",
}


def _fuse_values(argv: List[str]) -> List[str]:
    """Join value-taking flags with their argument so classes like -2K parse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    raw = list(argv) if argv is not None else sys.argv[1:]
    args = parser.parse_args(_fuse_values(raw))
    print("# welschinger " + " ".join(raw), file=sys.stderr)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, CacheError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
