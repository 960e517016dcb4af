#!/usr/bin/env python3
"""Recompute the eight-column reference table of invariants from scratch.

Equivalent to `welschinger table`, but prints per-column timings and memo
sizes, which is useful when profiling the evaluator.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from welschinger import Evaluator, make_surface, welschinger  # noqa: E402

COLUMNS = [
    ("P2[6,0]", ("P2", 6, 0, "0"), {"-K": "-K", "-2K": "-2K"}),
    ("P2[4,1]", ("P2", 4, 1, "0"), {"-K": "-K", "-2K": "-2K"}),
    ("P2[2,2]", ("P2", 2, 2, "0"), {"-K": "-K", "-2K": "-2K"}),
    ("P2[0,3]", ("P2", 0, 3, "0"), {"-K": "-K", "-2K": "-2K"}),
    ("B,0", ("B", 0, 0, "0"), {"-K": "2,1,1", "-2K": "4,2,2"}),
    ("B,F", ("B", 0, 0, "F"), {"-K": "2,1,1", "-2K": "4,2,2"}),
    ("B1,0", ("B1", 0, 0, "0"), {"-K": "-K", "-2K": "-2K"}),
    ("B1,F", ("B1", 0, 0, "F"), {"-K": "-K", "-2K": "-2K"}),
]

EXPECTED = {
    "-K": [8, 6, 4, 2, 0, 4, 0, 4],
    "-2K": [1000, 522, 236, 78, 0, 512, 0, 160],
}


def main() -> int:
    rows = {"-K": [], "-2K": []}
    for name, (model, a, b, twist), classes in COLUMNS:
        spec = make_surface(model, a, b, twist=twist)
        ev = Evaluator(spec)
        started = time.perf_counter()
        for row, text in classes.items():
            rows[row].append(welschinger(spec, spec.parse_class(text), ev))
        elapsed = time.perf_counter() - started
        print(f"{name:9s} {elapsed:7.2f}s  memo={ev.cache_stats()['entries']}")
    ok = True
    for row, values in rows.items():
        status = "ok" if values == EXPECTED[row] else "MISMATCH"
        ok = ok and values == EXPECTED[row]
        print(f"{row:4s} {values}  [{status}]")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
