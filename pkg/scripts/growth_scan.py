#!/usr/bin/env python3
"""Exact values of W(nD) with the ratio log W(nD) / (n log n).

The counts grow superexponentially; the ratio column approaches the
anticanonical degree of D only as n grows, so no convergence is claimed
at the small n reachable here.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from welschinger import Evaluator, growth_report, parse_surface  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--surface", default="B1")
    parser.add_argument("--twist", default="F")
    parser.add_argument("--class", default="-K", dest="klass")
    parser.add_argument("--n-max", type=int, default=4)
    args = parser.parse_args()

    spec = parse_surface(args.surface, twist=args.twist)
    ev = Evaluator(spec)
    d = spec.parse_class(args.klass)
    print(f"# {spec.surface_id}  D = {spec.class_str(d)}  "
          f"c1.D = {spec.antik_degree(d)}")
    for row in growth_report(spec, d, args.n_max, ev):
        ratio = "" if row.ratio is None else f"{row.ratio:.6f}"
        print(f"{row.n:3d}  {row.value}  {ratio}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
