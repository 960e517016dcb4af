"""Picard-lattice arithmetic for the two surface families.

Two integer lattices are used.  The degree-3 blown-up-plane model has rank 7
with basis L, E1..E6 and intersection form diag(1, -1, -1, -1, -1, -1, -1);
its 27 classes of (-1)-curves are the E_i, the L - E_i - E_j and the
2L - (five of the E_i).  The two-component cubic is described through its
rank-3 sublattice of real classes, spanned by the three real lines L1, L2,
L3 with L_i^2 = -1 and L_i . L_j = 1: the anticanonical pencil through a
real line splits off the other two real lines meeting at a point, which
together with adjunction fixes the form.  In both models the canonical
class, nef tests and the expected-dimension count

    R(D, beta) = -D.(K + E) + |beta| - 1      (divisor class)
    R(P, beta) = -[P].(K + E) + |beta| - 2    (conjugate pair)

are pure lattice arithmetic.

Coordinates are stored as raw coefficients in the basis: a rank-7 class
d*L - sum m_i E_i is the tuple (d, -m1, ..., -m6); a rank-3 class is
(d1, d2, d3).  The textual forms are ``d;m1,...,m6`` and ``d1,d2,d3``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence, Tuple

from .errors import ParseError


class DivisorClass:
    """Immutable integer vector in a fixed lattice basis."""

    __slots__ = ("coords", "_hash")

    def __init__(self, coords: Sequence[int]):
        self.coords: Tuple[int, ...] = tuple(int(c) for c in coords)
        self._hash = hash(self.coords)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check_rank(other)
        return DivisorClass(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check_rank(other)
        return DivisorClass(a - b for a, b in zip(self.coords, other.coords))

    def __mul__(self, n: int) -> "DivisorClass":
        return DivisorClass(n * a for a in self.coords)

    __rmul__ = __mul__

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(-a for a in self.coords)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def _check_rank(self, other: "DivisorClass") -> None:
        if len(self.coords) != len(other.coords):
            raise ValueError(
                f"rank mismatch: {len(self.coords)} vs {len(other.coords)}"
            )

    def __eq__(self, other) -> bool:
        return isinstance(other, DivisorClass) and self.coords == other.coords

    def __lt__(self, other: "DivisorClass") -> bool:
        return self.coords < other.coords

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DivisorClass{self.coords}"


@dataclass(frozen=True)
class Lattice:
    """Intersection lattice of one surface model."""

    model: str  # "p2" or "cubic"
    rank: int
    gram: Tuple[Tuple[int, ...], ...]
    canonical: DivisorClass
    lines: Tuple[DivisorClass, ...]

    def intersect(self, a: DivisorClass, b: DivisorClass) -> int:
        ac, bc = a.coords, b.coords
        if len(ac) != self.rank or len(bc) != self.rank:
            raise ValueError("class rank does not match lattice rank")
        if self.model == "p2":
            return (
                ac[0] * bc[0]
                - ac[1] * bc[1] - ac[2] * bc[2] - ac[3] * bc[3]
                - ac[4] * bc[4] - ac[5] * bc[5] - ac[6] * bc[6]
            )
        # -1 on the diagonal, +1 off: (sum a)(sum b) - 2 sum a_i b_i.
        return (ac[0] + ac[1] + ac[2]) * (bc[0] + bc[1] + bc[2]) - 2 * (
            ac[0] * bc[0] + ac[1] * bc[1] + ac[2] * bc[2]
        )

    def intersect_gram(self, a: DivisorClass, b: DivisorClass) -> int:
        """Reference pairing through the stored Gram matrix (for checks)."""
        return sum(
            a.coords[i] * self.gram[i][j] * b.coords[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )


def _p2_lines() -> Tuple[DivisorClass, ...]:
    lines = []
    for i in range(6):
        e = [0] * 7
        e[1 + i] = 1
        lines.append(DivisorClass(e))
    for i, j in itertools.combinations(range(6), 2):
        e = [1] + [0] * 6
        e[1 + i] = e[1 + j] = -1
        lines.append(DivisorClass(e))
    for omitted in range(6):
        e = [2] + [-1] * 6
        e[1 + omitted] = 0
        lines.append(DivisorClass(e))
    return tuple(lines)


P2_LATTICE = Lattice(
    model="p2",
    rank=7,
    gram=tuple(
        tuple((1 if i == 0 else -1) if i == j else 0 for j in range(7))
        for i in range(7)
    ),
    canonical=DivisorClass((-3, 1, 1, 1, 1, 1, 1)),
    lines=_p2_lines(),
)

CUBIC_LATTICE = Lattice(
    model="cubic",
    rank=3,
    gram=tuple(tuple(-1 if i == j else 1 for j in range(3)) for i in range(3)),
    canonical=DivisorClass((-1, -1, -1)),
    lines=(
        DivisorClass((1, 0, 0)),
        DivisorClass((0, 1, 0)),
        DivisorClass((0, 0, 1)),
    ),
)


def intersect(lat: Lattice, a: DivisorClass, b: DivisorClass) -> int:
    return lat.intersect(a, b)


def canonical_class(lat: Lattice) -> DivisorClass:
    return lat.canonical


def line_classes(lat: Lattice) -> Tuple[DivisorClass, ...]:
    return lat.lines


def conj_class(conj_perm: Tuple[int, ...], d: DivisorClass) -> DivisorClass:
    """Apply the conjugation involution, given as a basis permutation."""
    return DivisorClass(d.coords[conj_perm[i]] for i in range(len(conj_perm)))


def conj_perm_p2(n_real: int) -> Tuple[int, ...]:
    """Basis permutation fixing L and E_1..E_{n_real}, swapping later pairs."""
    if n_real % 2 != 0:
        raise ValueError("real exceptional classes must come in count 0, 2, 4 or 6")
    perm = list(range(7))
    i = 1 + n_real
    while i + 1 < 7:
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        i += 2
    return tuple(perm)


CONJ_ID_CUBIC: Tuple[int, ...] = (0, 1, 2)


def r_dim(
    lat: Lattice,
    e_class: DivisorClass,
    class_sum: DivisorClass,
    beta_norm: int,
    pair: bool,
) -> int:
    """Expected dimension -[D].(K+E) + |beta| - (1 or 2).

    `beta_norm` is the norm of the combined vector beta_re + 2*beta_im.
    """
    ke = lat.canonical + e_class
    return -lat.intersect(class_sum, ke) + beta_norm - (2 if pair else 1)


def is_nef(lat: Lattice, d: DivisorClass) -> bool:
    """Nef test: zero, or non-negative on every line with K.D < 0."""
    if d.is_zero():
        return True
    if lat.intersect(lat.canonical, d) >= 0:
        return False
    return all(lat.intersect(d, line) >= 0 for line in lat.lines)


def is_nef_big(lat: Lattice, d: DivisorClass) -> bool:
    if lat.model == "cubic":
        d1, d2, d3 = d.coords
        return (
            d1 > 0
            and d2 > 0
            and d3 > 0
            and d1 + d2 >= d3
            and d1 + d3 >= d2
            and d2 + d3 >= d1
        )
    return is_nef(lat, d) and lat.intersect(d, d) > 0


def class_to_str(lat: Lattice, d: DivisorClass) -> str:
    if lat.model == "cubic":
        return ",".join(str(c) for c in d.coords)
    mults = ",".join(str(-c) for c in d.coords[1:])
    return f"{d.coords[0]};{mults}"


def parse_class(lat: Lattice, text: str) -> DivisorClass:
    """Parse ``d;m1,...,m6`` / ``d1,d2,d3``, or the shorthand ``-nK``."""
    text = text.strip()
    k_mult = _parse_antik(text)
    if k_mult is not None:
        return lat.canonical * (-k_mult)
    try:
        if lat.model == "cubic":
            parts = [int(p) for p in text.split(",")]
            if len(parts) != 3:
                raise ValueError
            return DivisorClass(parts)
        head, _, tail = text.partition(";")
        mults = [int(p) for p in tail.split(",")]
        if not tail or len(mults) != 6:
            raise ValueError
        return DivisorClass([int(head)] + [-m for m in mults])
    except ValueError:
        raise ParseError(f"cannot parse divisor class {text!r}") from None


def _parse_antik(text: str) -> int | None:
    if not text.startswith("-") or not text.endswith("K"):
        return None
    body = text[1:-1]
    if body == "":
        return 1
    if body.isdigit():
        return int(body)
    return None


def nef_classes_up_to(
    lat: Lattice,
    conj_perm: Tuple[int, ...],
    max_antik: int,
) -> Tuple[DivisorClass, ...]:
    """All conjugation-invariant nef classes with 1 <= -K.D <= max_antik.

    On the rank-7 model a nef class dL - sum m_i E_i satisfies
    0 <= m_i, m_i + m_j <= d and sum m_i <= 12d/5 (average the six conic
    inequalities 2d >= sum-minus-one), hence 3d/5 <= -K.D: the search over
    d <= 5*max_antik/3 is complete.  On the rank-3 model -K.D = d1+d2+d3
    bounds every coordinate directly.
    """
    found = []
    if lat.model == "cubic":
        for coords in itertools.product(range(max_antik + 1), repeat=3):
            d = DivisorClass(coords)
            s = sum(coords)
            if 1 <= s <= max_antik and is_nef(lat, d):
                found.append(d)
        return tuple(sorted(found))

    # Conjugation-invariance forces m constant on swapped index pairs.
    orbits = _index_orbits(conj_perm)
    d_max = (5 * max_antik) // 3
    for deg in range(d_max + 1):
        sum_cap = (12 * deg) // 5

        def rec(orbit_idx: int, m: list, max_m: int, total: int) -> None:
            if orbit_idx == len(orbits):
                cand = DivisorClass([deg] + [-x for x in m])
                antik = 3 * deg - total
                if 1 <= antik <= max_antik and is_nef(lat, cand):
                    found.append(cand)
                return
            orbit = orbits[orbit_idx]
            for v in range(min(deg - max_m, deg) + 1):
                new_total = total + v * len(orbit)
                if new_total > sum_cap:
                    break
                for i in orbit:
                    m[i] = v
                rec(orbit_idx + 1, m, max(max_m, v), new_total)
            for i in orbit:
                m[i] = 0

        rec(0, [0] * 6, 0, 0)
    return tuple(sorted(found))


def _index_orbits(conj_perm: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    # Orbits of the exceptional indices 1..6, shifted to 0-based m-slots.
    seen = set()
    orbits = []
    for i in range(1, 7):
        if i in seen:
            continue
        j = conj_perm[i]
        orbit = (i - 1,) if j == i else (i - 1, j - 1)
        seen.update({i, j})
        orbits.append(orbit)
    return tuple(orbits)


def candidate_factors(
    lat: Lattice,
    conj_perm: Tuple[int, ...],
    e_class: DivisorClass,
    antik_budget: int,
    blocked: Tuple[DivisorClass, ...] = (),
    min_e_degree: int = 1,
) -> Tuple[DivisorClass, ...]:
    """Conjugation-invariant classes able to carry a nonzero count as factor.

    The union of (-1)-classes and nef classes of anticanonical degree at
    most `antik_budget` dominates every divisor class with irreducible
    representatives; spurious members are harmless because they evaluate
    to zero.  `blocked` lists exceptional classes of blown-down curves:
    anything crossing them is dropped.  The class -(K+E) is kept here, its
    exclusion as a factor is enforced at the use site.
    """
    if antik_budget < 1:
        raise ValueError("anticanonical budget must be >= 1")
    out = []
    for line in lat.lines:
        if conj_class(conj_perm, line) != line:
            continue
        if lat.intersect(line, e_class) < min_e_degree:
            continue
        if any(lat.intersect(line, b) != 0 for b in blocked):
            continue
        out.append(line)
    for d in nef_classes_up_to(lat, conj_perm, antik_budget):
        if lat.intersect(d, e_class) < min_e_degree:
            continue
        if any(lat.intersect(d, b) != 0 for b in blocked):
            continue
        out.append(d)
    return tuple(sorted(set(out)))


def sum_classes(lat: Lattice, classes: Sequence[DivisorClass]) -> DivisorClass:
    zero = DivisorClass((0,) * lat.rank)
    return reduce(lambda a, b: a + b, classes, zero)


def effective_line_sums(
    lat: Lattice,
    target: DivisorClass,
    limit: int,
) -> Iterator[Tuple[DivisorClass, ...]]:
    """Decompositions of `target` into at most `limit` line classes.

    Used by the chain search; yields tuples in non-decreasing canonical
    order, each unordered decomposition once.
    """
    lines = sorted(lat.lines)

    def rec(remaining: DivisorClass, start: int, depth: int, acc: list):
        if remaining.is_zero():
            yield tuple(acc)
            return
        if depth == limit:
            return
        for idx in range(start, len(lines)):
            acc.append(lines[idx])
            yield from rec(remaining - lines[idx], idx, depth + 1, acc)
            acc.pop()

    yield from rec(target, 0, 0, [])
