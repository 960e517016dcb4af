"""Arithmetic over finitely supported sequences of non-negative integers.

A tangency vector records, for each order k >= 1, how many local branches
meet the auxiliary curve with multiplicity exactly k.  The semigroup of such
vectors carries the bookkeeping of the whole recursion: the norm ``|v|``
(number of branches), the weighted degree ``Iv = sum k*v_k`` (total
intersection multiplicity), the products ``I^v = prod k^(v_k)`` and
``v! = prod v_k!``, and vector multinomials.  "Odd support" means every
stored order is odd; real branches of real curves can only meet a real
curve transversally-or-oddly, which is why the recursion lives on the odd
subsemigroup.

Vectors are immutable and hashable; they are used directly as parts of memo
keys.  The canonical textual form is ``k1:c1,k2:c2,...`` with strictly
increasing orders, and ``0`` for the zero vector.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping
from functools import reduce
from typing import Iterable, Iterator, Tuple


class TangencyVector:
    """Finitely supported map {order k >= 1 -> count >= 1}, immutable."""

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping[int, int] | Iterable[Tuple[int, int]] = ()):
        if isinstance(entries, Mapping):
            items = entries.items()
        else:
            items = entries
        cleaned = {}
        for k, c in items:
            if k < 1:
                raise ValueError(f"tangency order must be >= 1, got {k}")
            if c < 0:
                raise ValueError(f"count must be >= 0, got {c} at order {k}")
            if c:
                cleaned[k] = cleaned.get(k, 0) + c
        self._entries: Tuple[Tuple[int, int], ...] = tuple(sorted(cleaned.items()))
        self._hash = hash(self._entries)

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def zero() -> "TangencyVector":
        return _ZERO

    @staticmethod
    def theta(k: int, count: int = 1) -> "TangencyVector":
        """`count` branches of order k (the basis vector when count is 1)."""
        return TangencyVector({k: count})

    @staticmethod
    def parse(text: str) -> "TangencyVector":
        text = text.strip()
        if text == "0":
            return _ZERO
        entries = []
        for chunk in text.split(","):
            k_str, _, c_str = chunk.partition(":")
            entries.append((int(k_str), int(c_str)))
        v = TangencyVector(entries)
        if str(v) != text:
            raise ValueError(f"non-canonical tangency vector text: {text!r}")
        return v

    # -- basic protocol --------------------------------------------------------

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, TangencyVector) and self._entries == other._entries

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"TangencyVector({dict(self._entries)!r})"

    def __str__(self) -> str:
        if not self._entries:
            return "0"
        return ",".join(f"{k}:{c}" for k, c in self._entries)

    def __getitem__(self, k: int) -> int:
        for kk, c in self._entries:
            if kk == k:
                return c
        return 0

    def support(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self._entries)

    def key(self) -> Tuple[Tuple[int, int], ...]:
        """Canonical hashable form, suitable as part of a memo key."""
        return self._entries

    # -- semigroup arithmetic ---------------------------------------------------
    # Entries are kept sorted, so add/sub/compare are merge walks over
    # (usually very short) tuples; no re-validation or re-sorting.

    def __add__(self, other: "TangencyVector") -> "TangencyVector":
        if not other._entries:
            return self
        if not self._entries:
            return other
        d = dict(self._entries)
        for k, c in other._entries:
            d[k] = d.get(k, 0) + c
        return _from_sorted(tuple(sorted(d.items())))

    def __sub__(self, other: "TangencyVector") -> "TangencyVector":
        if not other._entries:
            return self
        rest = dict(other._entries)
        out = []
        for k, c in self._entries:
            n = c - rest.pop(k, 0)
            if n < 0:
                raise ValueError(f"subtraction leaves negative count at order {k}")
            if n:
                out.append((k, n))
        if rest:
            k = next(iter(rest))
            raise ValueError(f"subtraction leaves negative count at order {k}")
        return _from_sorted(tuple(out))

    def __le__(self, other: "TangencyVector") -> bool:
        if len(self._entries) > len(other._entries):
            return False
        for k, c in self._entries:
            if c > other[k]:
                return False
        return True

    def __ge__(self, other: "TangencyVector") -> bool:
        return other <= self


def _from_sorted(entries: Tuple[Tuple[int, int], ...]) -> TangencyVector:
    v = object.__new__(TangencyVector)
    v._entries = entries
    v._hash = hash(entries)
    return v


_ZERO = TangencyVector()


def norm(v: TangencyVector) -> int:
    """Total number of branches, sum of all counts."""
    return sum(c for _, c in v)


def iweight(v: TangencyVector) -> int:
    """Total intersection multiplicity, sum of k * v_k."""
    return sum(k * c for k, c in v)


def coeff_helpers(v: TangencyVector) -> Tuple[int, int]:
    """Return (prod k^(v_k), prod v_k!), both as exact integers."""
    ipow = 1
    fact = 1
    for k, c in v:
        ipow *= k**c
        fact *= math.factorial(c)
    return ipow, fact


def factorial(v: TangencyVector) -> int:
    return coeff_helpers(v)[1]


def multinomial(v: TangencyVector, parts: Iterable[TangencyVector]) -> int:
    """Vector multinomial v! / (prod parts_i! * (v - sum parts)!).

    Computed as a product of per-order integer multinomials, so the result
    is exact and no division is ever performed.
    """
    parts = list(parts)
    total = reduce(lambda a, b: a + b, parts, _ZERO)
    if not total <= v:
        raise ValueError("parts exceed the vector componentwise")
    result = 1
    for k, c in v:
        remaining = c
        for p in parts:
            pk = p[k]
            result *= math.comb(remaining, pk)
            remaining -= pk
    return result


def binom(v: TangencyVector, w: TangencyVector) -> int:
    """Componentwise product of binomials C(v_k, w_k); 0 unless w <= v."""
    if not w <= v:
        return 0
    result = 1
    for k, c in w:
        result *= math.comb(v[k], c)
    return result


def is_odd_support(v: TangencyVector) -> bool:
    """True when every stored order is odd (vacuously true for 0)."""
    return all(k % 2 == 1 for k, _ in v)


def enumerate_le(v: TangencyVector) -> Iterator[TangencyVector]:
    """All w with 0 <= w <= v componentwise, in lexicographic count order."""
    keys = v.support()
    ranges = [range(v[k] + 1) for k in keys]
    for counts in itertools.product(*ranges):
        yield TangencyVector(zip(keys, counts))


def distribute(target: TangencyVector, m: int) -> Iterator[Tuple[TangencyVector, ...]]:
    """All ordered m-tuples of vectors summing componentwise to target.

    The per-order counts are split independently (stars and bars), iterated
    in a fixed lexicographic order for reproducibility.
    """
    if m < 0:
        raise ValueError("tuple length must be >= 0")
    if m == 0:
        if target:
            return
        yield ()
        return

    keys = target.support()

    def splits(total: int, slots: int) -> Iterator[Tuple[int, ...]]:
        if slots == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in splits(total - first, slots - 1):
                yield (first,) + rest

    per_key = [list(splits(target[k], m)) for k in keys]
    for combo in itertools.product(*per_key):
        yield tuple(
            TangencyVector({k: combo[i][j] for i, k in enumerate(keys)})
            for j in range(m)
        )


def odd_partitions(total: int) -> Tuple[TangencyVector, ...]:
    """All odd-support vectors with iweight equal to total."""
    if total < 0:
        return ()
    results = []

    def rec(remaining: int, max_part: int, acc: dict) -> None:
        if remaining == 0:
            results.append(TangencyVector(dict(acc)))
            return
        k = min(max_part, remaining)
        if k % 2 == 0:
            k -= 1
        while k >= 1:
            acc[k] = acc.get(k, 0) + 1
            rec(remaining - k, k, acc)
            acc[k] -= 1
            if not acc[k]:
                del acc[k]
            k -= 2

    rec(total, total, {})
    return tuple(results)


ZERO = _ZERO
theta = TangencyVector.theta
