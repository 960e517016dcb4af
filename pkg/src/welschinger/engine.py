"""Memoized exact evaluator of the curve-count recursion.

A state ("key") is a real divisor class D together with two odd-support
tangency vectors: alpha fixes intersection points with the auxiliary curve
E, beta lets them move.  The number of free point constraints is the
expected dimension n = -D.(K+E) + |beta| - 1.  The recursion expresses the
signed count at n > 0 through states of smaller n:

* the first sum converts one moving tangency of each available order into
  a fixed one (k-th summand: alpha + theta_k, beta - theta_k);
* the split sum runs over ways the counted curves can degenerate into the
  auxiliary curve plus a collection of components.  A summand chooses
  multiplicities consumed by fixed points (alpha0 <= alpha), by moving
  points (beta0 <= beta, weight 2^|beta0|/beta0!), a number l >= 0 of
  components on the two pencil members tangent to E (weight l + 1), an
  unordered collection of divisor-class factors, each decorated with its
  own (alpha_i, beta_i) and a marked moving branch gamma_i = theta_j, and
  a subset of the finite conjugate-pair menu.  The class equation

      D - E = sum [D_i] - (2l + I(alpha0) + I(beta0)) (K + E)

  together with the marked-branch balance sum(beta_i - gamma_i) =
  beta - beta0 pins the combinatorics; the factor dimensions then satisfy
  sum n_i = n - 1 - |beta0|, which makes the combined coefficient
  2^|beta0| (n-1)! / (prod n_i! * beta0!) a genuine multinomial.  Both
  identities are enforced, not assumed: any violation raises.

All arithmetic is exact (Python integers); the only divisions are inside
integer multinomials.  Values are memoized per canonical key; the store
round-trips through a small versioned text format, one record per line.

On the two-component cubic with the component twist there is a second,
independently coded evaluation route with no l-parameter and no pair
items, whose rigid factors are restricted to real lines.  It keeps its own
memo, so cross-route equality is a genuine check rather than a cache
read-back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .errors import CacheError, InternalCheckError, ValidationError
from .picard import DivisorClass, candidate_factors, class_to_str
from .surfaces import SurfaceSpec
from .tangency import (
    TangencyVector,
    enumerate_le,
    is_odd_support,
    iweight,
    multinomial,
    norm,
    odd_partitions,
    theta,
)

Store = Dict[str, int]

CACHE_HEADER = "WELSCHINGER-CACHE v1"

ValueFn = Callable[[DivisorClass, TangencyVector, TangencyVector], int]


@dataclass(frozen=True)
class EvalKey:
    """Canonical evaluation state (surface id, D, alpha, beta)."""

    surface_id: str
    d: DivisorClass
    alpha: TangencyVector
    beta: TangencyVector

    def serialize(self, spec: SurfaceSpec) -> str:
        return "|".join(
            (self.surface_id, spec.class_str(self.d), str(self.alpha), str(self.beta))
        )


def make_key(
    spec: SurfaceSpec,
    d: DivisorClass,
    alpha: TangencyVector,
    beta: TangencyVector,
    enforce_filter: bool = True,
) -> EvalKey:
    if not spec.is_real_class(d):
        raise ValidationError(f"class {spec.class_str(d)} is not conjugation-invariant")
    if not (is_odd_support(alpha) and is_odd_support(beta)):
        raise ValidationError("tangency vectors must have odd support")
    if iweight(alpha) + iweight(beta) != spec.e_degree(d):
        raise ValidationError(
            f"I(alpha)+I(beta) = {iweight(alpha) + iweight(beta)} "
            f"!= D.E = {spec.e_degree(d)}"
        )
    if enforce_filter and not spec.class_allowed(d):
        raise ValidationError(f"class {spec.class_str(d)} crosses a blown-down curve")
    return EvalKey(spec.surface_id, d, alpha, beta)


@dataclass(frozen=True)
class FactorRecord:
    d: DivisorClass
    alpha: TangencyVector
    beta: TangencyVector
    gamma: TangencyVector
    n_i: int
    value: int


@dataclass(frozen=True)
class TermRecord:
    """One summand of the recursion right-hand side."""

    kind: str  # "first_sum", "split" or "initial"
    k: Optional[int]
    l: int
    alpha0: TangencyVector
    beta0: TangencyVector
    factors: Tuple[FactorRecord, ...]
    pair_ids: Tuple[str, ...]
    coefficient: int
    contribution: int

    def to_dict(self, spec: SurfaceSpec) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "l": self.l,
            "alpha0": str(self.alpha0),
            "beta0": str(self.beta0),
            "factors": [
                {
                    "class": spec.class_str(f.d),
                    "alpha": str(f.alpha),
                    "beta": str(f.beta),
                    "gamma": str(f.gamma),
                    "n": f.n_i,
                    "value": str(f.value),
                }
                for f in self.factors
            ],
            "pair_ids": list(self.pair_ids),
            "coefficient": str(self.coefficient),
            "contribution": str(self.contribution),
        }


@dataclass(frozen=True)
class _Option:
    """One decorated way a candidate class can appear as a factor."""

    cls: DivisorClass
    coords: Tuple[int, ...]
    e_deg: int
    antik: int
    alpha: TangencyVector
    ialpha: int
    beta: TangencyVector
    n_i: int
    rigid: bool  # n_i == 0 with alpha == 0: subject to the once-only rule
    # (gamma, beta - gamma, iweight(beta - gamma), binomial weight beta_j)
    gammas: Tuple[Tuple[TangencyVector, TangencyVector, int, int], ...]
    memo_key: tuple = ()


@dataclass(frozen=True)
class _Block:
    """All decorated options of one candidate class, for the factor search."""

    cls: DivisorClass
    coords: Tuple[int, ...]
    e_deg: int
    antik: int
    opts: Tuple[_Option, ...]


def _tv_key(v: TangencyVector) -> Tuple:
    return v.key()


def _symmetry_factor(chosen) -> int:
    """Order of the stabilizer of a canonically sorted factor collection:
    the product of multiplicities! over repeated identical decorated
    (class, alpha, beta, gamma) picks."""
    sym = 1
    run = 1
    for i in range(1, len(chosen)):
        if (
            chosen[i][0].memo_key == chosen[i - 1][0].memo_key
            and chosen[i][1] == chosen[i - 1][1]
        ):
            run += 1
            sym *= run
        else:
            run = 1
    return sym


def _multinomial_exact(total: int, parts: List[int], context: str) -> int:
    """(total)! / prod(parts!) with sum(parts) == total, division-free."""
    result = 1
    remaining = total
    for p in parts:
        if p < 0 or p > remaining:
            raise InternalCheckError(
                f"dimension bookkeeping failed ({context}): parts {parts} vs {total}"
            )
        result *= math.comb(remaining, p)
        remaining -= p
    if remaining != 0:
        raise InternalCheckError(
            f"dimension bookkeeping failed ({context}): parts {parts} sum < {total}"
        )
    return result


class Evaluator:
    """Shared-store evaluator bound to one surface specification.

    Thread-safety: all mutable state is confined to idempotent dictionary
    inserts keyed by canonical value-determining keys, so concurrent use
    from several threads converges to identical contents.
    """

    def __init__(
        self,
        spec: SurfaceSpec,
        store: Optional[Store] = None,
        debug_rational: bool = False,
    ):
        self.spec = spec
        self.hits = 0
        self.misses = 0
        self.debug_rational = debug_rational
        self._memo: Dict[tuple, int] = {}
        self._fast_memo: Dict[tuple, int] = {}
        # The factor search stops early on budget overruns only while the
        # block list is sorted; order-robustness tests clear this flag.
        self._assume_sorted_blocks = True
        self._options_cache: Dict[Tuple[int, ...], Tuple[_Option, ...]] = {}
        self._candidates_cache: Dict[int, Tuple[DivisorClass, ...]] = {}
        self._flat_cache: Dict[Tuple[int, bool], Tuple[_Option, ...]] = {}
        menu = spec.pair_menu
        subsets = []
        zero = DivisorClass((0,) * spec.lattice.rank)
        for mask in range(1 << len(menu)):
            idxs = tuple(i for i in range(len(menu)) if mask >> i & 1)
            total = zero
            weight = 1
            for i in idxs:
                total = total + menu[i].class_sum
                weight *= menu[i].weight
            subsets.append((tuple(menu[i].item_id for i in idxs), total, weight))
        self._pair_subsets = tuple(subsets)
        self._zero_coords = zero.coords
        if store:
            self.preload(store)

    # -- public API --------------------------------------------------------------

    def eval(self, key: EvalKey) -> int:
        if key.surface_id != self.spec.surface_id:
            raise ValidationError(
                f"key for {key.surface_id} evaluated on {self.spec.surface_id}"
            )
        return self._value(key.d, key.alpha, key.beta)

    def expand(self, key: EvalKey) -> List[TermRecord]:
        """The exact top-level summands whose contributions total eval(key)."""
        if key.surface_id != self.spec.surface_id:
            raise ValidationError("trace key does not match the evaluator surface")
        d, alpha, beta = key.d, key.alpha, key.beta
        n = self.spec.r_dim_class(d, norm(beta))
        if n < 0:
            return []
        if n == 0:
            # Dimension-zero keys resolve to a single table lookup; emitted
            # so the trace totals always reproduce eval(key).
            weight = self.spec.initial_weight(d, alpha, beta)
            return [TermRecord("initial", None, 0, alpha, beta, (), (), 1, weight)]
        records: List[TermRecord] = []
        for k, _ in beta:
            child = self._value(d, alpha + theta(k), beta - theta(k))
            records.append(
                TermRecord(
                    "first_sum", k, 0, TangencyVector.zero(), TangencyVector.zero(),
                    (), (), 1, child,
                )
            )
        split = list(self._split_terms(d, alpha, beta, n))
        split.sort(
            key=lambda t: (
                t.l,
                _tv_key(t.alpha0),
                _tv_key(t.beta0),
                t.pair_ids,
                tuple(
                    (f.d.coords, _tv_key(f.alpha), _tv_key(f.beta), _tv_key(f.gamma))
                    for f in t.factors
                ),
            )
        )
        records.extend(split)
        return records

    def eval_cubic_fast(self, key: EvalKey) -> int:
        """Reduced recursion on the two-component cubic, component twist only."""
        if self.spec.lattice.model != "cubic" or self.spec.twist != "F":
            raise ValidationError(
                "the reduced recursion applies to the cubic with twist F only"
            )
        if key.surface_id != self.spec.surface_id:
            raise ValidationError("key does not match the evaluator surface")
        return self._fast_value(key.d, key.alpha, key.beta)

    def cache_stats(self) -> dict:
        return {"entries": len(self._memo), "hits": self.hits, "misses": self.misses}

    # -- persistent-store bridge ----------------------------------------------------

    def preload(self, store: Store) -> int:
        """Adopt records of this surface from a string-keyed store."""
        prefix = self.spec.surface_id + "|"
        loaded = 0
        for key_str, value in store.items():
            if not key_str.startswith(prefix):
                continue
            try:
                _, d_str, a_str, b_str = key_str.split("|")
                d = self.spec.parse_class(d_str)
                a = TangencyVector.parse(a_str)
                b = TangencyVector.parse(b_str)
            except Exception as exc:
                raise CacheError(f"malformed cache key {key_str!r}: {exc}") from None
            self._memo[(d.coords, a.key(), b.key())] = value
            loaded += 1
        return loaded

    def dump(self, store: Optional[Store] = None) -> Store:
        """Serialize the in-memory memo into a string-keyed store."""
        if store is None:
            store = {}
        sid = self.spec.surface_id
        lat = self.spec.lattice
        for (coords, a_key, b_key), value in self._memo.items():
            d_str = class_to_str(lat, DivisorClass(coords))
            a_str = _entries_str(a_key)
            b_str = _entries_str(b_key)
            store[f"{sid}|{d_str}|{a_str}|{b_str}"] = value
        return store

    # -- main recursion ------------------------------------------------------------

    def _value(
        self, d: DivisorClass, alpha: TangencyVector, beta: TangencyVector
    ) -> int:
        key = (d.coords, alpha.key(), beta.key())
        cached = self._memo.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        n = self.spec.r_dim_class(d, norm(beta))
        if n < 0:
            value = 0
        elif n == 0:
            value = self.spec.initial_weight(d, alpha, beta)
        else:
            value = 0
            for k, _ in beta:
                value += self._value(d, alpha + theta(k), beta - theta(k))
            for term in self._split_terms(d, alpha, beta, n):
                value += term.contribution
        self._memo[key] = value
        return value

    def _split_terms(
        self, d: DivisorClass, alpha: TangencyVector, beta: TangencyVector, n: int
    ) -> Iterator[TermRecord]:
        spec = self.spec
        ke = spec.k_plus_e()
        de = spec.e_degree(d)
        budget = spec.antik_degree(d - spec.e_class)
        blocks = (
            self._local_blocks(budget, False, d - spec.e_class)
            if budget >= 1
            else ()
        )
        n1 = n - 1
        for alpha0 in enumerate_le(alpha):
            ia0 = iweight(alpha0)
            alpha_budget = alpha - alpha0
            for beta0 in enumerate_le(beta):
                nb0 = norm(beta0)
                if nb0 > n1:
                    continue
                ib0 = iweight(beta0)
                bm_target = beta - beta0
                ns_target = n1 - nb0
                l = 0
                while True:
                    c = 2 * l + ia0 + ib0
                    te = de + 1 - 2 * c
                    if te < 0:
                        break
                    t_class = d - spec.e_class + ke * c
                    if spec.e_degree(t_class) != te:
                        raise InternalCheckError("degree bookkeeping failed on T")
                    for pair_ids, pair_total, pair_weight in self._pair_subsets:
                        t2 = t_class - pair_total
                        for chosen in self._factor_multisets(
                            t2, alpha_budget, bm_target, ns_target, blocks,
                            self._memo, self._value,
                        ):
                            yield self._make_term(
                                n1, l, alpha, alpha0, beta0, nb0, chosen,
                                pair_ids, pair_weight,
                                with_l_weight=True, value_fn=self._value,
                            )
                    l += 1

    def _make_term(
        self,
        n1: int,
        l: int,
        alpha: TangencyVector,
        alpha0: TangencyVector,
        beta0: TangencyVector,
        nb0: int,
        chosen: Tuple[Tuple[_Option, TangencyVector, TangencyVector, int], ...],
        pair_ids: Tuple[str, ...],
        pair_weight: int,
        with_l_weight: bool,
        value_fn: ValueFn,
    ) -> TermRecord:
        l_weight = l + 1 if with_l_weight else 1
        n_parts = [opt.n_i for opt, _, _, _ in chosen]
        coeff = (1 << nb0) * _multinomial_exact(
            n1, n_parts + [cnt for _, cnt in beta0], "sum n_i = n-1-|beta0|"
        )
        coeff *= l_weight
        coeff *= multinomial(alpha, [alpha0] + [opt.alpha for opt, _, _, _ in chosen])
        # The sum runs over unordered collections: slot permutations of
        # repeated identical decorated factors describe the same splitting,
        # so the ordered point-distribution count is divided by the
        # automorphisms.  (chosen is canonically sorted, repeats adjacent.)
        sym = _symmetry_factor(chosen)
        if sym > 1:
            coeff, rem = divmod(coeff, sym)
            if rem:
                raise InternalCheckError(
                    "symmetrized coefficient is not an integer"
                )
        factors = []
        value = coeff * pair_weight
        for opt, gamma, _, bweight in chosen:
            coeff *= bweight
            fval = value_fn(opt.cls, opt.alpha, opt.beta)
            value *= bweight * fval
            factors.append(
                FactorRecord(opt.cls, opt.alpha, opt.beta, gamma, opt.n_i, fval)
            )
        if self.debug_rational:
            self._crosscheck_coefficient(
                n1, l_weight, alpha, alpha0, beta0, chosen, coeff
            )
        return TermRecord(
            "split", None, l, alpha0, beta0, tuple(factors), pair_ids, coeff, value
        )

    def _crosscheck_coefficient(self, n1, l_weight, alpha, alpha0, beta0, chosen, coeff):
        frac = Fraction(1 << norm(beta0), 1)
        for _, cnt in beta0:
            frac /= math.factorial(cnt)
        frac *= l_weight
        frac *= multinomial(alpha, [alpha0] + [opt.alpha for opt, _, _, _ in chosen])
        frac *= math.factorial(n1)
        for opt, _, _, bweight in chosen:
            frac /= math.factorial(opt.n_i)
            frac *= bweight
        frac /= _symmetry_factor(chosen)
        if frac.denominator != 1 or frac != coeff:
            raise InternalCheckError(
                f"rational cross-check failed: {frac} vs integer {coeff}"
            )

    # -- factor enumeration ----------------------------------------------------------

    def _candidates(self, budget: int) -> Tuple[DivisorClass, ...]:
        if budget < 1:
            return ()
        cached = self._candidates_cache.get(budget)
        if cached is None:
            cached = candidate_factors(
                self.spec.lattice,
                self.spec.conj_perm,
                self.spec.e_class,
                budget,
                blocked=self.spec.candidate_blocked(),
            )
            self._candidates_cache[budget] = cached
        return cached

    def _class_options(self, cls: DivisorClass) -> Tuple[_Option, ...]:
        cached = self._options_cache.get(cls.coords)
        if cached is not None:
            return cached
        spec = self.spec
        e_deg = spec.e_degree(cls)
        antik = spec.antik_degree(cls)
        opts: List[_Option] = []
        for ia in range(e_deg):  # beta stays nonzero: I(beta) = e_deg - ia >= 1
            for av in odd_partitions(ia):
                for bv in odd_partitions(e_deg - ia):
                    n_i = spec.r_dim_class(cls, norm(bv))
                    if n_i < 0:
                        continue
                    gammas = tuple(
                        (theta(j), bv - theta(j), iweight(bv) - j, bv[j])
                        for j in bv.support()
                    )
                    opts.append(
                        _Option(
                            cls, cls.coords, e_deg, antik, av, iweight(av), bv,
                            n_i, rigid=(n_i == 0 and not av), gammas=gammas,
                            memo_key=(cls.coords, av.key(), bv.key()),
                        )
                    )
        opts.sort(key=lambda o: (_tv_key(o.alpha), _tv_key(o.beta)))
        result = tuple(opts)
        self._options_cache[cls.coords] = result
        return result

    def _blocks(self, budget: int, rigid_lines_only: bool) -> Tuple[_Block, ...]:
        cache_key = (budget, rigid_lines_only)
        cached = self._flat_cache.get(cache_key)
        if cached is not None:
            return cached
        spec = self.spec
        mke = spec.minus_k_plus_e()
        blocks: List[_Block] = []
        for cls in self._candidates(budget):
            if cls == mke:
                continue
            opts = []
            for opt in self._class_options(cls):
                if rigid_lines_only and opt.n_i == 0:
                    simple = (
                        cls in spec.lattice.lines
                        and cls != spec.e_class
                        and not opt.alpha
                        and opt.beta == theta(1)
                    )
                    if not simple:
                        continue
                opts.append(opt)
            if opts:
                blocks.append(
                    _Block(cls, cls.coords, opts[0].e_deg, opts[0].antik, tuple(opts))
                )
        # Ascending anticanonical degree: once a block exceeds the remaining
        # budget the search can stop scanning altogether.
        blocks.sort(key=lambda b: (b.antik, b.coords))
        result = tuple(blocks)
        self._flat_cache[cache_key] = result
        return result

    def _local_blocks(
        self, budget: int, rigid_lines_only: bool, t_max: DivisorClass
    ) -> Tuple[_Block, ...]:
        """Blocks that can fit under the largest target of one evaluation.

        Remainder coordinates only move toward the feasible box, so a class
        that does not fit the c = 0 target never fits any remainder: degree
        at most d(T); multiplicities at most m_i(T), with one unit of slack
        on the two slots whose exceptional curves are themselves (rigid,
        once-only) candidates.
        """
        blocks = self._blocks(budget, rigid_lines_only)
        if self.spec.lattice.model == "cubic":
            tc = t_max.coords
            return tuple(
                b for b in blocks
                if b.coords[0] <= tc[0] and b.coords[1] <= tc[1]
                and b.coords[2] <= tc[2]
            )
        tc = t_max.coords
        kept = []
        for b in blocks:
            bc = b.coords
            if bc[0] > tc[0]:
                continue
            if bc[1] < tc[1] - 1 or bc[2] < tc[2] - 1:
                continue
            if bc[3] < tc[3] or bc[4] < tc[4] or bc[5] < tc[5] or bc[6] < tc[6]:
                continue
            kept.append(b)
        return tuple(kept)

    def _factor_multisets(
        self,
        t_class: DivisorClass,
        alpha_budget: TangencyVector,
        bm_target: TangencyVector,
        ns_target: int,
        blocks: Tuple[_Block, ...],
        memo: Dict[tuple, int],
        compute_fn: ValueFn,
    ) -> Iterator[Tuple[Tuple[_Option, TangencyVector, TangencyVector, int], ...]]:
        """Unordered factor collections matching all budgets exactly.

        Yields tuples of (option, gamma, beta_minus_gamma, binom weight) in
        non-decreasing canonical order; each unordered collection once.
        Rigid options (n_i = 0 with no fixed tangencies) appear at most once
        each; in reduced mode they are further restricted to real lines
        other than E carrying a single simple moving branch.
        """
        spec = self.spec
        t0 = t_class.coords
        if not self._feasible(t0):
            return
        te0 = spec.e_degree(t_class)
        ak0 = spec.antik_degree(t_class)
        ibm0 = iweight(bm_target)
        zero_t = self._zero_coords
        feasible = self._feasible
        n_blocks = len(blocks)
        sorted_blocks = self._assume_sorted_blocks

        def dfs(
            b0: int,
            o0: int,
            g0: int,
            repick: bool,
            t_rem: Tuple[int, ...],
            te_rem: int,
            ak_rem: int,
            a_rem: TangencyVector,
            bm_rem: TangencyVector,
            ibm_rem: int,
            ns_rem: int,
            acc: list,
        ):
            if t_rem == zero_t:
                if not bm_rem and ns_rem == 0:
                    yield tuple(acc)
                return
            if te_rem < 1 or ak_rem < 1 or ibm_rem > te_rem - 1:
                return
            if not feasible(t_rem):
                return
            for bi in range(b0, n_blocks):
                blk = blocks[bi]
                new_ak = ak_rem - blk.antik
                if new_ak < 0:
                    if sorted_blocks:
                        break  # ascending anticanonical degree
                    continue
                new_te = te_rem - blk.e_deg
                if new_te < 0:
                    continue
                bc = blk.coords
                new_t = tuple(x - y for x, y in zip(t_rem, bc))
                if new_t != zero_t and (
                    new_te < 1 or new_ak < 1 or not feasible(new_t)
                ):
                    continue  # no option of this class can lead anywhere
                o_begin = o0 if bi == b0 else 0
                for oi in range(o_begin, len(blk.opts)):
                    opt = blk.opts[oi]
                    same = repick and bi == b0 and oi == o0
                    if opt.n_i > ns_rem:
                        continue
                    if opt.rigid and same:
                        continue  # a rigid decorated tuple appears only once
                    if opt.ialpha and not opt.alpha <= a_rem:
                        continue
                    value = memo.get(opt.memo_key)
                    if value is None:
                        value = compute_fn(opt.cls, opt.alpha, opt.beta)
                    if value == 0:
                        continue
                    new_a = a_rem - opt.alpha if opt.ialpha else a_rem
                    g_begin = g0 if same else 0
                    for g_idx in range(g_begin, len(opt.gammas)):
                        gamma, beta_minus, ibm_d, bweight = opt.gammas[g_idx]
                        if ibm_d > ibm_rem or not beta_minus <= bm_rem:
                            continue
                        acc.append((opt, gamma, beta_minus, bweight))
                        yield from dfs(
                            bi, oi, g_idx, True,
                            new_t, new_te, new_ak,
                            new_a, bm_rem - beta_minus, ibm_rem - ibm_d,
                            ns_rem - opt.n_i, acc,
                        )
                        acc.pop()

        yield from dfs(
            0, 0, 0, False, t0, te0, ak0, alpha_budget, bm_target, ibm0, ns_target, []
        )

    def _feasible(self, t_rem: Tuple[int, ...]) -> bool:
        """Cheap necessary conditions for t_rem to split into candidates."""
        if self.spec.lattice.model == "cubic":
            # Every candidate has non-negative line coordinates.
            return t_rem[0] >= 0 and t_rem[1] >= 0 and t_rem[2] >= 0
        if t_rem[0] < 0:
            return False
        # Raw E_i coefficients of candidates are <= 0 except the once-only
        # exceptional factors E_1, E_2 themselves.
        if t_rem[1] > 1 or t_rem[2] > 1:
            return False
        return t_rem[3] <= 0 and t_rem[4] <= 0 and t_rem[5] <= 0 and t_rem[6] <= 0

    # -- reduced route on the cubic ---------------------------------------------------

    def _fast_value(
        self, d: DivisorClass, alpha: TangencyVector, beta: TangencyVector
    ) -> int:
        key = (d.coords, alpha.key(), beta.key())
        cached = self._fast_memo.get(key)
        if cached is not None:
            return cached
        spec = self.spec
        n = spec.r_dim_class(d, norm(beta))
        if n < 0:
            value = 0
        elif n == 0:
            value = spec.initial_weight(d, alpha, beta)
        else:
            value = 0
            for k, _ in beta:
                value += self._fast_value(d, alpha + theta(k), beta - theta(k))
            ke = spec.k_plus_e()
            de = spec.e_degree(d)
            budget = spec.antik_degree(d - spec.e_class)
            blocks = (
                self._local_blocks(budget, True, d - spec.e_class)
                if budget >= 1
                else ()
            )
            n1 = n - 1
            for alpha0 in enumerate_le(alpha):
                ia0 = iweight(alpha0)
                alpha_budget = alpha - alpha0
                for beta0 in enumerate_le(beta):
                    nb0 = norm(beta0)
                    if nb0 > n1:
                        continue
                    c = ia0 + iweight(beta0)
                    if de + 1 - 2 * c < 0:
                        continue
                    t_class = d - spec.e_class + ke * c
                    for chosen in self._factor_multisets(
                        t_class, alpha_budget, beta - beta0, n1 - nb0, blocks,
                        self._fast_memo, self._fast_value,
                    ):
                        term = self._make_term(
                            n1, 0, alpha, alpha0, beta0, nb0, chosen, (), 1,
                            with_l_weight=False, value_fn=self._fast_value,
                        )
                        value += term.contribution
        self._fast_memo[key] = value
        return value


def _entries_str(entries: Tuple[Tuple[int, int], ...]) -> str:
    if not entries:
        return "0"
    return ",".join(f"{k}:{c}" for k, c in entries)


# -- persistent store -----------------------------------------------------------


def cache_save(store: Store, path: str) -> None:
    lines = [CACHE_HEADER]
    for key in sorted(store):
        lines.append(f"{key}\t{store[key]}")
    lines.append(f"#count={len(store)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cache_load(path: str) -> Store:
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0] != CACHE_HEADER:
        raise CacheError(f"unsupported cache header in {path!r}")
    if not raw[-1].startswith("#count="):
        raise CacheError(f"cache file {path!r} is truncated (missing record count)")
    try:
        count = int(raw[-1][len("#count="):])
    except ValueError:
        raise CacheError(f"cache file {path!r} has a malformed record count") from None
    records = raw[1:-1]
    if len(records) != count:
        raise CacheError(
            f"cache file {path!r} is truncated: {len(records)} records, "
            f"trailer says {count}"
        )
    store: Store = {}
    for lineno, line in enumerate(records, start=2):
        key, tab, value = line.rpartition("\t")
        if not tab or not key:
            raise CacheError(f"malformed cache record at line {lineno}")
        try:
            store[key] = int(value)
        except ValueError:
            raise CacheError(f"malformed cache value at line {lineno}") from None
    return store
