import random

import pytest

from welschinger.engine import (
    Evaluator,
    cache_load,
    cache_save,
    make_key,
)
from welschinger.errors import CacheError, ValidationError
from welschinger.surfaces import make_surface
from welschinger.tangency import TangencyVector, theta

ZERO = TangencyVector.zero()


def key_of(spec, text, alpha=ZERO, beta=None):
    d = spec.parse_class(text)
    if beta is None:
        de = spec.e_degree(d)
        beta = theta(1, de) if de else ZERO
    return make_key(spec, d, alpha, beta)


# -- hand-expanded oracle values -------------------------------------------------
# The right-hand sides below were expanded by hand, term by term, from the
# recursion before the evaluator existed; they gate the term enumerator.


def test_cubic_twist_hand_values(shared):
    spec, ev = shared("B1", twist="F")
    assert ev.eval(key_of(spec, "-K", alpha=theta(1), beta=ZERO)) == 2
    assert ev.eval(key_of(spec, "-K")) == 4


def test_cubic_trivial_hand_values(shared):
    spec, ev = shared("B1", twist="0")
    # the four pair terms all carry weight -1 here and no longer cancel
    assert ev.eval(key_of(spec, "-K", alpha=theta(1), beta=ZERO)) == -2
    assert ev.eval(key_of(spec, "-K")) == 0


def test_cubic_alternate_e_hand_values(shared):
    spec, ev = shared("B1", twist="F", e_choice="0,1,0")
    d = "2,1,1"
    assert ev.eval(key_of(spec, d, alpha=theta(1, 2), beta=ZERO)) == 2
    assert ev.eval(key_of(spec, d, alpha=theta(1), beta=theta(1))) == 4
    assert ev.eval(key_of(spec, d)) == 4


def test_p2_hand_values(shared):
    expected = {(6, 0): 6, (4, 1): 4, (2, 2): 2, (0, 3): 0}
    for (a, b), want in expected.items():
        spec, ev = shared("P2", a, b)
        got = ev.eval(key_of(spec, "-K", alpha=theta(1), beta=ZERO))
        assert got == want, (a, b, got)


def test_reference_values(shared):
    spec, ev = shared("B1", twist="F")
    assert ev.eval(key_of(spec, "-2K")) == 160
    spec, ev = shared("P2", 6, 0)
    assert ev.eval(key_of(spec, "-2K")) == 1000
    e2 = spec.parse_class("0;0,-1,0,0,0,0")
    assert ev.eval(make_key(spec, e2, ZERO, theta(1))) == 1


def test_vanishing_guard(shared):
    spec, ev = shared("B1", twist="F")
    l2 = spec.parse_class("0,1,0")
    # moving the only tangency to a fixed point drops the dimension below 0
    assert ev.eval(make_key(spec, l2, theta(1), ZERO)) == 0


def test_expand_matches_hand_expansion(shared):
    spec, ev = shared("B1", twist="F")
    records = ev.expand(key_of(spec, "-K", alpha=theta(1), beta=ZERO))
    assert [r.kind for r in records].count("first_sum") == 0
    contributions = sorted(r.contribution for r in records)
    assert contributions == [-1, -1, 1, 1, 1, 1]
    assert sum(contributions) == 2
    pair_terms = [r for r in records if r.pair_ids]
    assert sorted(r.contribution for r in pair_terms) == [-1, -1, 1, 1]
    assert all(len(r.pair_ids) == 1 for r in pair_terms)
    factor_terms = [r for r in records if r.factors]
    assert len(factor_terms) == 1
    names = sorted(spec.class_str(f.d) for f in factor_terms[0].factors)
    assert names == ["0,0,1", "0,1,0"]


def test_expand_first_sum_single_record(shared):
    spec, ev = shared("B1", twist="F")
    records = ev.expand(key_of(spec, "-K"))
    firsts = [r for r in records if r.kind == "first_sum"]
    assert len(firsts) == 1 and firsts[0].k == 1
    assert sum(r.contribution for r in records) == 4


def test_expand_totals_match_eval(shared):
    cases = []
    spec, ev = shared("B1", twist="F")
    cases += [(spec, ev, key_of(spec, t)) for t in ("-K", "-2K", "2,1,1")]
    spec, ev = shared("P2", 2, 2)
    cases += [(spec, ev, key_of(spec, "-K")), (spec, ev, key_of(spec, "-2K"))]
    spec, ev = shared("P2", 6, 0)
    cases += [(spec, ev, key_of(spec, "-K", alpha=theta(1), beta=ZERO))]
    for spec, ev, key in cases:
        records = ev.expand(key)
        assert sum(r.contribution for r in records) == ev.eval(key)


def test_expand_initial_key(shared):
    spec, ev = shared("P2", 6, 0)
    e2 = spec.parse_class("0;0,-1,0,0,0,0")
    records = ev.expand(make_key(spec, e2, ZERO, theta(1)))
    assert len(records) == 1 and records[0].kind == "initial"
    assert records[0].contribution == 1


def test_key_validation():
    spec = make_surface("P2", 4, 1)
    e5 = spec.parse_class("0;0,0,0,0,-1,0")
    with pytest.raises(ValidationError):
        make_key(spec, e5, ZERO, theta(1))  # not conjugation-invariant
    with pytest.raises(ValidationError):
        make_key(spec, -spec.canonical(), ZERO, theta(2))  # even support
    with pytest.raises(ValidationError):
        make_key(spec, -spec.canonical(), ZERO, theta(1, 2))  # degree mismatch
    conic = make_surface("B", twist="F")
    l1 = conic.parse_class("1,0,0")
    with pytest.raises(ValidationError):
        make_key(conic, l1, ZERO, theta(1))  # crosses the contracted line
    # internal states may cross it: this is how the exceptional line enters
    assert make_key(conic, l1, ZERO, theta(1), enforce_filter=False)


def test_debug_rational_mode_agrees():
    spec = make_surface("B1", twist="F")
    plain = Evaluator(spec)
    checked = Evaluator(spec, debug_rational=True)
    for text in ("-K", "-2K"):
        assert checked.eval(key_of(spec, text)) == plain.eval(key_of(spec, text))
    spec22 = make_surface("P2", 2, 2)
    assert (
        Evaluator(spec22, debug_rational=True).eval(key_of(spec22, "-2K"))
        == Evaluator(spec22).eval(key_of(spec22, "-2K"))
    )


class _ShuffledEvaluator(Evaluator):
    """Evaluator walking the factor search in a scrambled class order."""

    def __init__(self, spec, seed):
        super().__init__(spec)
        self._seed = seed

    def _blocks(self, budget, rigid_lines_only):
        blocks = list(super()._blocks(budget, rigid_lines_only))
        random.Random(self._seed).shuffle(blocks)
        return tuple(blocks)


def test_eval_independent_of_enumeration_order():
    spec = make_surface("P2", 2, 2)
    reference = Evaluator(spec)
    want = {t: reference.eval(key_of(spec, t)) for t in ("-K", "-2K")}
    for seed in (1, 2, 3):
        shuffled = _ShuffledEvaluator(spec, seed)
        shuffled._assume_sorted_blocks = False
        for text, value in want.items():
            assert shuffled.eval(key_of(spec, text)) == value
    spec_f = make_surface("B1", twist="F")
    want_f = Evaluator(spec_f).eval(key_of(spec_f, "-2K"))
    shuffled = _ShuffledEvaluator(spec_f, 7)
    shuffled._assume_sorted_blocks = False
    assert shuffled.eval(key_of(spec_f, "-2K")) == want_f


def test_store_round_trip(tmp_path):
    spec = make_surface("B1", twist="F")
    ev = Evaluator(spec)
    want = ev.eval(key_of(spec, "-2K"))
    store = ev.dump()
    assert store  # contains every memoized key
    path = tmp_path / "cache.txt"
    cache_save(store, str(path))
    loaded = cache_load(str(path))
    assert loaded == store

    warm = Evaluator(spec, store=loaded)
    assert warm.eval(key_of(spec, "-2K")) == want
    assert warm.misses == 0  # everything came from the preloaded store


def test_store_isolated_by_surface(tmp_path):
    spec_f = make_surface("B1", twist="F")
    spec_0 = make_surface("B1", twist="0")
    store = Evaluator(spec_f).dump()
    Evaluator(spec_0, store=store)  # must not adopt twisted values
    ev0 = Evaluator(spec_0, store=store)
    assert ev0.eval(key_of(spec_0, "-2K")) == 0


def test_cache_file_errors(tmp_path):
    path = tmp_path / "cache.txt"
    path.write_text("SOMETHING ELSE\n")
    with pytest.raises(CacheError):
        cache_load(str(path))

    spec = make_surface("B1", twist="F")
    ev = Evaluator(spec)
    ev.eval(key_of(spec, "-K"))
    good = tmp_path / "good.txt"
    cache_save(ev.dump(), str(good))

    lines = good.read_text().splitlines()
    truncated = tmp_path / "trunc.txt"
    truncated.write_text("\n".join(lines[:-2] + [lines[-1]]) + "\n")
    with pytest.raises(CacheError):
        cache_load(str(truncated))

    mangled = tmp_path / "bad.txt"
    bad_lines = list(lines)
    bad_lines[1] = bad_lines[1].replace("\t", " ")
    mangled.write_text("\n".join(bad_lines) + "\n")
    with pytest.raises(CacheError, match="line 2"):
        cache_load(str(mangled))

    notint = tmp_path / "notint.txt"
    bad_lines = list(lines)
    bad_lines[1] = bad_lines[1].split("\t")[0] + "\txyz"
    notint.write_text("\n".join(bad_lines) + "\n")
    with pytest.raises(CacheError):
        cache_load(str(notint))


def test_fast_route_guard():
    spec = make_surface("B1", twist="0")
    ev = Evaluator(spec)
    with pytest.raises(ValidationError):
        ev.eval_cubic_fast(key_of(spec, "-K"))
    spec_p2 = make_surface("P2", 6, 0)
    ev_p2 = Evaluator(spec_p2)
    with pytest.raises(ValidationError):
        ev_p2.eval_cubic_fast(key_of(spec_p2, "-K"))


def test_fast_route_values(shared):
    spec, ev = shared("B1", twist="F")
    assert ev.eval_cubic_fast(key_of(spec, "-K")) == 4
    assert ev.eval_cubic_fast(key_of(spec, "-2K")) == 160
    d = key_of(spec, "2,1,1")
    assert ev.eval_cubic_fast(d) == ev.eval(d)


def test_repeated_identical_factors_are_symmetrized(shared):
    # The unique curve of this rigid class splits off the auxiliary curve
    # plus twice the pencil through the sixth point; the two identical
    # decorated factors describe one unordered configuration, so the term
    # carries weight 1, not the ordered point-distribution count 2.
    spec, ev = shared("P2", 6, 0)
    d = spec.parse_class("3;1,1,0,0,0,2")
    key = make_key(spec, d, theta(1), ZERO)
    assert ev.eval(key) == 1
    records = [r for r in ev.expand(key) if r.factors]
    assert len(records) == 1
    rec = records[0]
    assert len(rec.factors) == 2
    assert rec.factors[0].d == rec.factors[1].d == spec.parse_class("1;0,0,0,0,0,1")
    assert rec.coefficient == 1 and rec.contribution == 1
    # and the whole relabeling orbit agrees
    for text in ("3;2,1,1,0,0,0", "3;1,2,0,1,0,0", "3;0,0,1,1,2,0"):
        dd = spec.parse_class(text)
        de = spec.e_degree(dd)
        assert ev.eval(make_key(spec, dd, ZERO, theta(1, de))) == 1


def test_rational_class_values_are_one(shared):
    # Independent oracle: a nef-and-big class of arithmetic genus zero has a
    # linear system all of whose irreducible members are smooth rational, so
    # the point conditions cut out exactly one curve, counted with sign +1.
    spec, ev = shared("P2", 6, 0)
    k_cls = spec.canonical()
    checked = 0
    for d in spec.nef_big_classes(6):
        pa = 1 + (spec.intersect(d, d) + spec.intersect(k_cls, d)) // 2
        if pa != 0:
            continue
        checked += 1
        de = spec.e_degree(d)
        assert ev.eval(make_key(spec, d, ZERO, theta(1, de) if de else ZERO)) == 1
    assert checked > 10
