"""Closure under guarded operations and tameness."""

import pytest

from ltt.automata import minimize, random_dfta, universal
from ltt.budget import Budget
from ltt.fixtures import even_b, pool_alphabets, random_pool, tame_not_lt_binary, word_suite
from ltt.oracles import brute_closure
from ltt.tameness import closed_under_guarded, is_k_tame, is_tame, tameness_bound_k0
from ltt.testability import is_kappa_testable
from ltt.trees import RANKED_OPS, RankedAlphabet, apply_guarded, ktype_of
from ltt.words import encode_word_language, lt_equations_hold, syntactic_semigroup

AB = RankedAlphabet({"a": 2, "b": 0})


def replays(a, v):
    w = v.witness
    out = apply_guarded(w.op, w.tree, w.nodes, w.k)
    return out == w.result and a.accepts(w.tree) != a.accepts(w.result)


@pytest.mark.parametrize("op", RANKED_OPS)
@pytest.mark.parametrize("k", [0, 1, 2])
def test_universal_closed(op, k):
    assert closed_under_guarded(op, universal(AB), k).holds


def test_even_b_htransfer_violated():
    a = even_b()
    v = closed_under_guarded("htransfer", a, 0)
    assert v.violated
    assert replays(a, v)
    nodes = v.witness.nodes
    assert len({ktype_of(v.witness.tree, x, 0) for x in nodes}) == 1


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_parity_words_vstutter_violated(k):
    a = encode_word_language(word_suite()["(aa)*"][0])
    v = closed_under_guarded("vstutter", a, k)
    assert v.violated and replays(a, v)


def test_even_b_not_tame_at_small_k():
    for k in (0, 1):
        assert is_k_tame(even_b(), k).violated


def test_tame_fixture_is_one_tame():
    assert is_k_tame(tame_not_lt_binary(), 1).holds


def test_tame_fixture_is_zero_tame():
    assert is_k_tame(tame_not_lt_binary(), 0).holds


def test_bound_formula():
    assert tameness_bound_k0(universal(AB)) == 2
    three = next(m for m in (minimize(random_dfta(AB, 3, s)) for s in range(100)) if m.n_states == 3)
    assert tameness_bound_k0(three) == 28
    sizes = [tameness_bound_k0(random_dfta(AB, n, 1)) for n in range(1, 6)]
    assert sizes == sorted(sizes)


def test_is_tame_examples():
    assert is_tame(universal(AB)).holds
    suite = word_suite()
    assert is_tame(encode_word_language(suite["(aa)*"][0])).violated
    assert is_tame(encode_word_language(suite["(ab)*"][0])).holds


def test_budget_gives_unknown():
    v = is_k_tame(tame_not_lt_binary(), 5, Budget(items=10))
    assert v.unknown and v.note


def test_word_bridge():
    for name, (d, expected) in word_suite().items():
        eq = lt_equations_hold(syntactic_semigroup(d))
        v = is_tame(encode_word_language(d))
        assert eq == expected, name
        assert not v.unknown, name
        assert v.holds == eq, name


@pytest.fixture(scope="module")
def pool():
    return random_pool(pool_alphabets(), 60, 3, seed=11)


def test_monotone_in_k(pool):
    for a in pool:
        if is_k_tame(a, 0).holds:
            assert is_k_tame(a, 1).holds


def test_holds_not_refuted_by_brute_force(pool):
    for a in pool[:30]:
        for op in RANKED_OPS:
            v = closed_under_guarded(op, a, 0)
            if v.holds:
                assert not brute_closure(a, op, 0, 9).violated
            elif v.violated:
                assert replays(a, v)


def test_testable_implies_tame(pool):
    for a in pool:
        for kappa in (0, 1):
            if is_kappa_testable(a, kappa).holds:
                assert is_k_tame(a, kappa).holds
