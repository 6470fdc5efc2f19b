"""κ-testability, the occurrence evaluator and the LT decision."""

import random

import pytest

from ltt.automata import universal
from ltt.fixtures import even_b, pool_alphabets, random_pool, root_is, tame_not_lt_binary, tame_not_lt_pair, word_suite
from ltt.oracles import brute_testable
from ltt.tameness import is_k_tame
from ltt.testability import decide_lt, is_kappa_testable, kappa_bound, occurrence_automaton
from ltt.trees import RankedAlphabet, Tree, count_ktypes, equiv_k, ktype_of, occurrence_set, parse_term
from ltt.verdicts import LtStatus, Reason
from ltt.words import encode_word_language

from test_trees import random_tree

AB = RankedAlphabet({"a": 2, "b": 0})
ABC = RankedAlphabet({"a": 2, "b": 0, "c": 0})


def test_occurrence_kappa0_is_labels():
    s = occurrence_automaton(ABC, 0).run(parse_term("a(b,a(c,c))"))
    assert str(s.root_type) == "a"
    assert {str(x) for x in s.occ} == {"a", "b", "c"}


def test_occurrence_kappa1_by_hand():
    s = occurrence_automaton(AB, 1).run(parse_term("a(b,b)"))
    assert str(s.root_type) == "a(b,b)"
    assert {str(x) for x in s.occ} == {"a(b,b)", "b"}


@pytest.mark.parametrize("kappa", [0, 1, 2])
def test_occurrence_matches_definition(kappa):
    rng = random.Random(kappa)
    ev = occurrence_automaton(ABC, kappa)
    for _ in range(80):
        t = random_tree(ABC, rng, depth=6)
        if t.size > 30:
            continue
        s = ev.run(t)
        assert s.root_type == ktype_of(t, (), kappa)
        assert s.occ == occurrence_set(t, kappa)


def test_trivial_languages_testable():
    assert is_kappa_testable(universal(AB), 0).holds
    assert is_kappa_testable(root_is("a", AB), 0).holds


def test_even_b_kappa0_violated():
    v = is_kappa_testable(even_b(), 0)
    assert v.violated
    w = v.witness
    assert equiv_k(w.left, w.right, 0)
    assert even_b().accepts(w.left) != even_b().accepts(w.right)
    # the hand pair from the definition is also a refutation
    t1, t2 = parse_term("a(b,b)"), parse_term("a(a(b,b),b)")
    assert equiv_k(t1, t2, 0) and even_b().accepts(t1) != even_b().accepts(t2)


def test_kappa_bound_values():
    a = universal(AB)
    assert kappa_bound(a, 1) == 7
    assert kappa_bound(a, 0) == 3
    assert [kappa_bound(a, k) for k in range(4)] == sorted(kappa_bound(a, k) for k in range(4))
    assert kappa_bound(a, 2) == count_ktypes(AB, 2) + 3


def test_decide_lt_examples():
    v = decide_lt(universal(AB))
    assert v.status is LtStatus.LT and v.kappa == 0
    suite = word_suite()
    v = decide_lt(encode_word_language(suite["(aa)*"][0]))
    assert v.status is LtStatus.NOT_LT and v.reason is Reason.NOT_TAME
    v = decide_lt(encode_word_language(suite["(ab)*"][0]))
    assert v.status is LtStatus.LT and v.kappa <= 2


def test_decide_lt_word_suite_conclusive():
    for name, (d, expected) in word_suite().items():
        v = decide_lt(encode_word_language(d))
        assert v.conclusive, name
        assert (v.status is LtStatus.LT) == expected, name


def markers(t: Tree) -> str:
    return "".join(sorted(label for _, n in t.nodes() for label in [n.label] if label in "ce"))


@pytest.mark.parametrize("kappa", [1, 2])
def test_tame_fixture_not_testable(kappa):
    a = tame_not_lt_binary()
    v = is_kappa_testable(a, kappa)
    assert v.violated
    w = v.witness
    assert a.accepts(w.left) and not a.accepts(w.right)
    assert equiv_k(w.left, w.right, kappa)
    assert (markers(w.left), markers(w.right)) == ("cce", "cee")


def test_hand_pair_for_tame_fixture():
    a = tame_not_lt_binary()
    for kappa in (1, 2, 3):
        t, t2 = tame_not_lt_pair(kappa)
        assert a.accepts(t) and not a.accepts(t2)
        assert equiv_k(t, t2, kappa)


@pytest.fixture(scope="module")
def pool():
    return random_pool(pool_alphabets(), 60, 3, seed=3)


def test_agrees_with_brute_force(pool):
    for a in pool:
        for kappa in (0, 1):
            v = is_kappa_testable(a, kappa)
            b = brute_testable(a, kappa, 8)
            if b.violated:
                assert v.violated
            if v.violated:
                w = v.witness
                assert equiv_k(w.left, w.right, kappa)
                assert a.accepts(w.left) != a.accepts(w.right)


def test_monotone_in_kappa(pool):
    for a in pool:
        if is_kappa_testable(a, 0).holds:
            assert is_kappa_testable(a, 1).holds


def test_testable_implies_tame(pool):
    for a in pool:
        if is_kappa_testable(a, 1).holds:
            assert is_k_tame(a, 1).holds
