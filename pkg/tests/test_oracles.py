"""Brute-force oracles, syntactic semigroups and the word encoding."""

import random

from ltt.automata import universal
from ltt.fixtures import even_b, word_suite
from ltt.oracles import brute_closure, brute_testable, enumerate_trees
from ltt.trees import RANKED_OPS, RankedAlphabet, Tree, apply_guarded, equiv_k, parse_term
from ltt.words import (
    LEAF,
    decode_word,
    encode_word,
    encode_word_language,
    lt_equations_hold,
    minimize_word_dfa,
    syntactic_semigroup,
    word_dfa,
    words_up_to,
)

AB = RankedAlphabet({"a": 2, "b": 0})
ABC = RankedAlphabet({"a": 2, "b": 0, "c": 0})


def test_enumeration_unique_and_ordered():
    trees = list(enumerate_trees(ABC, 7))
    assert len(set(trees)) == len(trees)
    sizes = [t.size for t in trees]
    assert sizes == sorted(sizes)


def test_universal_never_flips():
    for op in RANKED_OPS:
        assert brute_closure(universal(ABC), op, 0, 7).holds
    assert brute_testable(universal(ABC), 0, 7).holds


def test_brute_closure_reports_bounded():
    v = brute_closure(universal(ABC), "hswap", 0, 5)
    assert v.bounded


def test_even_b_htransfer_needs_eleven_nodes():
    # a k=0 transfer needs two equal inner subtrees and a third that differs
    assert brute_closure(even_b(), "htransfer", 0, 9).explored["instances"] == 0
    v = brute_closure(even_b(), "htransfer", 0, 11)
    assert v.violated
    w = v.witness
    assert apply_guarded(w.op, w.tree, w.nodes, 0) == w.result
    assert even_b().accepts(w.tree) != even_b().accepts(w.result)


def test_even_b_brute_testable():
    v = brute_testable(even_b(), 0, 7)
    assert v.violated
    w = v.witness
    assert equiv_k(w.left, w.right, 0)
    assert {w.left, w.right} == {parse_term("a(b,b)"), parse_term("a(b,a(b,b))")}


def test_semigroup_sizes():
    one = word_dfa(("a",), 1, 0, [0], lambda q, c: 0)
    assert len(syntactic_semigroup(one)) == 1
    assert lt_equations_hold(syntactic_semigroup(one))
    parity = word_suite()["(aa)*"][0]
    s = syntactic_semigroup(parity)
    assert len(s) == 2
    assert not lt_equations_hold(s)
    assert lt_equations_hold(syntactic_semigroup(word_suite()["(ab)*"][0]))


def test_semigroup_invariants():
    for name, (d, _) in word_suite().items():
        d = minimize_word_dfa(d)
        s = syntactic_semigroup(d)
        assert len(s) <= d.n_states ** d.n_states, name
        assert s.is_associative(), name
        for e in s.idempotents:
            assert s.product[e, e] == e


def test_semigroup_elements_are_word_actions():
    d = minimize_word_dfa(word_suite()["contains ab"][0])
    s = syntactic_semigroup(d)
    for w in words_up_to(d.alphabet, 5):
        if w:
            action = tuple(d.read(w, q) for q in range(d.n_states))
            assert s.elements[s.element_of(w)] == action


def test_encode_empty_word():
    for name, (d, _) in word_suite().items():
        a = encode_word_language(d)
        assert encode_word("") == Tree(LEAF)
        assert a.accepts(Tree(LEAF)) == d.accepts(""), name


def test_encoding_preserves_membership():
    d = word_suite()["(ab)*"][0]
    a = encode_word_language(d)
    for w in words_up_to(d.alphabet, 8):
        assert a.accepts(encode_word(w)) == d.accepts(w)
        assert decode_word(encode_word(w)) == "".join(w)


def test_encoding_random_words():
    rng = random.Random(0)
    for name, (d, _) in word_suite().items():
        a = encode_word_language(d)
        for _ in range(1000):
            w = "".join(rng.choice(d.alphabet) for _ in range(rng.randrange(15)))
            assert a.accepts(encode_word(w)) == d.accepts(w), name
