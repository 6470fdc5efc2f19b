"""Unordered trees, (k,l)-types and counting automata."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltt.trees import OperationError, TreeSyntaxError
from ltt.unranked.automata import (
    CountingDfta,
    accepts_counting,
    complete_with_sink,
    distinguishing_context,
    minimize_counting,
    random_counting,
    run_counting,
    state_witnesses,
    universal_counting,
)
from ltt.unranked.fixtures import AB, at_least_two_b_children, exactly_one_b_child, random_counting_pool
from ltt.unranked.oracles import kl2_matches_ktype, random_binary_utree, universe
from ltt.unranked.trees import (
    KLTable,
    UTree,
    apply_unranked,
    count_kl_types,
    enumerate_kl_types,
    equiv_kl,
    exact_ktype,
    kl_occurrences,
    kl_type_of,
    parse_unranked,
    plug,
    render_unranked,
)


def random_utree(symbols, rng, depth=4, width=3):
    if depth == 0 or rng.random() < 0.3:
        return UTree(rng.choice(symbols))
    return UTree(rng.choice(symbols), [random_utree(symbols, rng, depth - 1, width) for _ in range(rng.randint(1, width))])


def test_parse_leaf_forms():
    assert parse_unranked("a{}") == UTree("a") == parse_unranked("a")


def test_children_are_unordered():
    assert parse_unranked("a{b,b,c}") == parse_unranked("a{c,b,b}")
    assert render_unranked(parse_unranked("a{c,b{a},b}")) == "a{b,b{a},c}"


def test_parse_errors():
    for bad in ["a{", "a{b,}", "{b}", "a{b}}", "a(b)"]:
        with pytest.raises(TreeSyntaxError):
            parse_unranked(bad)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip(seed):
    t = random_utree(("a", "b", "c"), random.Random(seed))
    assert parse_unranked(render_unranked(t)) == t


def test_kl_types_by_hand():
    t = parse_unranked("a{b,b,b}")
    assert str(kl_type_of(t, (), 0, 2)) == "a"
    assert str(kl_type_of(t, (), 1, 2)) == "a{b:>=2}"
    assert str(kl_type_of(t, (), 1, None)) == "a{b:=3}"


def test_equiv_kl_examples():
    t = parse_unranked("a{b{a},b}")
    assert equiv_kl(t, t, 2, 1)
    assert equiv_kl(parse_unranked("a{b,b}"), parse_unranked("a{b,b,b}"), 1, 2)
    assert not equiv_kl(parse_unranked("a{b}"), parse_unranked("a{b,b}"), 1, 2)


def test_occurrences():
    occ = kl_occurrences(parse_unranked("a{b{a},b,b}"), 1, 1)
    assert sorted(map(str, occ)) == ["a{b:>=1}", "a{}", "b{a:>=1}", "b{}"]


def test_count_kl_types_values():
    assert count_kl_types(1, 1, 1) == 2
    for l in (1, 2, 5):
        assert count_kl_types(1, 0, l) == 1
    assert count_kl_types(2, 1, 1) == 8


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("l", [1, 2])
def test_count_matches_enumeration(n, k, l):
    symbols = AB[:n]
    assert count_kl_types(n, k, l) == len(enumerate_kl_types(symbols, k, l))


def test_enumeration_matches_trees():
    # every (1,1)-type over {a,b} is the type of a tree with at most 5 nodes
    table = KLTable(1)
    seen = {table.kltype(table.of_tree(t, 1)) for t in universe(AB, 5).trees}
    assert seen == set(enumerate_kl_types(AB, 1, 1))


def test_kl2_is_exact_on_binary_shapes():
    rng = random.Random(1)
    for _ in range(100):
        t = random_binary_utree(AB, 5, rng)
        for k in (0, 1, 2):
            assert kl2_matches_ktype(t, k)


def test_kl1_is_coarser_than_ktype():
    t = parse_unranked("a{a{b},a{b,b}}")
    assert exact_ktype(t.children[0], 1) != exact_ktype(t.children[1], 1)
    table = KLTable(1)
    assert table.of_tree(t.children[0], 1) == table.of_tree(t.children[1], 1)


def test_hstutter_op():
    t = parse_unranked("a{b{a},c}")
    assert apply_unranked("hstutter", t, [(0,)]) == parse_unranked("a{b{a},b{a},c}")
    with pytest.raises(OperationError):
        apply_unranked("hstutter", t, [()])


def test_guard_uses_kl_types():
    t = parse_unranked("a{b{a},b{a,a}}")
    # equal (1,1)-types, different (1,2)-types
    apply_unranked("hswap", t, [(0,), (1,)], 1, 1)
    with pytest.raises(OperationError):
        apply_unranked("hswap", t, [(0,), (1,)], 1, 2)


def test_run_leaf_and_hand_example():
    a = at_least_two_b_children(("a", "b", "c"))
    assert run_counting(a, UTree("c")) == a.delta["c", a.zero()]
    assert accepts_counting(a, parse_unranked("a{b,b,c}"))
    assert not accepts_counting(a, parse_unranked("a{b,c,c}"))


def test_run_ignores_child_order():
    rng = random.Random(2)
    a = random_counting(("a", "b"), 3, 2, 7)
    for _ in range(30):
        t = random_utree(("a", "b"), rng)
        kids = list(t.children)
        rng.shuffle(kids)
        assert a.run(UTree(t.label, kids)) == a.run(t)


def test_incomplete_transitions_rejected():
    with pytest.raises(ValueError):
        CountingDfta(AB, 1, 1, [0], {("a", (0,)): 0})


def test_complete_with_sink():
    partial = {("a", (0,)): 0, ("b", (0,)): 0, ("a", (1,)): 0}
    a = complete_with_sink(AB, 1, 1, [0], partial)
    assert a.n_states == 2
    assert a.accepts(parse_unranked("a{a,b}"))
    assert not a.accepts(parse_unranked("b{a}"))
    assert not a.accepts(parse_unranked("a{b{a}}"))


def test_minimize_reduces_threshold():
    a = at_least_two_b_children()
    assert a.m == 2
    assert minimize_counting(a).n_states == a.n_states


def test_minimize_preserves_language():
    trees = universe(AB, 6).trees
    for a in [random_counting(AB, 3, 2, s) for s in range(15)]:
        m = minimize_counting(a)
        assert m.n_states <= a.n_states and m.m <= a.m
        for t in trees:
            assert m.accepts(t) == a.accepts(t)


def test_distinguishing_contexts():
    for m in random_counting_pool(15, seed=4):
        wit = state_witnesses(m)
        for p, q in itertools.combinations(m.states, 2):
            c = distinguishing_context(m, p, q)
            assert m.accepts(plug(c, wit[p])) != m.accepts(plug(c, wit[q]))


def test_universal_counting():
    u = universal_counting(AB)
    assert all(u.accepts(t) for t in universe(AB, 4).trees)


def test_exactly_one_b_child_by_hand():
    a = exactly_one_b_child()
    assert a.accepts(parse_unranked("a{b,a{b,b}}"))
    assert not a.accepts(parse_unranked("a{b,b}"))
    assert not a.accepts(parse_unranked("a{a}"))
