"""Guarded closure, (κ,λ)-testability and the ILT / ALT decisions on unordered trees."""

import pytest

from ltt.unranked.automata import from_counting_function, universal_counting
from ltt.unranked.closure import (
    closed_under_kl_guarded,
    hstutter_check,
    is_kl_tame,
    ktame_violation,
    l_ladder,
    tameness_bound_k0,
)
from ltt.unranked.fixtures import (
    AB,
    at_least_one_b_child,
    at_least_two_b_children,
    exactly_one_b_child,
    random_counting_pool,
    root_loses,
    some_node_has_b_child,
)
from ltt.unranked.oracles import brute_hstutter, brute_ilt, brute_kl_testable
from ltt.unranked.testability import decide_alt, decide_ilt, is_kl_testable
from ltt.unranked.trees import UOp, apply_unranked, equiv_kl, parse_unranked
from ltt.verdicts import LtStatus, Reason


def replays(a, v):
    return witness_replays(a, v.witness)


def witness_replays(a, w):
    k, l = w.k if isinstance(w.k, tuple) else (w.k, None)
    out = apply_unranked(w.op, w.tree, w.nodes, k, l)
    return out == w.result and a.accepts(w.tree) != a.accepts(out)


@pytest.mark.parametrize("op", list(UOp))
def test_universal_closed(op):
    assert closed_under_kl_guarded(op, universal_counting(AB), 1, 2).holds


def test_hstutter_examples():
    a = exactly_one_b_child()
    v = closed_under_kl_guarded("hstutter", a, 0, 3)
    assert v.violated and replays(a, v)
    assert closed_under_kl_guarded("hstutter", at_least_one_b_child(), 0, 2).holds
    assert hstutter_check(at_least_two_b_children()).violated


def test_is_kl_tame_examples():
    assert is_kl_tame(universal_counting(AB), 0, 2).holds
    a = exactly_one_b_child()
    assert is_kl_tame(a, 0, 3).violated
    assert is_kl_tame(a, 1, 3).holds
    ge1 = at_least_one_b_child()
    assert is_kl_tame(ge1, 0, 2).violated
    assert is_kl_tame(ge1, 1, 2).holds


def test_is_kl_tame_rejects_small_l():
    with pytest.raises(ValueError):
        is_kl_tame(exactly_one_b_child(), 1, 2)


def test_game_language_not_tame():
    a = root_loses()
    v = ktame_violation(a, tameness_bound_k0(a))
    assert v.violated
    assert replays(a, v)


def test_ladder_and_bound():
    a = exactly_one_b_child()
    assert tameness_bound_k0(a) == a.n_states**3 + 1
    assert l_ladder(a) == [a.m + 1, a.m * a.n_states + 1]


def test_tame_monotone_in_k():
    for a in random_counting_pool(25, seed=5):
        l = a.m + 1
        if is_kl_tame(a, 0, l).holds:
            assert is_kl_tame(a, 1, l).holds


def test_testable_examples():
    u = universal_counting(AB)
    assert is_kl_testable(u, 0, 1).holds
    root_a = from_counting_function(AB, 2, 1, [0], lambda s, p: 0 if s == "a" else 1)
    assert is_kl_testable(root_a, 0, 1).holds
    assert is_kl_testable(some_node_has_b_child(), 1, 1).holds
    a = exactly_one_b_child()
    v = is_kl_testable(a, 1, 1)
    assert v.violated
    assert {v.witness.left, v.witness.right} == {parse_unranked("a{b}"), parse_unranked("a{b,b}")}
    assert is_kl_testable(a, 1, 2).holds


def test_testable_witness_properties():
    for a in random_counting_pool(30, seed=6):
        for kappa, lam in [(0, 1), (1, 1), (1, 2)]:
            v = is_kl_testable(a, kappa, lam)
            if v.violated:
                w = v.witness
                assert equiv_kl(w.left, w.right, kappa, lam)
                assert a.accepts(w.left) != a.accepts(w.right)


def test_testable_monotone():
    for a in random_counting_pool(25, seed=5):
        for kappa in (0, 1):
            if is_kl_testable(a, kappa, 1).holds:
                assert is_kl_testable(a, kappa + 1, 1).holds
                assert is_kl_testable(a, kappa, 2).holds


def test_decide_ilt_examples():
    assert decide_ilt(universal_counting(AB)).status is LtStatus.LT
    v = decide_ilt(exactly_one_b_child())
    assert v.status is LtStatus.NOT_LT and v.reason is Reason.NOT_STUTTER_CLOSED
    assert witness_replays(exactly_one_b_child(), v.witness)
    assert decide_ilt(some_node_has_b_child()).status is LtStatus.LT
    assert decide_ilt(at_least_one_b_child()).status is LtStatus.LT
    assert decide_ilt(root_loses()).reason is Reason.NOT_TAME


def test_decide_alt_examples():
    v = decide_alt(universal_counting(AB))
    assert v.status is LtStatus.LT and v.lam == 1
    v = decide_alt(at_least_two_b_children())
    assert v.status is LtStatus.LT and (v.kappa, v.lam) == (1, 2)
    v = decide_alt(root_loses())
    assert v.status is LtStatus.NOT_LT and v.reason is Reason.NOT_TAME


def test_ilt_languages_are_alt_at_lambda_one():
    for a in [universal_counting(AB), some_node_has_b_child(), at_least_one_b_child()]:
        assert decide_ilt(a).status is LtStatus.LT
        v = decide_alt(a)
        assert v.status is LtStatus.LT and v.lam == 1


def test_brute_force_fixtures():
    assert brute_ilt(some_node_has_b_child()) == "yes"
    assert brute_ilt(exactly_one_b_child()) == "no"
    assert brute_hstutter(exactly_one_b_child(), 6).violated
    assert brute_hstutter(at_least_one_b_child(), 8).holds
    assert brute_kl_testable(at_least_two_b_children(), 1, 2, 8).holds


def test_decide_ilt_matches_brute_force_on_pool():
    for a in random_counting_pool(30, seed=8):
        v = decide_ilt(a)
        if v.conclusive:
            assert (v.status is LtStatus.LT) == (brute_ilt(a) == "yes")
        assert hstutter_check(a).violated == brute_hstutter(a, 8).violated
