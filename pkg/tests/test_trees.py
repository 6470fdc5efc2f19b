"""Ranked trees, contexts, k-types and the guarded operations."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltt.oracles import enumerate_trees, operation_instances
from ltt.trees import (
    PORT,
    Context,
    OperationError,
    RankedAlphabet,
    Tree,
    TreeSyntaxError,
    apply_guarded,
    concat,
    context_between,
    count_ktypes,
    enumerate_ktype_shapes,
    equiv_k,
    ktype_of,
    occurrence_set,
    parse_path,
    parse_term,
    parse_tree,
    render_path,
    render_tree,
    subtree_at,
)

AB = RankedAlphabet({"a": 2, "b": 0})
ABC = RankedAlphabet({"a": 2, "b": 0, "c": 0})


def random_tree(alphabet, rng, depth=5):
    leaves = [s for s, n in alphabet.symbols if n == 0]
    inner = [(s, n) for s, n in alphabet.symbols if n > 0]
    if depth == 0 or rng.random() < 0.3:
        return Tree(rng.choice(leaves))
    s, n = rng.choice(inner)
    return Tree(s, [random_tree(alphabet, rng, depth - 1) for _ in range(n)])


def all_paths(t):
    return [p for p, _ in t.nodes()]


def test_parse_leaf():
    t = parse_tree("b", AB)
    assert t.label == "b" and t.is_leaf


def test_parse_nested():
    t = parse_tree("a(b,a(b,b))", AB)
    assert t.label == "a"
    assert len(all_paths(t)) == 5


def test_parse_arity_mismatch():
    with pytest.raises(ValueError):
        parse_tree("a(b)", AB)


def test_parse_whitespace_and_errors():
    assert parse_term(" a ( b , b ) ") == parse_term("a(b,b)")
    for bad in ["a(", "a(b,)", "(b)", "a(b))", "1a"]:
        with pytest.raises(TreeSyntaxError):
            parse_term(bad)


def test_render():
    assert render_tree(Tree("b")) == "b"
    assert render_tree(parse_term("a(b,b)")) == "a(b,b)"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_render_round_trip(seed):
    t = random_tree(ABC, random.Random(seed), depth=5)
    assert parse_tree(render_tree(t), ABC) == t


def test_subtree_at():
    t = parse_term("a(b,c)")
    assert subtree_at(t, ()) == t
    assert subtree_at(t, (1,)) == Tree("c")
    assert subtree_at(parse_term("a(a(b,b),b)"), (0, 0)) == Tree("b")


def test_paths_render():
    assert parse_path("") == ()
    assert parse_path("0/1") == (0, 1)
    assert render_path((0, 1)) == "0/1"


def test_context_between_same_node_is_port():
    t = parse_term("a(b,c)")
    c = context_between(t, (0,), (0,))
    assert c.is_empty
    assert concat(c, subtree_at(t, (0,))) == Tree("b")


def test_context_between_root_child():
    c = context_between(parse_term("a(b,c)"), (), (0,))
    assert render_tree(c.tree) == "a(_,c)"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_context_between_restores_subtree(seed):
    rng = random.Random(seed)
    t = random_tree(ABC, rng)
    x = rng.choice(all_paths(t))
    below = [p for p in all_paths(t) if p[: len(x)] == x]
    y = rng.choice(below)
    assert concat(context_between(t, x, y), subtree_at(t, y)) == subtree_at(t, x)


def test_concat_port_identity_and_plug():
    t = parse_term("a(b,c)")
    assert concat(Context(PORT), t) == t
    c = Context(parse_term("a(_,b)"))
    assert concat(c, Tree("b")) == parse_term("a(b,b)")


def test_concat_associative():
    rng = random.Random(3)
    for _ in range(30):
        c1 = Context(parse_term(f"a({render_tree(random_tree(ABC, rng, 2))},_)"))
        c2 = Context(parse_term(f"a(_,{render_tree(random_tree(ABC, rng, 2))})"))
        t = random_tree(ABC, rng, 3)
        assert concat(concat(c1, c2), t) == concat(c1, concat(c2, t))


def test_ktype_truncation():
    t = parse_term("a(a(b,b),b)")
    assert str(ktype_of(t, (), 0)) == "a"
    assert str(ktype_of(t, (), 1)) == "a(a,b)"
    assert ktype_of(t, (), 5).shape == t


def test_ktype_rejects_negative_k():
    with pytest.raises(ValueError):
        ktype_of(Tree("b"), (), -1)


def test_occurrence_sets():
    assert {str(x) for x in occurrence_set(Tree("b"), 1)} == {"b"}
    assert {str(x) for x in occurrence_set(parse_term("a(b,b)"), 0)} == {"a", "b"}
    assert {str(x) for x in occurrence_set(parse_term("a(a(b,b),b)"), 1)} == {"a(a,b)", "a(b,b)", "b"}


def test_equiv_k():
    t1, t2 = parse_term("a(b,b)"), parse_term("a(a(b,b),b)")
    assert equiv_k(t1, t1, 2)
    assert not equiv_k(t1, Tree("b"), 0)
    assert equiv_k(t1, t2, 0)
    assert not equiv_k(t1, t2, 1)


def test_count_ktypes_values():
    assert count_ktypes(AB, 0) == 2
    assert count_ktypes(AB, 1) == 5
    assert count_ktypes(AB, 2) == 26


@pytest.mark.parametrize(
    "arities",
    [{"a": 2, "b": 0}, {"a": 2, "b": 0, "c": 0}, {"a": 1, "b": 0}, {"a": 2, "f": 1, "b": 0}],
)
@pytest.mark.parametrize("k", [0, 1, 2])
def test_count_ktypes_matches_enumeration(arities, k):
    alphabet = RankedAlphabet(arities)
    assert count_ktypes(alphabet, k) == len(enumerate_ktype_shapes(alphabet, k))


def test_hswap_identical_subtrees_is_identity():
    t = parse_term("a(a(b,b),a(b,b))")
    assert apply_guarded("hswap", t, [(0,), (1,)], 1) == t


def test_hswap_checks_guard():
    t = parse_term("a(a(b,b),b)")
    with pytest.raises(OperationError):
        apply_guarded("hswap", t, [(0,), (1,)], 0)


def test_vstutter_removes_loop():
    # C = a(_,b) and the loop a(_,c) occurs twice above a(b,b)
    t = parse_term("a(a(a(a(b,b),c),c),b)")
    out = apply_guarded("vstutter", t, [(0,), (0, 0), (0, 0, 0)], 0)
    assert out == parse_term("a(a(a(b,b),c),b)")


def test_htransfer_requires_equal_subtrees():
    t = parse_term("a(a(b,b),a(a(b,b),a(b,c)))")
    out = apply_guarded("htransfer", t, [(0,), (1, 0), (1, 1)], 0)
    assert out == parse_term("a(a(b,b),a(a(b,c),a(b,c)))")
    with pytest.raises(OperationError):
        apply_guarded("htransfer", t, [(0,), (1, 1), (1, 0)], 0)


def _random_instances(rng, k, count):
    """Random guard-valid operation applications."""
    ops = ["hswap", "htransfer", "vswap", "vstutter"]
    out = []
    while len(out) < count:
        t = random_tree(ABC, rng, depth=6)
        op = rng.choice(ops)
        inst = list(operation_instances(t, op, k))
        if inst:
            out.append((op, t, rng.choice(inst)))
    return out


@pytest.mark.parametrize("k", [0, 1, 2])
def test_guarded_ops_preserve_next_types(k):
    rng = random.Random(100 + k)
    for op, t, nodes in _random_instances(rng, k, 60):
        out = apply_guarded(op, t, nodes, k)
        assert occurrence_set(out, k + 1) == occurrence_set(t, k + 1)
        assert ktype_of(out, (), k) == ktype_of(t, (), k)
        if () not in nodes:
            assert ktype_of(out, (), k + 1) == ktype_of(t, (), k + 1)


def test_vswap_at_root_can_change_root_type():
    t = parse_term("a(b,a(c,a(b,b)))")
    out = apply_guarded("vswap", t, [(), (1,), (1, 1)], 0)
    assert out == parse_term("a(c,a(b,a(b,b)))")
    assert occurrence_set(out, 1) == occurrence_set(t, 1)
    assert ktype_of(out, (), 1) != ktype_of(t, (), 1)


def test_enumerate_small():
    assert [render_tree(t) for t in enumerate_trees(AB, 1)] == ["b"]
    assert [render_tree(t) for t in enumerate_trees(AB, 3)] == ["b", "a(b,b)"]
    assert len(list(enumerate_trees(AB, 7))) == 9
