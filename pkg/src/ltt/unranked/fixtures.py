"""Ready-made counting automata on unordered trees."""

from __future__ import annotations

import random

from .automata import CountingDfta, from_counting_function, minimize_counting, random_counting

AB = ("a", "b")


def _is_b_child_count(symbols, m, accept):
    """States (label is b, accept(count of b-children))."""

    def step(symbol, prof):
        b_kids = min(m, prof[2] + prof[3])
        return 2 * int(symbol == "b") + int(accept(b_kids))

    # states: 0 a/no, 1 a/yes, 2 b/no, 3 b/yes; profile counts capped at m
    return from_counting_function(symbols, 4, m, [1, 3], step)


def exactly_one_b_child(symbols=AB) -> CountingDfta:
    """The root has exactly one child labelled b."""
    return minimize_counting(_is_b_child_count(symbols, 2, lambda n: n == 1))


def at_least_one_b_child(symbols=AB) -> CountingDfta:
    """The root has at least one child labelled b."""
    return minimize_counting(_is_b_child_count(symbols, 1, lambda n: n >= 1))


def at_least_two_b_children(symbols=AB) -> CountingDfta:
    """The root has at least two b-children, written with threshold 3."""
    return minimize_counting(_is_b_child_count(symbols, 3, lambda n: n >= 2))


def some_node_has_b_child(symbols=AB) -> CountingDfta:
    """Some node has a child labelled b.  States: 0 found, 1 a, 2 b."""

    def step(symbol, prof):
        if prof[0] or prof[2]:
            return 0
        return 2 if symbol == "b" else 1

    return minimize_counting(from_counting_function(symbols, 3, 1, [0], step))


def root_loses(symbols=("a",)) -> CountingDfta:
    """Game reading: a node wins iff some child loses; accept a losing root.

    On chains this is even length, so vertical stutter fails.
    """

    def step(symbol, prof):
        return 1 if prof[0] else 0

    return minimize_counting(from_counting_function(symbols, 2, 1, [0], step, ["lose", "win"]))


def _shape_key(a: CountingDfta):
    return (a.symbols, a.n_states, a.m, tuple(sorted(a.final)), tuple(sorted(a.delta.items())))


def random_counting_pool(count: int, max_states: int = 3, max_m: int = 2, seed: int = 0) -> list:
    """``count`` pairwise different random minimal counting automata over 1 or 2 symbols."""
    rng = random.Random(seed)
    out, seen = [], set()
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 1000 * count:
            raise ValueError("could not draw enough distinct automata")
        symbols = AB[: 1 + rng.randrange(2)]
        n = 2 + rng.randrange(max(1, max_states - 1))
        m = 1 + rng.randrange(max_m)
        a = minimize_counting(random_counting(symbols, n, m, rng.randrange(2**31)))
        key = _shape_key(a)
        if key in seen:
            continue
        seen.add(key)
        out.append(a)
    return out
