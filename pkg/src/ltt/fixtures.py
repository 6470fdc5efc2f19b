"""Ready-made languages used by the tests, the acceptance suite and the CLI."""

from __future__ import annotations

import itertools
import random

from .automata import Dfta, from_function, minimize, random_dfta
from .trees import RankedAlphabet, Tree
from .words import word_dfa

BINARY_ABC = RankedAlphabet({"a": 2, "b": 0, "c": 0})
BINARY_AB = RankedAlphabet({"a": 2, "b": 0})


def even_b(alphabet: RankedAlphabet = BINARY_ABC) -> Dfta:
    """Trees with an even number of b-leaves (states: 0 even, 1 odd)."""

    def step(symbol, args):
        if not args:
            return int(symbol == "b")
        return sum(args) % 2

    return from_function(alphabet, 2, [0], step, ["even", "odd"])


def root_is(label: str, alphabet: RankedAlphabet = BINARY_AB) -> Dfta:
    return from_function(alphabet, 2, [0], lambda s, _: 0 if s == label else 1, ["yes", "no"])


def left_child_even_b(alphabet: RankedAlphabet = BINARY_ABC) -> Dfta:
    """The root's left subtree has an even number of b-leaves.

    State ``2 * parity + left`` records the b-parity of the subtree and the
    parity of its left child; a leaf counts as having an odd left child.
    """

    def step(symbol, args):
        if not args:
            return 2 * int(symbol == "b") + 1
        p0, p1 = (q // 2 for q in args)
        return 2 * ((p0 + p1) % 2) + p0

    return minimize(from_function(alphabet, 4, [0, 2], step))


# -- word languages ----------------------------------------------------------

AB = ("a", "b")


def word_suite() -> dict:
    """Curated word languages: name -> (automaton, is it locally testable)."""
    return {
        "(ab)*": (word_dfa(AB, 3, 0, [0], lambda q, c: {(0, "a"): 1, (1, "b"): 0}.get((q, c), 2)), True),
        "(aa)*": (word_dfa(("a",), 2, 0, [0], lambda q, c: 1 - q), False),
        "a*": (word_dfa(AB, 2, 0, [0], lambda q, c: 0 if (q, c) == (0, "a") else 1), True),
        "b*a*": (
            word_dfa(AB, 3, 0, [0, 1], lambda q, c: {(0, "b"): 0, (0, "a"): 1, (1, "a"): 1}.get((q, c), 2)),
            True,
        ),
        "contains ab": (
            word_dfa(AB, 3, 0, [2], lambda q, c: 2 if q == 2 else (1 if c == "a" else (2 if q == 1 else 0))),
            True,
        ),
        "even number of a": (word_dfa(AB, 2, 0, [0], lambda q, c: 1 - q if c == "a" else q), False),
        "starts with a": (word_dfa(AB, 3, 0, [1], lambda q, c: q if q else (1 if c == "a" else 2)), True),
        "ends with b": (word_dfa(AB, 2, 0, [1], lambda q, c: 1 if c == "b" else 0), True),
        "(aaa)*": (word_dfa(("a",), 3, 0, [0], lambda q, c: (q + 1) % 3), False),
    }


# -- the tame language that is not locally testable --------------------------

LEAVES = ("h1", "h2", "h3")
BRANCH_LETTERS = ("b", "c", "e", "d")  # e plays the role of c'


def _branch_step(letter: str, state):
    """Branch automaton reading b*(c|e)d*h bottom-up.

    ``state`` is ``(leaf, phase)`` with phase "d" (only d's read so far),
    "c" or "e" (the marker was read, now in the b* prefix), or None (dead).
    """
    if state is None:
        return None
    leaf, phase = state
    if letter == "d":
        return state if phase == "d" else None
    if letter in ("c", "e"):
        return (leaf, letter) if phase == "d" else None
    if letter == "b":
        return state if phase in ("c", "e") else None
    raise ValueError(letter)


def _root_accepts(branches) -> bool:
    if any(s is None or s[1] == "d" for s in branches):
        return False
    leaves = {s[0] for s in branches}
    return len(leaves) == 3 and sum(s[1] == "e" for s in branches) == 1


def _branch_states():
    return [(h, p) for h in LEAVES for p in ("d", "c", "e")]


def tame_not_lt_ternary() -> Dfta:
    """Root a with three unary branches b*cd*, b*cd*, b*ed* ending in distinct h's."""
    alphabet = RankedAlphabet(
        [("a", 3)] + [(x, 1) for x in BRANCH_LETTERS] + [(h, 0) for h in LEAVES]
    )
    branch = _branch_states()
    names = [f"{h}:{p}" for h, p in branch] + ["accept", "sink"]
    idx = {s: i for i, s in enumerate(branch)}
    acc, sink = len(branch), len(branch) + 1

    def step(symbol, args):
        if symbol in LEAVES:
            return idx[symbol, "d"]
        if symbol == "a":
            if any(q >= acc for q in args):
                return sink
            return acc if _root_accepts([branch[q] for q in args]) else sink
        (q,) = args
        if q >= acc:
            return sink
        nxt = _branch_step(symbol, branch[q])
        return sink if nxt is None else idx[nxt]

    return minimize(from_function(alphabet, len(names), [acc], step, names))


def tame_not_lt_binary() -> Dfta:
    """Strictly binary encoding of :func:`tame_not_lt_ternary`.

    A branch letter x becomes a binary node whose left child continues the
    branch and whose right child is the leaf ``n``.  The root a(x, y, z)
    becomes a(x, r(y, z)).
    """
    alphabet = RankedAlphabet(
        [("a", 2), ("r", 2)] + [(x, 2) for x in BRANCH_LETTERS] + [(h, 0) for h in LEAVES] + [("n", 0)]
    )
    branch = _branch_states()
    pairs = list(itertools.product(branch, repeat=2))
    names = [f"{h}:{p}" for h, p in branch] + [f"pair:{x[0]}:{x[1]}|{y[0]}:{y[1]}" for x, y in pairs]
    names += ["nil", "accept", "sink"]
    bidx = {s: i for i, s in enumerate(branch)}
    pidx = {p: len(branch) + i for i, p in enumerate(pairs)}
    nil = len(branch) + len(pairs)
    acc, sink = nil + 1, nil + 2

    def step(symbol, args):
        if symbol in LEAVES:
            return bidx[symbol, "d"]
        if symbol == "n":
            return nil
        left, right = args
        if symbol in BRANCH_LETTERS:
            if left >= len(branch) or right != nil:
                return sink
            nxt = _branch_step(symbol, branch[left])
            return sink if nxt is None else bidx[nxt]
        if symbol == "r":
            if left >= len(branch) or right >= len(branch):
                return sink
            return pidx[branch[left], branch[right]]
        # symbol a
        if left >= len(branch) or not len(branch) <= right < nil:
            return sink
        y, z = pairs[right - len(branch)]
        return acc if _root_accepts([branch[left], y, z]) else sink

    return minimize(from_function(alphabet, len(names), [acc], step, names))


def _chain(letters: str, leaf: str, binary: bool) -> Tree:
    t = Tree(leaf)
    for x in reversed(letters):
        t = Tree(x, [t, Tree("n")]) if binary else Tree(x, [t])
    return t


def tame_not_lt_pair(kappa: int, binary: bool = True) -> tuple:
    """The accepted/rejected pair with three branches b^κ x d^κ h_i.

    The member has markers (c, c, e); the non-member has (c, e, e).
    """
    spine = lambda mark, leaf: _chain("b" * kappa + mark + "d" * kappa, leaf, binary)  # noqa: E731

    def root(marks):
        kids = [spine(m, h) for m, h in zip(marks, LEAVES)]
        if binary:
            return Tree("a", [kids[0], Tree("r", kids[1:])])
        return Tree("a", kids)

    return root("cce"), root("cee")


# -- random pools ------------------------------------------------------------


def _shape_key(a: Dfta) -> tuple:
    return (a.alphabet, a.n_states, tuple(sorted(a.final)), tuple(sorted(a.delta.items())))


def random_pool(alphabets, count: int, max_states: int = 3, seed: int = 0) -> list:
    """``count`` pairwise different random minimal automata.

    Automata are drawn round-robin over the alphabets from 2..max_states
    raw states and minimised, so smaller automata also occur.
    """
    rng = random.Random(seed)
    out: list = []
    seen: set = set()
    i = 0
    while len(out) < count:
        alphabet = alphabets[i % len(alphabets)]
        n = 2 + rng.randrange(max(1, max_states - 1))
        i += 1
        a = minimize(random_dfta(alphabet, n, rng.randrange(2**31)))
        key = _shape_key(a)
        if key in seen:
            continue
        seen.add(key)
        out.append(a)
        if i > 1000 * count:
            raise ValueError("could not draw enough distinct automata")
    return out


def pool_alphabets() -> list:
    return [BINARY_AB, BINARY_ABC]
