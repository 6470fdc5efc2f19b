"""Deterministic bottom-up tree automata over ranked alphabets.

States are the integers ``0..n-1``; ``state_names`` keeps the identifiers
used in automaton files.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, Iterable, Mapping, Sequence

from .trees import PORT, Context, RankedAlphabet, Tree, concat


class Dfta:
    """A complete deterministic bottom-up tree automaton."""

    def __init__(
        self,
        alphabet: RankedAlphabet,
        n_states: int,
        final: Iterable[int],
        delta: Mapping,
        state_names: Sequence | None = None,
    ):
        if n_states < 1:
            raise ValueError("an automaton needs at least one state")
        self.alphabet = alphabet
        self.n_states = n_states
        self.final = frozenset(final)
        self.delta = dict(delta)
        self.state_names = tuple(state_names) if state_names is not None else tuple(range(n_states))
        if len(self.state_names) != n_states:
            raise ValueError("state_names must name every state")
        if not self.final <= set(range(n_states)):
            raise ValueError("final states must be states")
        for (symbol, args), target in self.delta.items():
            if symbol not in alphabet or alphabet.arity(symbol) != len(args):
                raise ValueError(f"transition on unknown symbol or wrong arity: {symbol}{args}")
            if not 0 <= target < n_states or any(not 0 <= q < n_states for q in args):
                raise ValueError(f"transition {symbol}{args} -> {target} uses an unknown state")
        for symbol, arity in alphabet.symbols:
            for args in itertools.product(range(n_states), repeat=arity):
                if (symbol, args) not in self.delta:
                    raise ValueError(f"transition map is incomplete at {symbol}{args}")
        self._cache: dict = {}

    @property
    def states(self) -> range:
        return range(self.n_states)

    def __repr__(self):
        return f"Dfta(states={self.n_states}, final={sorted(self.final)})"

    def step(self, symbol: str, args: Sequence[int]) -> int:
        return self.delta[symbol, tuple(args)]

    def run(self, t: Tree, memo: dict | None = None) -> int:
        if memo is not None:
            hit = memo.get(t)
            if hit is not None:
                return hit
        try:
            q = self.delta[t.label, tuple(self.run(c, memo) for c in t.children)]
        except KeyError:
            raise ValueError(f"tree is not over the automaton alphabet at {t.label!r}") from None
        if memo is not None:
            memo[t] = q
        return q

    def accepts(self, t: Tree, memo: dict | None = None) -> bool:
        return self.run(t, memo) in self.final

    def cached(self, key, build):
        """Memoise derived data; automata are immutable."""
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]


def run(a: Dfta, t: Tree) -> int:
    return a.run(t)


def accepts(a: Dfta, t: Tree) -> bool:
    return a.accepts(t)


def _require_same_alphabet(a: Dfta, b: Dfta) -> None:
    if a.alphabet != b.alphabet:
        raise ValueError("automata are over different alphabets")


def state_witnesses(a: Dfta) -> dict:
    """Map each reachable state to a smallest tree reaching it."""

    def build():
        best: dict = {}
        changed = True
        while changed:
            changed = False
            for (symbol, args), target in a.delta.items():
                if any(q not in best for q in args):
                    continue
                size = 1 + sum(best[q].size for q in args)
                if target not in best or size < best[target].size:
                    best[target] = Tree(symbol, [best[q] for q in args])
                    changed = True
        return best

    return a.cached("witnesses", build)


def reachable_states(a: Dfta) -> frozenset:
    return frozenset(state_witnesses(a))


def is_empty(a: Dfta) -> bool:
    return not (reachable_states(a) & a.final)


def complement(a: Dfta) -> Dfta:
    return Dfta(a.alphabet, a.n_states, set(a.states) - a.final, a.delta, a.state_names)


def product(a: Dfta, b: Dfta, combine: Callable[[bool, bool], bool]) -> Dfta:
    """Pair construction restricted to reachable pairs."""
    _require_same_alphabet(a, b)
    index: dict = {}
    order: list = []
    changed = True
    while changed:
        changed = False
        for symbol, arity in a.alphabet.symbols:
            for args in itertools.product(list(order), repeat=arity):
                pair = (a.step(symbol, [p[0] for p in args]), b.step(symbol, [p[1] for p in args]))
                if pair not in index:
                    index[pair] = len(order)
                    order.append(pair)
                    changed = True
    delta = {}
    for symbol, arity in a.alphabet.symbols:
        for args in itertools.product(order, repeat=arity):
            pair = (a.step(symbol, [p[0] for p in args]), b.step(symbol, [p[1] for p in args]))
            delta[symbol, tuple(index[p] for p in args)] = index[pair]
    final = [i for i, (p, q) in enumerate(order) if combine(p in a.final, q in b.final)]
    return Dfta(a.alphabet, len(order), final, delta, [f"{p},{q}" for p, q in order])


def intersection(a: Dfta, b: Dfta) -> Dfta:
    return product(a, b, lambda x, y: x and y)


def union(a: Dfta, b: Dfta) -> Dfta:
    return product(a, b, lambda x, y: x or y)


def equivalent(a: Dfta, b: Dfta) -> bool:
    return is_empty(product(a, b, lambda x, y: x != y))


def _single_node_contexts(a: Dfta, states: Sequence[int]):
    """Yield (symbol, slot, side-state tuple) for every one-node context."""
    for symbol, arity in a.alphabet.symbols:
        for slot in range(arity):
            for side in itertools.product(states, repeat=arity - 1):
                yield symbol, slot, side


def _plug(side: tuple, slot: int, q):
    return side[:slot] + (q,) + side[slot:]


def minimize(a: Dfta) -> Dfta:
    """Reachable part quotiented by the coarsest congruence respecting finality."""

    def build():
        reach = sorted(reachable_states(a))
        contexts = list(_single_node_contexts(a, reach))
        block = {q: int(q in a.final) for q in reach}
        while True:
            sigs = {
                q: (block[q],)
                + tuple(block[a.step(sym, _plug(side, slot, q))] for sym, slot, side in contexts)
                for q in reach
            }
            ids: dict = {}
            new_block = {}
            for q in reach:
                new_block[q] = ids.setdefault(sigs[q], len(ids))
            if len(ids) == len(set(block.values())):
                block = new_block
                break
            block = new_block
        # renumber blocks by smallest member for a stable result
        rep = {}
        for q in reach:
            rep.setdefault(block[q], q)
        order = sorted(rep, key=lambda b: rep[b])
        renum = {b: i for i, b in enumerate(order)}
        n = len(order)
        delta = {}
        for symbol, arity in a.alphabet.symbols:
            for args in itertools.product(range(n), repeat=arity):
                orig = tuple(rep[order[i]] for i in args)
                delta[symbol, args] = renum[block[a.step(symbol, orig)]]
        final = {renum[block[q]] for q in reach if q in a.final}
        names = [a.state_names[rep[b]] for b in order]
        m = Dfta(a.alphabet, n, final, delta, names)
        m._cache["minimal"] = m
        return m

    return a.cached("minimal", build)


def distinguishing_contexts(a: Dfta) -> dict:
    """Map unordered pairs of reachable states to a separating context.

    A context ``C`` separates ``p`` and ``q`` when exactly one of ``C·t_p``
    and ``C·t_q`` is accepted for trees reaching ``p`` and ``q``.
    """

    def build():
        reach = sorted(reachable_states(a))
        wit = state_witnesses(a)
        table: dict = {}
        for p, q in itertools.combinations(reach, 2):
            if (p in a.final) != (q in a.final):
                table[p, q] = Context(PORT, ())
        contexts = list(_single_node_contexts(a, reach))
        changed = True
        while changed:
            changed = False
            for p, q in itertools.combinations(reach, 2):
                if (p, q) in table:
                    continue
                for sym, slot, side in contexts:
                    p2 = a.step(sym, _plug(side, slot, p))
                    q2 = a.step(sym, _plug(side, slot, q))
                    if p2 == q2:
                        continue
                    outer = table.get((min(p2, q2), max(p2, q2)))
                    if outer is None:
                        continue
                    kids = [wit[s] for s in side]
                    kids.insert(slot, PORT)
                    table[p, q] = concat(outer, Context(Tree(sym, kids), (slot,)))
                    changed = True
                    break
        return table

    return a.cached("separators", build)


def distinguishing_context(a: Dfta, p: int, q: int) -> Context | None:
    if p == q:
        return None
    return distinguishing_contexts(a).get((min(p, q), max(p, q)))


def dead_states(a: Dfta) -> frozenset:
    """Reachable states from which no context reaches a final state."""

    def build():
        reach = sorted(reachable_states(a))
        live = {q for q in reach if q in a.final}
        contexts = list(_single_node_contexts(a, reach))
        changed = True
        while changed:
            changed = False
            for q in reach:
                if q in live:
                    continue
                if any(a.step(sym, _plug(side, slot, q)) in live for sym, slot, side in contexts):
                    live.add(q)
                    changed = True
        return frozenset(set(reach) - live)

    return a.cached("dead", build)


def random_dfta(alphabet: RankedAlphabet, n_states: int, seed: int) -> Dfta:
    if n_states < 1:
        raise ValueError("n_states must be at least 1")
    rng = random.Random(seed)
    delta = {}
    for symbol, arity in alphabet.symbols:
        for args in itertools.product(range(n_states), repeat=arity):
            delta[symbol, args] = rng.randrange(n_states)
    final = [q for q in range(n_states) if rng.random() < 0.5]
    return Dfta(alphabet, n_states, final, delta)


def universal(alphabet: RankedAlphabet) -> Dfta:
    delta = {(s, (0,) * n): 0 for s, n in alphabet.symbols}
    return Dfta(alphabet, 1, [0], delta)


def empty(alphabet: RankedAlphabet) -> Dfta:
    delta = {(s, (0,) * n): 0 for s, n in alphabet.symbols}
    return Dfta(alphabet, 1, [], delta)


def from_function(
    alphabet: RankedAlphabet,
    n_states: int,
    final: Iterable[int],
    fn: Callable[[str, tuple], int],
    state_names=None,
) -> Dfta:
    """Build a complete automaton from a transition function."""
    delta = {}
    for symbol, arity in alphabet.symbols:
        for args in itertools.product(range(n_states), repeat=arity):
            delta[symbol, args] = fn(symbol, args)
    return Dfta(alphabet, n_states, final, delta, state_names)
