"""Deterministic bottom-up counting automata on unordered trees.

A profile is a tuple with one entry per state: how many children are in
that state, where the value ``m`` stands for "at least m".
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, Iterable, Mapping, Sequence

from .trees import PORT, UTree, check_symbols, plug


def cap_add(profile: tuple, q: int, m: int, times: int = 1) -> tuple:
    out = list(profile)
    out[q] = min(m, out[q] + times)
    return tuple(out)


def all_profiles(n: int, m: int):
    return itertools.product(range(m + 1), repeat=n)


def render_constraint(c: int, m: int) -> str:
    return f">={m}" if c == m else f"={c}"


class CountingDfta:
    """States ``0..n-1``; ``delta[symbol, profile]`` is total over profiles."""

    def __init__(
        self,
        symbols: Iterable[str],
        n_states: int,
        m: int,
        final: Iterable[int],
        delta: Mapping,
        state_names: Sequence | None = None,
    ):
        if n_states < 1:
            raise ValueError("an automaton needs at least one state")
        if m < 1:
            raise ValueError("the counter threshold must be at least 1")
        self.symbols = tuple(dict.fromkeys(symbols))
        self.n_states = n_states
        self.m = m
        self.final = frozenset(final)
        self.delta = dict(delta)
        self.state_names = tuple(state_names) if state_names is not None else tuple(range(n_states))
        if len(self.state_names) != n_states:
            raise ValueError("state_names must name every state")
        if not self.final <= set(range(n_states)):
            raise ValueError("final states must be states")
        for (symbol, prof), target in self.delta.items():
            if symbol not in self.symbols or len(prof) != n_states or any(not 0 <= c <= m for c in prof):
                raise ValueError(f"bad transition key {symbol} {prof}")
            if not 0 <= target < n_states:
                raise ValueError(f"transition {symbol} {prof} -> {target} uses an unknown state")
        for symbol in self.symbols:
            for prof in all_profiles(n_states, m):
                if (symbol, prof) not in self.delta:
                    raise ValueError(f"transition map is incomplete at {symbol} {prof}")
        self._cache: dict = {}

    def __repr__(self):
        return f"CountingDfta(states={self.n_states}, m={self.m}, final={sorted(self.final)})"

    @property
    def states(self) -> range:
        return range(self.n_states)

    def cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def zero(self) -> tuple:
        return (0,) * self.n_states

    def profile(self, child_states) -> tuple:
        out = [0] * self.n_states
        for q in child_states:
            out[q] = min(self.m, out[q] + 1)
        return tuple(out)

    def step(self, symbol: str, child_states) -> int:
        return self.delta[symbol, self.profile(child_states)]

    def run(self, t: UTree, memo: dict | None = None) -> int:
        memo = {} if memo is None else memo
        return self._run(t, memo)

    def _run(self, t, memo):
        q = memo.get(t)
        if q is None:
            if t.label not in self.symbols:
                raise ValueError(f"unknown symbol {t.label!r}")
            q = memo[t] = self.step(t.label, [self._run(c, memo) for c in t.children])
        return q

    def accepts(self, t: UTree, memo: dict | None = None) -> bool:
        return self.run(t, memo) in self.final


def run_counting(a: CountingDfta, t: UTree) -> int:
    check_symbols(t, a.symbols)
    return a.run(t)


def accepts_counting(a: CountingDfta, t: UTree) -> bool:
    return run_counting(a, t) in a.final


def from_counting_function(
    symbols, n_states: int, m: int, final, fn: Callable[[str, tuple], int], state_names=None
) -> CountingDfta:
    delta = {(s, p): fn(s, p) for s in symbols for p in all_profiles(n_states, m)}
    return CountingDfta(symbols, n_states, m, final, delta, state_names)


def universal_counting(symbols) -> CountingDfta:
    return from_counting_function(symbols, 1, 1, [0], lambda s, p: 0)


def complete_with_sink(symbols, n_states: int, m: int, final, partial: Mapping, state_names=None) -> CountingDfta:
    """Send every missing transition to a new rejecting sink state."""
    sink = n_states
    names = list(state_names) if state_names is not None else list(range(n_states))
    names.append("sink")
    delta = {}
    for s in symbols:
        for p in all_profiles(n_states + 1, m):
            if p[sink]:
                delta[s, p] = sink
            else:
                delta[s, p] = partial.get((s, p[:sink]), sink)
    return CountingDfta(symbols, n_states + 1, m, final, delta, names)


def realized_profiles(a: CountingDfta):
    """Profiles whose nonzero entries are reachable states."""
    reach = reachable_states(a)
    for p in all_profiles(a.n_states, a.m):
        if all(c == 0 or q in reach for q, c in enumerate(p)):
            yield p


def state_witnesses(a: CountingDfta) -> dict:
    """A small tree reaching each reachable state."""

    def build():
        wit: dict = {}
        changed = True
        while changed:
            changed = False
            known = sorted(wit)
            for symbol in a.symbols:
                for counts in itertools.product(range(a.m + 1), repeat=len(known)):
                    prof = [0] * a.n_states
                    kids = []
                    for q, c in zip(known, counts):
                        prof[q] = c
                        kids.extend([wit[q]] * c)
                    q = a.delta[symbol, tuple(prof)]
                    t = UTree(symbol, kids)
                    if q not in wit or t.size < wit[q].size:
                        if q not in wit:
                            changed = True
                        wit[q] = t
        return wit

    return a.cached("witnesses", build)


def reachable_states(a: CountingDfta) -> frozenset:
    return frozenset(state_witnesses(a))


def children_for(a: CountingDfta, prof: tuple) -> list:
    """Witness children realising ``prof`` (``m`` copies for ">= m")."""
    wit = state_witnesses(a)
    out = []
    for q, c in enumerate(prof):
        out.extend([wit[q]] * c)
    return out


def _one_node_contexts(a: CountingDfta):
    """(symbol, side profile) for every one-node context over reachable states."""
    for symbol in a.symbols:
        for prof in realized_profiles(a):
            yield symbol, prof


def minimize_counting(a: CountingDfta) -> CountingDfta:
    """Reachable quotient by the coarsest congruence, then the smallest threshold."""

    def build():
        reach = sorted(reachable_states(a))
        contexts = list(_one_node_contexts(a))
        block = {q: int(q in a.final) for q in reach}
        while True:
            sigs = {
                q: (block[q],) + tuple(block[a.delta[s, cap_add(p, q, a.m)]] for s, p in contexts) for q in reach
            }
            ids: dict = {}
            new = {q: ids.setdefault(sigs[q], len(ids)) for q in reach}
            stable = len(ids) == len(set(block.values()))
            block = new
            if stable:
                break
        rep = {}
        for q in reach:
            rep.setdefault(block[q], q)
        order = sorted(rep, key=lambda b: rep[b])
        renum = {b: i for i, b in enumerate(order)}
        n = len(order)

        def target(symbol, cls_prof):
            prof = [0] * a.n_states
            for i, c in enumerate(cls_prof):
                prof[rep[order[i]]] = c
            return renum[block[a.delta[symbol, tuple(prof)]]]

        full = {(s, p): target(s, p) for s in a.symbols for p in all_profiles(n, a.m)}
        m2 = a.m
        while m2 > 1 and all(
            full[s, p] == full[s, tuple(a.m if c >= m2 - 1 else c for c in p)]
            for s in a.symbols
            for p in all_profiles(n, a.m)
            if any(c >= m2 - 1 for c in p)
        ):
            m2 -= 1
        delta = {(s, p): full[s, tuple(a.m if c == m2 else c for c in p)] for s in a.symbols for p in all_profiles(n, m2)}
        final = {renum[block[q]] for q in reach if q in a.final}
        names = [a.state_names[rep[b]] for b in order]
        out = CountingDfta(a.symbols, n, m2, final, delta, names)
        out._cache["minimal"] = out
        return out

    return a.cached("minimal", build)


def distinguishing_contexts(a: CountingDfta) -> dict:
    """Map pairs p < q of reachable states to a separating context."""

    def build():
        reach = sorted(reachable_states(a))
        table: dict = {}
        for p, q in itertools.combinations(reach, 2):
            if (p in a.final) != (q in a.final):
                table[p, q] = PORT
        contexts = list(_one_node_contexts(a))
        changed = True
        while changed:
            changed = False
            for p, q in itertools.combinations(reach, 2):
                if (p, q) in table:
                    continue
                for s, prof in contexts:
                    p2 = a.delta[s, cap_add(prof, p, a.m)]
                    q2 = a.delta[s, cap_add(prof, q, a.m)]
                    outer = table.get((min(p2, q2), max(p2, q2))) if p2 != q2 else None
                    if outer is None:
                        continue
                    table[p, q] = plug(outer, UTree(s, children_for(a, prof) + [PORT]))
                    changed = True
                    break
        return table

    return a.cached("separators", build)


def distinguishing_context(a: CountingDfta, p: int, q: int):
    if p == q:
        return None
    return distinguishing_contexts(a).get((min(p, q), max(p, q)))


def dead_states(a: CountingDfta) -> frozenset:
    def build():
        reach = sorted(reachable_states(a))
        live = {q for q in reach if q in a.final}
        contexts = list(_one_node_contexts(a))
        changed = True
        while changed:
            changed = False
            for q in reach:
                if q not in live and any(a.delta[s, cap_add(p, q, a.m)] in live for s, p in contexts):
                    live.add(q)
                    changed = True
        return frozenset(set(reach) - live)

    return a.cached("dead", build)


def random_counting(symbols, n_states: int, m: int, seed: int) -> CountingDfta:
    rng = random.Random(seed)
    delta = {(s, p): rng.randrange(n_states) for s in symbols for p in all_profiles(n_states, m)}
    final = [q for q in range(n_states) if rng.random() < 0.5]
    return CountingDfta(symbols, n_states, m, final, delta)
