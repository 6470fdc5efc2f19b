"""State-level views of a tree automaton refined by k-types.

These fixpoints replace quantification over trees and contexts by
quantification over finitely many automaton-level objects:

* typed states: pairs (state, root k-type) reached by some tree;
* context behaviours: the pair of maps a one-port context induces on states
  and on root k-types;
* multi-hole contexts, used to ask whether two assignments of states to
  holes can be told apart.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .automata import Dfta, state_witnesses
from .budget import Budget, BudgetExceeded, as_budget, saturate
from .trees import PORT, Context, KType, Tree, TypeTable, concat, EMPTY_CONTEXT

HOLE_PREFIX = "#"


@dataclass(frozen=True)
class TypedState:
    q: int
    tau: KType
    witness: Tree = field(compare=False, repr=False)


class TypedStates:
    """The realized (state, k-type) pairs of an automaton, with witnesses."""

    def __init__(self, automaton: Dfta, k: int, table: TypeTable, witnesses: dict, complete: bool = True):
        self.automaton = automaton
        self.k = k
        self.table = table
        self.witnesses = witnesses
        self.complete = complete
        self.type_list = sorted({tid for _, tid in witnesses})
        self.type_index = {tid: i for i, tid in enumerate(self.type_list)}
        by_type: dict = {}
        for q, tid in witnesses:
            by_type.setdefault(tid, []).append(q)
        self.states_by_type = {tid: sorted(qs) for tid, qs in by_type.items()}

    def __len__(self):
        return len(self.witnesses)

    def __contains__(self, pair):
        return pair in self.witnesses

    def pairs(self):
        return sorted(self.witnesses)

    def typed_states(self) -> list:
        return [
            TypedState(q, self.table.ktype(tid), self.witnesses[q, tid]) for q, tid in self.pairs()
        ]


def realized_typed_states(a: Dfta, k: int, budget=None, table: TypeTable | None = None) -> TypedStates:
    """All (state, k-type) pairs reached by trees, by a bottom-up product.

    A parent only sees its children's states and (k-1)-types, so the
    fixpoint runs over those projections and records the full pairs as it
    goes.  Raises BudgetExceeded whose ``partial`` is a sound, incomplete
    TypedStates.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    budget = as_budget(budget)
    table = table if table is not None else TypeTable()
    delta = a.delta
    seen: dict = {}
    full: dict = {}

    def combine(symbol, keys):
        q = delta[symbol, tuple(c[0] for c in keys)]
        if k == 0:
            tid = table.intern(0, symbol)
            proj = None
        else:
            tid = table.intern(k, symbol, tuple(c[1] for c in keys))
            proj = table.truncate(tid)
        if (q, tid) not in full:
            full[q, tid] = Tree(symbol, [seen[c] for c in keys])
            if len(full) > budget.items:
                raise BudgetExceeded("typed states", None, len(full))
        return q, proj

    try:
        saturate(a.alphabet.symbols, combine, budget, "typed states", found=seen)
    except BudgetExceeded as exc:
        exc.partial = TypedStates(a, k, table, full, complete=False)
        raise
    return TypedStates(a, k, table, full)


@dataclass(frozen=True)
class ContextBehavior:
    """What a context does to states and to realized root types.

    ``type_map[i]`` is the index (in ``TypedStates.type_list``) of the root
    type obtained by plugging a tree of type ``type_list[i]``.
    """

    state_map: tuple
    type_map: tuple
    witness: Context = field(compare=False, repr=False)

    def apply(self, q: int, type_idx: int) -> tuple:
        return self.state_map[q], self.type_map[type_idx]

    def after(self, inner: "ContextBehavior") -> "ContextBehavior":
        """The behaviour of ``self.witness · inner.witness``."""
        return ContextBehavior(
            tuple(self.state_map[q] for q in inner.state_map),
            tuple(self.type_map[i] for i in inner.type_map),
            concat(self.witness, inner.witness),
        )

    def loops(self) -> list:
        """Type indices mapped to themselves."""
        return [i for i, j in enumerate(self.type_map) if i == j]

    def as_mapping(self, ts: TypedStates) -> dict:
        out = {}
        for q, tid in ts.pairs():
            q2, j = self.apply(q, ts.type_index[tid])
            tid2 = ts.type_list[j]
            out[(q, tid)] = (q2, tid2)
        return out


def identity_behavior(a: Dfta, ts: TypedStates) -> ContextBehavior:
    return ContextBehavior(tuple(a.states), tuple(range(len(ts.type_list))), EMPTY_CONTEXT)


def elementary_behaviors(a: Dfta, ts: TypedStates) -> list:
    """Behaviours of one-node contexts whose other slots hold realized trees."""
    k, table = ts.k, ts.table
    if k == 0:
        wit = state_witnesses(a)
        sides = {(q, None): wit[q] for q in sorted(wit)}
    else:
        sides = {}
        for (q, tid), t in sorted(ts.witnesses.items()):
            key = (q, table.truncate(tid))
            if key not in sides or t.size < sides[key].size:
                sides[key] = t
    side_keys = sorted(sides, key=lambda s: (s[0], -1 if s[1] is None else s[1]))
    trunc_of = [None if k == 0 else table.truncate(tid) for tid in ts.type_list]
    out: dict = {}
    for symbol, arity in a.alphabet.symbols:
        for slot in range(arity):
            for side in itertools.product(side_keys, repeat=arity - 1):
                qs = [s[0] for s in side]
                smap = tuple(a.delta[symbol, tuple(qs[:slot] + [q] + qs[slot:])] for q in a.states)
                if k == 0:
                    out_t = table.intern(0, symbol)
                    tmap = tuple(ts.type_index[out_t] for _ in ts.type_list)
                else:
                    st = [s[1] for s in side]
                    tmap = tuple(
                        ts.type_index[table.intern(k, symbol, tuple(st[:slot] + [tr] + st[slot:]))]
                        for tr in trunc_of
                    )
                key = (smap, tmap)
                if key in out:
                    continue
                kids = [sides[s] for s in side]
                kids.insert(slot, PORT)
                out[key] = ContextBehavior(smap, tmap, Context(Tree(symbol, kids), (slot,)))
    return list(out.values())


def iter_behaviors(a: Dfta, ts: TypedStates, budget=None) -> Iterator[ContextBehavior]:
    """Breadth-first closure of the elementary behaviours under composition.

    Yields the identity first, then every new behaviour once.  Raises
    BudgetExceeded after ``budget.items`` behaviours.
    """
    budget = as_budget(budget)
    meter = budget.meter()
    if not ts.complete:
        raise ValueError("behaviours need a complete set of typed states")
    elems = elementary_behaviors(a, ts)
    start = identity_behavior(a, ts)
    seen = {(start.state_map, start.type_map)}
    queue = deque([start])
    yield start
    while queue:
        h = queue.popleft()
        for e in elems:
            smap = tuple(e.state_map[q] for q in h.state_map)
            tmap = tuple(e.type_map[i] for i in h.type_map)
            key = (smap, tmap)
            if key in seen:
                continue
            seen.add(key)
            if meter.over(len(seen)):
                raise BudgetExceeded("context behaviours", None, len(seen))
            g = ContextBehavior(smap, tmap, concat(e.witness, h.witness))
            queue.append(g)
            yield g


def realized_behaviors(a: Dfta, k: int, budget=None, typed: TypedStates | None = None) -> list:
    budget = as_budget(budget)
    ts = typed if typed is not None else realized_typed_states(a, k, budget)
    out: list = []
    try:
        for b in iter_behaviors(a, ts, budget):
            out.append(b)
    except BudgetExceeded as exc:
        exc.partial = out
        raise
    return out


# -- multi-hole contexts -----------------------------------------------------


def hole(i: int) -> Tree:
    return Tree(f"{HOLE_PREFIX}{i}")


def hole_paths(t: Tree) -> list:
    """Paths of the hole markers of ``t``, ordered by hole number."""
    found = {}
    for path, node in t.nodes():
        if node.label.startswith(HOLE_PREFIX) and not node.children:
            found[int(node.label[len(HOLE_PREFIX):])] = path
    return [found[i] for i in sorted(found)]


def plug_holes(t: Tree, fillers: Sequence[Tree]) -> Tree:
    if t.label.startswith(HOLE_PREFIX) and not t.children:
        return fillers[int(t.label[len(HOLE_PREFIX):])]
    if not t.children:
        return t
    return Tree(t.label, [plug_holes(c, fillers) for c in t.children])


def holes_distinguishable(a: Dfta, holes: int, assign_a: Sequence[int], assign_b: Sequence[int], budget=None):
    """Is there a context with each hole used once telling the assignments apart?

    Returns ``(answer, witness)``.  The witness is a tree over the alphabet
    plus hole markers ``#0``, ``#1``, ...; evaluating it with the holes
    bound to ``assign_a`` and to ``assign_b`` gives different acceptance.
    """
    assign_a, assign_b = tuple(assign_a), tuple(assign_b)
    if not (holes == len(assign_a) == len(assign_b)):
        raise ValueError("assignments must have one state per hole")
    if assign_a == assign_b:
        return False, None
    key = ("holes", assign_a, assign_b)
    cache = a._cache.setdefault("holes", {})
    if key in cache:
        return cache[key]
    mirrored = ("holes", assign_b, assign_a)
    if mirrored in cache:
        return cache[mirrored]
    result = _holes_search(a, holes, assign_a, assign_b, as_budget(budget))
    cache[key] = result
    return result


def _holes_search(a: Dfta, holes: int, assign_a, assign_b, budget: Budget):
    """Pairs of states reached by hole-marked trees, per set of used holes.

    A tree using the hole set M either has a single hole-carrying child at
    its root (one-hole extension of a smaller tree with the same M) or is
    the lowest common ancestor of two or more disjoint parts of M.  Sets are
    processed by size, each closed under one-node extensions.
    """
    final = a.final
    delta = a.delta
    reach = state_witnesses(a)
    states = sorted(reach)
    full = (1 << holes) - 1
    meter = budget.meter()
    items: dict = {}
    elementary = [
        (symbol, slot, side)
        for symbol, arity in a.alphabet.symbols
        for slot in range(arity)
        for side in itertools.product(states, repeat=arity - 1)
    ]

    def close(mask: int, level: dict):
        queue = deque(level)
        while queue:
            pair = queue.popleft()
            if mask == full and (pair[0] in final) != (pair[1] in final):
                return level[pair]
            for symbol, slot, side in elementary:
                left = side[:slot] + (pair[0],) + side[slot:]
                right = side[:slot] + (pair[1],) + side[slot:]
                nxt = (delta[symbol, left], delta[symbol, right])
                if nxt in level:
                    continue
                kids = [reach[q] for q in side]
                kids.insert(slot, level[pair])
                level[nxt] = Tree(symbol, kids)
                queue.append(nxt)
                if meter.over(sum(len(v) for v in items.values()) + len(level)):
                    raise BudgetExceeded("hole product", None, len(level))
        return None

    masks = sorted(range(1, full + 1), key=lambda m: (bin(m).count("1"), m))
    for mask in masks:
        level: dict = {}
        if mask & (mask - 1) == 0:
            i = mask.bit_length() - 1
            level[assign_a[i], assign_b[i]] = hole(i)
        else:
            for symbol, arity in a.alphabet.symbols:
                for parts in _split_positions(mask, arity):
                    pools = [
                        [((q, q), reach[q]) for q in states] if part == 0 else list(items[part].items())
                        for part in parts
                    ]
                    for combo in itertools.product(*pools):
                        left = tuple(c[0][0] for c in combo)
                        right = tuple(c[0][1] for c in combo)
                        key = (delta[symbol, left], delta[symbol, right])
                        if key not in level:
                            level[key] = Tree(symbol, [c[1] for c in combo])
        items[mask] = level
        found = close(mask, level)
        if found is not None:
            return True, found
    return False, None


def _split_positions(mask: int, arity: int):
    """Assignments of disjoint nonempty submasks (at least two) to child slots.

    Unassigned slots get 0.  Every assignment covers ``mask`` exactly.
    """

    def rec(pos, remaining, used):
        if pos == arity:
            if remaining == 0 and used >= 2:
                yield ()
            return
        for rest in rec(pos + 1, remaining, used):
            yield (0,) + rest
        sub = remaining
        while sub:
            for rest in rec(pos + 1, remaining & ~sub, used + 1):
                yield (sub,) + rest
            sub = (sub - 1) & remaining

    return rec(0, mask, 0)
