"""Deciding κ-testability and the overall LT question for ranked languages."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .automata import Dfta, dead_states, distinguishing_context, minimize
from .budget import BudgetExceeded, as_budget
from .tameness import is_tame
from .trees import KType, RankedAlphabet, Tree, TypeTable, concat, count_ktypes, equiv_k
from .verdicts import (
    ClosureVerdict,
    LtStatus,
    LtVerdict,
    PairWitness,
    Reason,
    holds,
    unknown,
    violated,
)


@dataclass(frozen=True)
class OccurrenceState:
    """Root κ-type of a tree together with the set of κ-types occurring in it."""

    root_type: KType
    occ: frozenset

    def key(self) -> tuple:
        return (str(self.root_type), tuple(sorted(str(t) for t in self.occ)))


class OccurrenceAutomaton:
    """Lazy bottom-up evaluator computing an :class:`OccurrenceState` per node.

    Internally a state is ``(root type id, frozenset of type ids)`` over a
    shared :class:`TypeTable`; :meth:`describe` turns it into KTypes.
    """

    def __init__(self, alphabet: RankedAlphabet, kappa: int):
        if kappa < 0:
            raise ValueError("kappa must be non-negative")
        self.alphabet = alphabet
        self.kappa = kappa
        self.table = TypeTable()

    def step(self, symbol: str, children) -> tuple:
        root = self.table.node(self.kappa, symbol, [c[0] for c in children])
        occ = frozenset().union(*(c[1] for c in children)) | {root}
        return root, occ

    def run_raw(self, t: Tree) -> tuple:
        return self.step(t.label, [self.run_raw(c) for c in t.children])

    def describe(self, state) -> OccurrenceState:
        root, occ = state
        return OccurrenceState(self.table.ktype(root), frozenset(self.table.ktype(i) for i in occ))

    def run(self, t: Tree) -> OccurrenceState:
        self.alphabet.check(t)
        return self.describe(self.run_raw(t))


def occurrence_automaton(alphabet: RankedAlphabet, kappa: int) -> OccurrenceAutomaton:
    return OccurrenceAutomaton(alphabet, kappa)


class _OccurrenceProduct:
    """Items (state, root κ-type id, occurrence bitmask) with witness trees.

    Items are grouped by (state, (κ-1)-truncated root type), which is all a
    parent looks at besides the masks.  Rounds combine every group tuple
    that passes ``accept_groups`` and holds at least one item from the
    previous round.
    """

    def __init__(self, m: Dfta, kappa: int, budget, on_new):
        self.m = m
        self.kappa = kappa
        self.table = TypeTable()
        self.bit: dict = {}
        self.items: dict = {}
        self.groups: dict = {}
        self.budget = budget
        self.meter = budget.meter()
        self.on_new = on_new
        self.stopped = False

    def type_bit(self, tid: int) -> int:
        b = self.bit.get(tid)
        if b is None:
            b = self.bit[tid] = 1 << len(self.bit)
        return b

    def group_of(self, key) -> tuple:
        q, tid, _ = key
        return (q, self.table.truncate(tid) if self.kappa else None)

    def add(self, key, make_tree, fresh: list):
        if key in self.items:
            return
        self.items[key] = make_tree()
        fresh.append(key)
        if self.meter.over(len(self.items)):
            raise BudgetExceeded("occurrence product", None, len(self.items))
        if self.on_new(key, self.items[key]):
            self.stopped = True

    def run(self, accept_groups, accept_item):
        """Saturate; returns False if ``on_new`` asked to stop."""
        m, kappa, table = self.m, self.kappa, self.table
        fresh: list = []
        for symbol, arity in m.alphabet.symbols:
            if arity == 0:
                tid = table.intern(kappa, symbol)
                key = (m.delta[symbol, ()], tid, self.type_bit(tid))
                if accept_item(key):
                    self.add(key, lambda s=symbol: Tree(s), fresh)
                    if self.stopped:
                        return False
        old: dict = {}
        if not fresh:
            # resuming: everything known so far counts as new
            fresh = list(self.items)
        else:
            for key in self.items:
                if key not in fresh:
                    old.setdefault(self.group_of(key), []).append(key)
        inner = [(s, n) for s, n in m.alphabet.symbols if n > 0]
        while fresh:
            new: dict = {}
            for key in fresh:
                new.setdefault(self.group_of(key), []).append(key)
            every = {g: old.get(g, []) + new.get(g, []) for g in set(old) | set(new)}
            gkeys = sorted(every)
            fresh = []
            for symbol, arity in inner:
                for gs in itertools.product(gkeys, repeat=arity):
                    if not any(g in new for g in gs):
                        continue
                    target = m.delta[symbol, tuple(g[0] for g in gs)]
                    if kappa:
                        root = table.intern(kappa, symbol, tuple(g[1] for g in gs))
                    else:
                        root = table.intern(0, symbol)
                    if not accept_groups(target, root):
                        continue
                    rbit = self.type_bit(root)
                    for i in range(arity):
                        if gs[i] not in new:
                            continue
                        pools = [old.get(g, []) for g in gs[:i]] + [new[gs[i]]] + [every[g] for g in gs[i + 1:]]
                        for args in itertools.product(*pools):
                            occ = rbit
                            for c in args:
                                occ |= c[2]
                            key = (target, root, occ)
                            if key in self.items or not accept_item(key):
                                continue
                            self.add(key, lambda s=symbol, a=args: Tree(s, [self.items[c] for c in a]), fresh)
                            if self.stopped:
                                return False
            for g, keys in new.items():
                old.setdefault(g, []).extend(keys)
        return True


def is_kappa_testable(a: Dfta, kappa: int, budget=None) -> ClosureVerdict:
    """Is the language a union of ≅κ classes?

    Explores the reachable part of the product of the minimal automaton with
    the occurrence evaluator.  Because ≅κ is a congruence for plugging into
    contexts, two items with equal occurrence data and different (minimal)
    states already refute testability: a context separating the two states
    turns them into an accepted and a rejected tree with equal data.

    Items in live states are explored first.  All dead states of a minimal
    automaton coincide, so a remaining conflict pairs a live item with a
    dead tree.  Its subtrees only carry types and occurrence sets found in
    that live item, which bounds the second, dead-state pass.
    """
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    budget = as_budget(budget)
    m = minimize(a)
    dead = dead_states(m)
    first: dict = {}
    clash: list = []

    def on_new(key, t):
        q, root, occ = key
        other = first.setdefault((root, occ), (q, t))
        if other[0] != q:
            clash.append((other[1], t))
            return True
        return False

    prod = _OccurrenceProduct(m, kappa, budget, on_new)
    try:
        done = prod.run(lambda q, root: q not in dead, lambda key: key[0] not in dead)
        if done and dead:
            within: dict = {}
            for _, _, occ in list(prod.items):
                rest = occ
                while rest:
                    low = rest & -rest
                    within[low] = within.get(low, 0) | occ
                    rest ^= low
            bit = prod.bit

            def groups_ok(q, root):
                return q in dead and bit.get(root, 0) in within

            def item_ok(key):
                b = bit[key[1]]
                return key[0] not in dead or not key[2] & ~within.get(b, 0)

            prod.run(groups_ok, item_ok)
    except BudgetExceeded as exc:
        return unknown("occurrence product budget exceeded", kappa=kappa, items=exc.explored)
    stats = {"kappa": kappa, "items": len(prod.items), "occurrence_states": len(first)}
    if not clash:
        return holds(**stats)
    t1, t2 = clash[0]
    outer = distinguishing_context(m, m.run(t1), m.run(t2))
    left, right = concat(outer, t1), concat(outer, t2)
    if m.accepts(right) and not m.accepts(left):
        left, right = right, left
    if not equiv_k(left, right, kappa) or m.accepts(left) == m.accepts(right):
        raise AssertionError("testability witness does not replay")
    return violated(PairWitness(left, right, kappa), **stats)


def kappa_bound(a: Dfta, k: int) -> int:
    """β_k + k + 1, with β_k the number of k-types over the alphabet."""
    return count_ktypes(a.alphabet, k) + k + 1


def decide_lt(a: Dfta, max_kappa: int = 3, budget=None, max_k: int = 3) -> LtVerdict:
    """Decide membership in LT, honestly reporting Unknown.

    Tameness is settled first: a violation at k0 is a definitive NotLT.  If
    the language is tame at k, κ-testability is scanned from 0 upwards; a
    violation at the bound κ* = β_k + k + 1 is a definitive NotLT.  Any κ
    found testable gives LT, even when tameness itself was inconclusive.
    """
    m = minimize(a)
    tame = is_tame(m, budget, max_k=max_k)
    details: dict = {"states": m.n_states, "k0": tame.explored.get("k0"), "tame": str(tame.status)}
    if tame.violated:
        details["k"] = tame.explored.get("k")
        return LtVerdict(LtStatus.NOT_LT, Reason.NOT_TAME, None, None, details, tame.witness)
    top = max_kappa
    if tame.holds:
        k = tame.explored["k"]
        bound = kappa_bound(m, k)
        details.update(k=k, kappa_bound=bound)
        top = min(max_kappa, bound)
    scanned: dict = {}
    details["scanned"] = scanned
    last = None
    for kappa in range(0, top + 1):
        v = is_kappa_testable(m, kappa, budget)
        scanned[kappa] = str(v.status)
        last = v
        if v.holds:
            return LtVerdict(LtStatus.LT, Reason.TESTABLE_AT, kappa, None, details)
    if tame.holds and top == details["kappa_bound"] and last is not None and last.violated:
        return LtVerdict(LtStatus.NOT_LT, Reason.BOUND_CHECK_FAILED, top, None, details, last.witness)
    details["budget_note"] = tame.note if tame.unknown else "kappa bound beyond max_kappa or budget"
    return LtVerdict(LtStatus.UNKNOWN, Reason.BUDGET_EXCEEDED, None, None, details)
