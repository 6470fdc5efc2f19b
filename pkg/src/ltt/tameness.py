"""Closure of a ranked tree language under the k-guarded operations.

Each check runs on the minimal automaton, where "no outer context tells two
trees apart" is the same as "the trees reach the same state".  The
quantification over trees and contexts then reduces to realized typed
states, context behaviours and multi-hole contexts (see :mod:`ltt.typed`).
"""

from __future__ import annotations

import itertools

from .automata import Dfta, distinguishing_context, minimize, reachable_states, state_witnesses
from .budget import BudgetExceeded, as_budget
from .trees import Op, RANKED_OPS, Tree, apply_guarded, concat
from .typed import (
    TypedStates,
    hole_paths,
    holes_distinguishable,
    iter_behaviors,
    plug_holes,
    realized_typed_states,
)
from .verdicts import ClosureVerdict, OperationWitness, Status, holds, unknown, violated


def _replayed(a: Dfta, op: Op, t, nodes, k) -> OperationWitness:
    result = apply_guarded(op, t, nodes, k, check_guard=True)
    if a.accepts(t) == a.accepts(result):
        raise AssertionError(f"{op} witness does not flip membership")
    return OperationWitness(op, t, tuple(tuple(x) for x in nodes), k, result)


def collision_pairs(m: Dfta, k: int) -> dict:
    """State pairs reached by two trees with the same root k-type.

    Equal (j+1)-types mean equal labels and children with pairwise equal
    j-types, so the pairs are computed level by level over Q x Q.  Maps
    each pair to such a pair of trees.
    """

    def build():
        wit = state_witnesses(m)
        reach = sorted(wit)
        level: dict = {}
        for symbol, arity in m.alphabet.symbols:
            targets: dict = {}
            for args in itertools.product(reach, repeat=arity):
                t = Tree(symbol, [wit[q] for q in args])
                q = m.delta[symbol, args]
                if q not in targets or t.size < targets[q].size:
                    targets[q] = t
            for p, s in targets.items():
                for q, t in targets.items():
                    level.setdefault((p, q), (s, t))
        levels = [level]
        return levels

    levels = m.cached("collisions", build)
    while len(levels) <= k:
        prev = levels[-1]
        pairs = sorted(prev)
        cost = {key: s.size + t.size for key, (s, t) in prev.items()}
        level = {}
        for symbol, arity in m.alphabet.symbols:
            if arity == 0:
                continue
            for args in itertools.product(pairs, repeat=arity):
                key = (m.delta[symbol, tuple(a[0] for a in args)], m.delta[symbol, tuple(a[1] for a in args)])
                size = sum(cost[a] for a in args)
                if key not in level or size < level[key][0]:
                    level[key] = (size, symbol, args)
        for q in reachable_states(m):
            if (q, q) not in level or cost[q, q] < level[q, q][0]:
                level[q, q] = (cost[q, q], None, prev[q, q])
        built = {}
        for key, (size, symbol, args) in level.items():
            if symbol is None:
                built[key] = args
            else:
                built[key] = (
                    Tree(symbol, [prev[a][0] for a in args]),
                    Tree(symbol, [prev[a][1] for a in args]),
                )
        levels.append(built)
    return levels[k]


def _horizontal(op: Op, m: Dfta, k: int):
    """First violating witness of a horizontal operation, or None."""
    pairs = collision_pairs(m, k)
    for q1, q2 in sorted(pairs):
        if q1 == q2 or (op is Op.HSWAP and q2 < q1):
            continue
        s1, s2 = pairs[q1, q2]
        if op is Op.HSWAP:
            found, ctx = holes_distinguishable(m, 2, (q1, q2), (q2, q1))
            fillers = [s1, s2]
        else:
            found, ctx = holes_distinguishable(m, 3, (q1, q1, q2), (q1, q2, q2))
            fillers = [s1, s1, s2]
        if found:
            return _replayed(m, op, plug_holes(ctx, fillers), hole_paths(ctx), k)
    return None


def _vertical(ops, m: Dfta, ts: TypedStates, k: int, budget):
    """Scan context behaviours for a vertical swap or stutter violation.

    Returns ``(witness or None, behaviours seen)``; raises BudgetExceeded.
    """
    loops_at: dict = {}
    seen = 0
    for f in iter_behaviors(m, ts, budget):
        seen += 1
        for i in f.loops():
            tid = ts.type_list[i]
            qs = ts.states_by_type[tid]
            if Op.VSTUTTER in ops:
                for q in qs:
                    once = f.state_map[q]
                    twice = f.state_map[once]
                    if once != twice:
                        return _vertical_witness(m, Op.VSTUTTER, f, f, ts.witnesses[q, tid], twice, once, k), seen
            if Op.VSWAP in ops:
                for g in loops_at.get(i, []) + [f]:
                    for q in qs:
                        fg = f.state_map[g.state_map[q]]
                        gf = g.state_map[f.state_map[q]]
                        if fg != gf:
                            return _vertical_witness(m, Op.VSWAP, f, g, ts.witnesses[q, tid], fg, gf, k), seen
            loops_at.setdefault(i, []).append(f)
    return None, seen


def _vertical_witness(m, op, upper, lower, bottom, p, q, k):
    """Build C·upper·lower·bottom where C separates states p and q."""
    outer = distinguishing_context(m, p, q)
    if outer is None:
        raise AssertionError("minimal automaton has indistinguishable states")
    t = concat(outer, concat(upper.witness, concat(lower.witness, bottom)))
    x = outer.port
    y = x + upper.witness.port
    z = y + lower.witness.port
    return _replayed(m, op, t, (x, y, z), k)


def _typed(m: Dfta, k: int, budget):
    try:
        return realized_typed_states(m, k, budget), None
    except BudgetExceeded as exc:
        return exc.partial, exc


def closed_under_guarded(op, a: Dfta, k: int, budget=None) -> ClosureVerdict:
    """Decide closure under one k-guarded operation."""
    op = Op(op)
    return _check(a, k, budget, [op])


def is_k_tame(a: Dfta, k: int, budget=None) -> ClosureVerdict:
    """Closure under all four k-guarded operations."""
    return _check(a, k, budget, list(RANKED_OPS))


def _check(a: Dfta, k: int, budget, ops) -> ClosureVerdict:
    budget = as_budget(budget)
    m = minimize(a)
    stats = {"k": k, "states": m.n_states}
    for op in ops:
        if op in (Op.HSWAP, Op.HTRANSFER):
            try:
                w = _horizontal(op, m, k)
            except BudgetExceeded:
                return unknown(f"hole product budget exceeded during {op}", **stats)
            if w is not None:
                return violated(w, **stats)
    vertical = [op for op in ops if op in (Op.VSWAP, Op.VSTUTTER)]
    if not vertical:
        return holds(**stats)
    ts, exceeded = _typed(m, k, budget)
    stats["typed_states"] = len(ts)
    if exceeded is not None:
        return unknown("typed-state budget exceeded", **stats)
    try:
        w, seen = _vertical(vertical, m, ts, k, budget)
    except BudgetExceeded as exc:
        return unknown("behaviour budget exceeded", behaviors=exc.explored, **stats)
    stats["behaviors"] = seen
    if w is not None:
        return violated(w, **stats)
    return holds(**stats)


def tameness_bound_k0(a: Dfta) -> int:
    """|A|^3 + 1 for the minimal automaton A."""
    n = minimize(a).n_states
    return n**3 + 1


def is_tame(a: Dfta, budget=None, max_k: int = 3) -> ClosureVerdict:
    """Tameness: Holds at any k (monotone upward), or Violated at k0.

    k = 0..max_k is scanned for an early Holds; a violation there proves
    nothing, so the scan then jumps to k0.
    """
    m = minimize(a)
    k0 = tameness_bound_k0(m)
    tried: dict = {}
    for k in range(0, min(k0, max_k)):
        v = is_k_tame(m, k, budget)
        tried[k] = str(v.status)
        if v.holds:
            return ClosureVerdict(Status.HOLDS, None, {**v.explored, "k0": k0, "tried": tried}, f"tame at k={k}")
        if v.unknown:
            break
    last = is_k_tame(m, k0, budget)
    tried[k0] = str(last.status)
    explored = {**last.explored, "k0": k0, "tried": tried}
    if last.violated:
        return ClosureVerdict(Status.VIOLATED, last.witness, explored, f"not closed at k0={k0}")
    if last.holds:
        return ClosureVerdict(Status.HOLDS, None, explored, f"tame at k0={k0}")
    return ClosureVerdict(Status.UNKNOWN, None, explored, last.note)
