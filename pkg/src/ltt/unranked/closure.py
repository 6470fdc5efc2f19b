"""Closure of unordered tree languages under the guarded operations.

Checks run on the minimal counting automaton.  Three kinds of evidence:

* (k,l)-typed states and typed context behaviours give exact answers for
  the (k,l)-guarded operations at small k;
* pairs of trees with equal exact k-types give exact horizontal checks at
  any k, including the tameness bound;
* idempotent context behaviours give pumped vertical witnesses, valid at
  any k because ``U^(k+1)`` hides everything below it from the k-type.
"""

from __future__ import annotations

import itertools

from ..budget import BudgetExceeded, as_budget
from ..verdicts import ClosureVerdict, OperationWitness, Status, holds, unknown, violated
from .automata import (
    CountingDfta,
    cap_add,
    children_for,
    distinguishing_context,
    minimize_counting,
    realized_profiles,
    state_witnesses,
)
from .trees import PORT, TAMENESS_OPS, KLTable, UOp, UTree, apply_unranked, port_path


# -- building witnesses -----------------------------------------------------


def plug_at(c: UTree, u: UTree) -> tuple:
    """Plug ``u`` into the port of ``c``; also return where ``u`` ended up."""

    def rec(node, rest):
        if not rest:
            return u, ()
        i = rest[0]
        new_child, sub = rec(node.children[i], rest[1:])
        kids = list(node.children)
        kids[i] = new_child
        out = UTree(node.label, kids)
        j = next(j for j, ch in enumerate(out.children) if ch == new_child)
        return out, (j,) + sub

    return rec(c, port_path(c))


def stack(contexts, bottom: UTree) -> tuple:
    """``contexts[0]·...·contexts[-1]·bottom`` and the root path of every piece."""
    cur, marks = bottom, [()]
    for c in reversed(contexts):
        cur, p = plug_at(c, cur)
        marks = [p + mk for mk in marks] + [()]
    return cur, list(reversed(marks))


def power(c: UTree, n: int) -> UTree:
    out = c
    for _ in range(n - 1):
        out = plug_at(out, c)[0]
    return out


def _replayed(m: CountingDfta, op, t, nodes, k, l) -> OperationWitness:
    result = apply_unranked(op, t, nodes, k, l, check_guard=True)
    if m.accepts(t) == m.accepts(result):
        raise AssertionError(f"{op} witness does not flip membership")
    return OperationWitness(str(op), t, tuple(tuple(x) for x in nodes), k if l is None else (k, l), result)


def _separate(m: CountingDfta, p: int, q: int) -> UTree:
    outer = distinguishing_context(m, p, q)
    if outer is None:
        raise AssertionError("minimal automaton has indistinguishable states")
    return outer


# -- horizontal stutter -----------------------------------------------------


def hstutter_check(a: CountingDfta) -> ClosureVerdict:
    """δ(σ, γ) = δ(σ, γ + q) for every realized γ with γ(q) ≥ 1."""
    m = minimize_counting(a)
    checked = 0
    for symbol in m.symbols:
        for prof in realized_profiles(m):
            for q, c in enumerate(prof):
                if c == 0 or c == m.m:
                    continue
                checked += 1
                p1 = m.delta[symbol, prof]
                p2 = m.delta[symbol, cap_add(prof, q, m.m)]
                if p1 == p2:
                    continue
                kids = children_for(m, prof)
                node = UTree(symbol, kids)
                t, marks = stack([_separate(m, p1, p2)], node)
                j = next(i for i, ch in enumerate(node.children) if ch == state_witnesses(m)[q])
                return violated(_replayed(m, UOp.HSTUTTER, t, [marks[1] + (j,)], 0, None), profiles=checked)
    return holds(profiles=checked)


# -- context semigroup and pumped vertical witnesses --------------------------


def context_semigroup(m: CountingDfta) -> dict:
    """Behaviours of nonempty one-port contexts, each with a small context."""

    def build():
        n = m.n_states
        gens = {}
        for symbol in m.symbols:
            for prof in realized_profiles(m):
                f = tuple(m.delta[symbol, cap_add(prof, q, m.m)] for q in range(n))
                ctx = UTree(symbol, children_for(m, prof) + [PORT])
                if f not in gens or ctx.size < gens[f].size:
                    gens[f] = ctx
        elems = dict(gens)
        queue = list(elems)
        while queue:
            f = queue.pop(0)
            for g, cg in gens.items():
                h = tuple(f[g[q]] for q in range(n))
                if h not in elems:
                    elems[h] = plug_at(elems[f], cg)[0]
                    queue.append(h)
        return elems

    return m.cached("context_semigroup", build)


def _compose(*fs):
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = tuple(f[q] for q in out)
    return out


def pumped_vertical(m: CountingDfta, k: int, ops=(UOp.VSTUTTER, UOp.VSWAP)):
    """A k-guarded vertical violation of the form D·(U^N X)·(U^N Y)·U^N·s, or None.

    ``U`` has an idempotent behaviour e and N = k+1, so the nodes x, y, z
    all have the exact k-type of U^N's root.  The violations are those of
    exe = exexe (stutter) and exeye = eyexe (swap).
    """
    sg = context_semigroup(m)
    elems = sorted(sg)
    wit = state_witnesses(m)
    for e in elems:
        if _compose(e, e) != e:
            continue
        block = power(sg[e], k + 1)
        for x in elems:
            exe = _compose(e, x, e)
            if UOp.VSTUTTER in ops:
                twice = _compose(exe, x, e)
                for q in range(m.n_states):
                    if exe[q] != twice[q]:
                        c = plug_at(block, sg[x])[0]
                        s = plug_at(block, wit[q])[0]
                        t, marks = stack([_separate(m, twice[q], exe[q]), c, c], s)
                        return _replayed(m, UOp.VSTUTTER, t, marks[1:], k, None)
            if UOp.VSWAP not in ops:
                continue
            for y in elems:
                left = _compose(exe, y, e)
                right = _compose(e, y, exe)
                for q in range(m.n_states):
                    if left[q] != right[q]:
                        c1 = plug_at(block, sg[x])[0]
                        c2 = plug_at(block, sg[y])[0]
                        s = plug_at(block, wit[q])[0]
                        t, marks = stack([_separate(m, left[q], right[q]), c1, c2], s)
                        return _replayed(m, UOp.VSWAP, t, marks[1:], k, None)
    return None


# -- multi-hole contexts ------------------------------------------------------


def hole(i: int) -> UTree:
    return UTree(f"_{i}")


def fill_holes(t: UTree, fillers) -> UTree:
    if t.label.startswith("_") and t.label[1:].isdigit():
        return fillers[int(t.label[1:])]
    if not t.children:
        return t
    return UTree(t.label, [fill_holes(c, fillers) for c in t.children])


def hole_paths(t: UTree, fillers) -> list:
    """Paths of the holes of ``t`` after filling, in hole order."""
    n = len(fillers)
    marked = fill_holes(t, [UTree(f"_{i}") for i in range(n)])
    filled = fill_holes(t, fillers)
    paths = [None] * n

    def rec(node_m, node_f, path):
        if node_m.label.startswith("_") and node_m.label[1:].isdigit():
            paths[int(node_m.label[1:])] = path
            return
        # match children of the marked tree to the filled tree's order
        used = set()
        for cm in node_m.children:
            cf = fill_holes(cm, fillers)
            j = next(j for j, ch in enumerate(node_f.children) if ch == cf and j not in used)
            used.add(j)
            rec(cm, node_f.children[j], path + (j,))

    rec(marked, filled, ())
    return paths


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def holes_distinguishable(m: CountingDfta, assign_a, assign_b, budget=None):
    """A context with pairwise unrelated holes telling two assignments apart.

    Items are state pairs per set of holes, combined at their lowest common
    ancestor.  Returns the hole tree and the two root states, or None.
    """
    n = len(assign_a)
    budget = as_budget(budget)
    meter = budget.meter()
    profs = list(realized_profiles(m))
    items: dict = {}
    full = (1 << n) - 1
    count = 0
    for mask in sorted(range(1, full + 1), key=lambda x: (bin(x).count("1"), x)):
        level: dict = {}
        members = [i for i in range(n) if mask >> i & 1]
        if len(members) == 1:
            i = members[0]
            level[assign_a[i], assign_b[i]] = hole(i)
        else:
            for part in _set_partitions(members):
                if len(part) < 2:
                    continue
                masks = [sum(1 << i for i in block) for block in part]
                if any(not items.get(b) for b in masks):
                    continue
                for choice in itertools.product(*(sorted(items[b].items()) for b in masks)):
                    for symbol in m.symbols:
                        for prof in profs:
                            pa, pb = prof, prof
                            for (qa, qb), _ in choice:
                                pa = cap_add(pa, qa, m.m)
                                pb = cap_add(pb, qb, m.m)
                            key = (m.delta[symbol, pa], m.delta[symbol, pb])
                            if key not in level:
                                level[key] = UTree(symbol, children_for(m, prof) + [t for _, t in choice])
        queue = list(level)
        while queue:
            qa, qb = queue.pop()
            for symbol in m.symbols:
                for prof in profs:
                    key = (m.delta[symbol, cap_add(prof, qa, m.m)], m.delta[symbol, cap_add(prof, qb, m.m)])
                    if key not in level:
                        level[key] = UTree(symbol, children_for(m, prof) + [level[qa, qb]])
                        queue.append(key)
                        count += 1
                        if meter.over(count):
                            raise BudgetExceeded("hole contexts", None, count)
        items[mask] = level
    for (qa, qb), t in sorted(items[full].items()):
        if qa != qb:
            return t, qa, qb
    return None


def _horizontal_witness(m, op, q1, q2, s1, s2, k, l, budget):
    if op is UOp.HSWAP:
        found = holes_distinguishable(m, (q1, q2), (q2, q1), budget)
        fillers = [s1, s2]
    else:
        found = holes_distinguishable(m, (q1, q1, q2), (q1, q2, q2), budget)
        fillers = [s1, s1, s2]
    if found is None:
        return None
    ctx, pa, pb = found
    inner = fill_holes(ctx, fillers)
    t, marks = stack([_separate(m, pa, pb)], inner)
    nodes = [marks[1] + p for p in hole_paths(ctx, fillers)]
    return _replayed(m, op, t, nodes, k, l)


# -- exact k-type collisions -------------------------------------------------


def _level0(m: CountingDfta) -> dict:
    """Smallest tree per (label, state): the trees with a given 0-type."""
    wit = state_witnesses(m)
    best: dict = {}
    for symbol in m.symbols:
        for prof in realized_profiles(m):
            q = m.delta[symbol, prof]
            t = UTree(symbol, [wit[p] for p, c in enumerate(prof) for _ in range(c)])
            if (symbol, q) not in best or t.size < best[symbol, q].size:
                best[symbol, q] = t
    return best


def _next_collisions(m: CountingDfta, pairs: frozenset) -> dict:
    """One level up: label plus a multiset of lower pairs -> recipes per pair."""
    order = sorted(pairs)
    out: dict = {}
    for symbol in m.symbols:
        for counts in itertools.product(range(m.m + 1), repeat=len(order)):
            pa, pb = m.zero(), m.zero()
            for (p, q), c in zip(order, counts):
                if c:
                    pa = cap_add(pa, p, m.m, c)
                    pb = cap_add(pb, q, m.m, c)
            key = (m.delta[symbol, pa], m.delta[symbol, pb])
            out.setdefault(key, []).append((symbol, counts))
    # drop recipes that use more of every pair than another recipe
    for key, recipes in out.items():
        keep = []
        for r in sorted(recipes, key=lambda r: sum(r[1])):
            if not any(s[0] == r[0] and all(x <= y for x, y in zip(s[1], r[1])) for s in keep):
                keep.append(r)
        out[key] = keep
    return out


def collision_sets(m: CountingDfta, k: int) -> frozenset:
    """State pairs of two trees with the same exact k-type (cycle-aware)."""

    def base():
        best = _level0(m)
        pairs = set()
        for (s1, p), _ in best.items():
            for (s2, q), _ in best.items():
                if s1 == s2:
                    pairs.add((p, q))
        return {"levels": [frozenset(pairs)], "step": {}}

    memo = m.cached("exact_collisions", base)
    levels, step = memo["levels"], memo["step"]
    while len(levels) <= k:
        cur = levels[-1]
        if cur not in step:
            step[cur] = _next_collisions(m, cur)
        nxt = frozenset(step[cur])
        if nxt in levels:
            start = levels.index(nxt)
            period = len(levels) - start
            return levels[start + (k - start) % period]
        levels.append(nxt)
    return levels[k]


def collision_trees(m: CountingDfta, k: int, want) -> tuple:
    """Two trees with the same exact k-type reaching the states in ``want``."""
    best = _level0(m)
    trees: dict = {}
    for (s1, p), t1 in best.items():
        for (s2, q), t2 in best.items():
            if s1 == s2 and ((p, q) not in trees or t1.size + t2.size < sum(x.size for x in trees[p, q])):
                trees[p, q] = (t1, t2)
    step = m.cached("exact_collisions", lambda: None)["step"]
    for _ in range(k):
        cur = frozenset(trees)
        if cur not in step:
            step[cur] = _next_collisions(m, cur)
        order = sorted(cur)
        cost = {pq: trees[pq][0].size + trees[pq][1].size for pq in order}
        nxt = {}
        for key, recipes in step[cur].items():
            symbol, counts = min(recipes, key=lambda r: sum(c * cost[pq] for pq, c in zip(order, r[1])))
            left, right = [], []
            for pq, c in zip(order, counts):
                left.extend([trees[pq][0]] * c)
                right.extend([trees[pq][1]] * c)
            nxt[key] = (UTree(symbol, left), UTree(symbol, right))
        trees = nxt
    return trees[want]


def exact_horizontal(m: CountingDfta, k: int, ops=(UOp.HSWAP, UOp.HTRANSFER), budget=None):
    """Horizontal ops guarded by exact k-types; a witness or None."""
    pairs = collision_sets(m, k)
    for op in ops:
        for q1, q2 in sorted(pairs):
            if q1 == q2 or (op is UOp.HSWAP and q2 < q1):
                continue
            if op is UOp.HSWAP:
                found = holes_distinguishable(m, (q1, q2), (q2, q1), budget)
            else:
                found = holes_distinguishable(m, (q1, q1, q2), (q1, q2, q2), budget)
            if found is None:
                continue
            s1, s2 = collision_trees(m, k, (q1, q2))
            return _horizontal_witness(m, op, q1, q2, s1, s2, k, None, budget)
    return None


def ktame_violation(a: CountingDfta, k: int, budget=None) -> ClosureVerdict:
    """Look for a violation guarded by exact k-types.

    Horizontal operations are checked exactly; vertical ones only through
    pumped witnesses, so the absence of a witness is reported as Unknown.
    """
    m = minimize_counting(a)
    stats = {"k": k, "states": m.n_states}
    try:
        w = exact_horizontal(m, k, budget=budget)
    except BudgetExceeded:
        return unknown("hole context budget exceeded", **stats)
    if w is None:
        w = pumped_vertical(m, k)
    if w is not None:
        return violated(w, **stats)
    return unknown("no exact violation found; vertical closure only checked on pumped contexts", **stats)


# -- (k,l)-typed states and behaviours ---------------------------------------


class KLTyped:
    """Realized (state, (k,l)-type) pairs with witnesses, plus child effects.

    An effect is what a multiset of children contributes to its parent:
    the state profile and the counts of the children's (k-1,l)-types.
    """

    def __init__(self, m: CountingDfta, k: int, l: int, budget):
        self.m, self.k, self.l = m, k, l
        self.table = KLTable(l)
        self.budget = as_budget(budget)
        self.meter = self.budget.meter()
        self.full: dict = {}
        self.projected: dict = {}
        self.effects: dict = {(m.zero(), ()): ()}
        self._saturate()
        self.states_of: dict = {}
        for q, tid in self.full:
            self.states_of.setdefault(tid, set()).add(q)

    def _grow(self, eff, key):
        prof, counts = eff
        q, ptid = key
        prof = cap_add(prof, q, self.m.m)
        if self.k:
            d = dict(counts)
            d[ptid] = min(self.l, d.get(ptid, 0) + 1)
            counts = tuple(sorted(d.items()))
        return prof, counts

    def root_type(self, symbol, counts) -> int:
        if self.k == 0:
            return self.table.intern(0, symbol)
        return self.table.from_counts(self.k, symbol, dict(counts))

    def project(self, tid) -> object:
        return self.table.truncate(tid) if self.k else None

    def _saturate(self):
        m = self.m
        fresh_eff = list(self.effects)
        done_keys: list = []
        while fresh_eff:
            # new nodes from new effects
            new_keys = []
            for eff in fresh_eff:
                kids = self.effects[eff]
                for symbol in m.symbols:
                    prof, counts = eff
                    q = m.delta[symbol, prof]
                    tid = self.root_type(symbol, counts)
                    if (q, tid) not in self.full:
                        self.full[q, tid] = UTree(symbol, kids)
                    key = (q, self.project(tid))
                    if key not in self.projected:
                        self.projected[key] = self.full[q, tid]
                        new_keys.append(key)
            # close effects under the known keys
            queue = [(e, kk) for e in fresh_eff for kk in done_keys] + [
                (e, kk) for e in self.effects for kk in new_keys
            ]
            done_keys.extend(new_keys)
            fresh_eff = []
            while queue:
                eff, key = queue.pop()
                nxt = self._grow(eff, key)
                if nxt in self.effects:
                    continue
                self.effects[nxt] = self.effects[eff] + (self.projected[key],)
                fresh_eff.append(nxt)
                if self.meter.over(len(self.effects) + len(self.full)):
                    raise BudgetExceeded("typed states", None, len(self.effects))
                queue.extend((nxt, kk) for kk in done_keys)


def _kl_horizontal(ts: KLTyped, ops, budget):
    m = ts.m
    for op in ops:
        seen = set()
        for tid in sorted(ts.states_of):
            qs = sorted(ts.states_of[tid])
            for q1, q2 in itertools.permutations(qs, 2):
                if (op is UOp.HSWAP and q2 < q1) or (q1, q2) in seen:
                    continue
                seen.add((q1, q2))
                w = _horizontal_witness(m, op, q1, q2, ts.full[q1, tid], ts.full[q2, tid], ts.k, ts.l, budget)
                if w is not None:
                    return w
    return None


def _kl_vertical(ts: KLTyped, ops, budget):
    """Typed behaviours (port type, root type, state map) with contexts."""
    m, k, table = ts.m, ts.k, ts.table
    meter = as_budget(budget).meter()
    ident = tuple(range(m.n_states))
    items: dict = {}
    queue = []
    for tid in sorted(ts.states_of):
        items[tid, tid, ident] = PORT
        queue.append((tid, tid, ident))
    loops: dict = {}
    wit = ts.full
    while queue:
        tp, tr, f = queue.pop(0)
        ctx = items[tp, tr, f]
        for eff, kids in ts.effects.items():
            prof, counts = eff
            if k:
                d = dict(counts)
                trunc = table.truncate(tr)
                d[trunc] = min(ts.l, d.get(trunc, 0) + 1)
            for symbol in m.symbols:
                tr2 = table.intern(0, symbol) if k == 0 else table.from_counts(k, symbol, d)
                f2 = tuple(m.delta[symbol, cap_add(prof, f[q], m.m)] for q in range(m.n_states))
                key = (tp, tr2, f2)
                if key in items:
                    continue
                items[key] = plug_at(UTree(symbol, list(kids) + [PORT]), ctx)[0]
                queue.append(key)
                if meter.over(len(items)):
                    raise BudgetExceeded("typed behaviours", None, len(items))
                if tr2 != tp:
                    continue
                qs = sorted(ts.states_of[tp])
                c = items[key]
                if UOp.VSTUTTER in ops:
                    for q in qs:
                        if f2[f2[q]] != f2[q]:
                            t, marks = stack([_separate(m, f2[f2[q]], f2[q]), c, c], wit[q, tp])
                            return _replayed(m, UOp.VSTUTTER, t, marks[1:], k, ts.l)
                if UOp.VSWAP in ops:
                    for g in loops.get(tp, []):
                        for q in qs:
                            fg = f2[g[0][q]]
                            gf = g[0][f2[q]]
                            if fg != gf:
                                t, marks = stack([_separate(m, fg, gf), c, g[1]], wit[q, tp])
                                return _replayed(m, UOp.VSWAP, t, marks[1:], k, ts.l)
                loops.setdefault(tp, []).append((f2, c))
    return None


def closed_under_kl_guarded(op, a: CountingDfta, k: int, l: int, budget=None) -> ClosureVerdict:
    """Closure under one (k,l)-guarded operation; HStutter ignores k and l."""
    op = UOp(op)
    if op is UOp.HSTUTTER:
        return hstutter_check(a)
    if l < 1:
        raise ValueError("l must be at least 1")
    return _kl_check(minimize_counting(a), k, l, [op], budget)


def is_kl_tame(a: CountingDfta, k: int, l: int, budget=None) -> ClosureVerdict:
    m = minimize_counting(a)
    if l <= m.m:
        raise ValueError(f"(k,l)-tameness needs l > m = {m.m}")
    return _kl_check(m, k, l, list(TAMENESS_OPS), budget)


def _kl_check(m: CountingDfta, k: int, l: int, ops, budget) -> ClosureVerdict:
    budget = as_budget(budget)
    stats = {"k": k, "l": l, "states": m.n_states}
    try:
        ts = KLTyped(m, k, l, budget)
    except BudgetExceeded as exc:
        return unknown("typed-state budget exceeded", explored_items=exc.explored, **stats)
    stats["typed_states"] = len(ts.full)
    try:
        w = _kl_horizontal(ts, [op for op in ops if op in (UOp.HSWAP, UOp.HTRANSFER)], budget)
        if w is None and any(op in (UOp.VSWAP, UOp.VSTUTTER) for op in ops):
            w = _kl_vertical(ts, ops, budget)
    except BudgetExceeded as exc:
        return unknown(f"{exc.what} budget exceeded", **stats)
    if w is not None:
        return violated(w, **stats)
    return holds(**stats)


def tameness_bound_k0(a: CountingDfta) -> int:
    return minimize_counting(a).n_states ** 3 + 1


def l_ladder(a: CountingDfta) -> list:
    """Candidate l values: m + 1 and m·|A| + 1."""
    m = minimize_counting(a)
    return sorted({m.m + 1, m.m * m.n_states + 1})


def is_tame_unranked(a: CountingDfta, budget=None, max_k: int = 1) -> ClosureVerdict:
    """Holds at the first (k,l) on the ladder that certifies; Violated only with an exact k0 witness."""
    m = minimize_counting(a)
    k0 = tameness_bound_k0(m)
    tried: dict = {}
    for l in l_ladder(m):
        for k in range(0, min(max_k, k0) + 1):
            v = is_kl_tame(m, k, l, budget)
            tried[f"{k},{l}"] = str(v.status)
            if v.holds:
                return ClosureVerdict(Status.HOLDS, None, {**v.explored, "k0": k0, "tried": tried}, f"tame at (k,l)=({k},{l})")
            if v.unknown:
                break
    last = ktame_violation(m, k0, budget)
    tried[f"{k0},exact"] = str(last.status)
    explored = {**last.explored, "k0": k0, "tried": tried}
    if last.violated:
        return ClosureVerdict(Status.VIOLATED, last.witness, explored, f"not closed at k0={k0}")
    return ClosureVerdict(Status.UNKNOWN, None, explored, last.note)

