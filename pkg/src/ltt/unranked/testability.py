"""(κ,λ)-testability and the ILT / ALT decisions for unordered trees."""

from __future__ import annotations

import itertools

from ..budget import BudgetExceeded, as_budget
from ..verdicts import ClosureVerdict, LtStatus, LtVerdict, PairWitness, Reason, holds, unknown, violated
from .automata import CountingDfta, cap_add, distinguishing_context, minimize_counting
from .closure import KLTyped, hstutter_check, is_kl_tame, ktame_violation, l_ladder, plug_at, tameness_bound_k0
from .trees import KLTable, UTree, count_kl_types, equiv_kl


class _Product:
    """Items (state, root (κ,λ)-type id, occurrence bitmask) with witness trees.

    A partial parent is the effect of a multiset of children: state profile,
    counts of the children's truncated root types, and the union of their
    occurrence sets.  It does not depend on the parent's label.
    """

    def __init__(self, m: CountingDfta, kappa: int, lam: int, budget, on_new):
        self.m, self.kappa, self.lam = m, kappa, lam
        self.table = KLTable(lam)
        self.bit: dict = {}
        self.items: dict = {}
        self.partials: dict = {}
        self.meter = as_budget(budget).meter()
        self.on_new = on_new

    def type_bit(self, tid: int) -> int:
        b = self.bit.get(tid)
        if b is None:
            b = self.bit[tid] = 1 << len(self.bit)
        return b

    def _complete(self, partial, kids):
        """Parent items of a partial; True if ``on_new`` asked to stop."""
        prof, counts, occ = partial
        m, table = self.m, self.table
        new = []
        for symbol in m.symbols:
            if self.kappa == 0:
                root = table.intern(0, symbol)
            else:
                root = table.from_counts(self.kappa, symbol, dict(counts))
            key = (m.delta[symbol, prof], root, occ | self.type_bit(root))
            if key in self.items:
                continue
            self.items[key] = UTree(symbol, kids)
            new.append(key)
            if self.on_new(key, self.items[key]):
                return True, new
        return False, new

    def _extend(self, partial, item):
        prof, counts, occ = partial
        q, root, iocc = item
        prof = cap_add(prof, q, self.m.m)
        if self.kappa:
            d = dict(counts)
            t = self.table.truncate(root)
            d[t] = min(self.lam, d.get(t, 0) + 1)
            counts = tuple(sorted(d.items()))
        return prof, counts, occ | iocc

    def run(self) -> bool:
        """Saturate; False if stopped early by ``on_new``."""
        zero = (self.m.zero(), (), 0)
        self.partials[zero] = ()
        stop, fresh_items = self._complete(zero, ())
        if stop:
            return False
        fresh_partials = [zero]
        known_items: list = []
        work = 0
        limit = 20 * self.meter.budget.items
        while fresh_partials or fresh_items:
            skip = set(fresh_partials)
            old_partials = [p for p in self.partials if p not in skip]
            new_items = list(fresh_items)
            known_items.extend(new_items)
            every = list(known_items)
            pairs = itertools.chain(
                itertools.product(old_partials, new_items),
                itertools.product(list(fresh_partials), every),
            )
            fresh_items, fresh_partials = [], []
            for p, i in pairs:
                work += 1
                if work > limit:
                    raise BudgetExceeded("occurrence product", None, len(self.partials) + len(self.items))
                nxt = self._extend(p, i)
                if nxt in self.partials:
                    continue
                kids = self.partials[p] + (self.items[i],)
                self.partials[nxt] = kids
                fresh_partials.append(nxt)
                if self.meter.over(len(self.partials) + len(self.items)):
                    raise BudgetExceeded("occurrence product", None, len(self.partials) + len(self.items))
                stop, new = self._complete(nxt, kids)
                fresh_items.extend(new)
                if stop:
                    return False
        return True


def is_kl_testable(a: CountingDfta, kappa: int, lam: int, budget=None) -> ClosureVerdict:
    """Is the language a union of (κ,λ)-equivalence classes?

    (κ,λ)-equivalence is preserved by plugging into contexts, so two trees
    with equal root type and occurrence set but different minimal states
    already refute testability.
    """
    if kappa < 0 or lam < 1:
        raise ValueError("need kappa >= 0 and lambda >= 1")
    m = minimize_counting(a)
    try:
        typed = KLTyped(m, kappa, lam, budget)
        if all(len(qs) == 1 for qs in typed.states_of.values()):
            return holds(kappa=kappa, lam=lam, typed_states=len(typed.full), shortcut="root type determines the state")
    except BudgetExceeded:
        pass
    first: dict = {}
    clash: list = []

    def on_new(key, t):
        q, root, occ = key
        other = first.setdefault((root, occ), (q, t))
        if other[0] != q:
            clash.append((other[1], t))
            return True
        return False

    prod = _Product(m, kappa, lam, budget, on_new)
    try:
        prod.run()
    except BudgetExceeded as exc:
        return unknown("occurrence product budget exceeded", kappa=kappa, lam=lam, items=exc.explored)
    stats = {"kappa": kappa, "lam": lam, "items": len(prod.items), "occurrence_states": len(first)}
    if not clash:
        return holds(**stats)
    t1, t2 = clash[0]
    outer = distinguishing_context(m, m.run(t1), m.run(t2))
    left, right = plug_at(outer, t1)[0], plug_at(outer, t2)[0]
    if m.accepts(right) and not m.accepts(left):
        left, right = right, left
    if not equiv_kl(left, right, kappa, lam) or m.accepts(left) == m.accepts(right):
        raise AssertionError("testability witness does not replay")
    return violated(PairWitness(left, right, (kappa, lam)), **stats)


def decide_ilt(a: CountingDfta, budget=None, max_kappa: int = 2, max_k: int = 1) -> LtVerdict:
    """ILT = tame and closed under horizontal stutter.

    Stutter is decided exactly.  A tameness violation is only reported with
    a witness guarded by exact k0-types.  Tameness at some (k,l) together
    with stutter closure gives (k+1,1)-testability; a (κ,1) scan can also
    certify ILT directly.
    """
    m = minimize_counting(a)
    details: dict = {"states": m.n_states, "m": m.m, "k0": tameness_bound_k0(m)}
    stutter = hstutter_check(m)
    details["hstutter"] = str(stutter.status)
    if stutter.violated:
        return LtVerdict(LtStatus.NOT_LT, Reason.NOT_STUTTER_CLOSED, None, 1, details, stutter.witness)
    bad = ktame_violation(m, details["k0"], budget)
    details["k0_check"] = str(bad.status)
    if bad.violated:
        return LtVerdict(LtStatus.NOT_LT, Reason.NOT_TAME, None, 1, details, bad.witness)
    tame: dict = {}
    details["tame"] = tame
    for l in l_ladder(m):
        for k in range(0, max_k + 1):
            v = is_kl_tame(m, k, l, budget)
            tame[f"{k},{l}"] = str(v.status)
            if v.holds:
                details["certified_by"] = f"({k},{l})-tame and stutter closed"
                return LtVerdict(LtStatus.LT, Reason.TESTABLE_AT, k + 1, 1, details)
            if v.unknown:
                break
    scanned: dict = {}
    details["scanned"] = scanned
    for kappa in range(0, max_kappa + 1):
        v = is_kl_testable(m, kappa, 1, budget)
        scanned[kappa] = str(v.status)
        if v.holds:
            return LtVerdict(LtStatus.LT, Reason.TESTABLE_AT, kappa, 1, details)
    return LtVerdict(LtStatus.UNKNOWN, Reason.BUDGET_EXCEEDED, None, None, details)


def decide_alt(a: CountingDfta, max_kappa: int = 2, max_lambda: int = 3, budget=None, max_k: int = 1) -> LtVerdict:
    """ALT: scan (κ,λ); not ALT through an exact tameness violation or the bound check.

    The bound path needs tameness at (k,l) and then λ* = |A|·l + 1 and
    κ* = β_{k,l} + k + 1 within the limits, which is rarely the case.
    """
    m = minimize_counting(a)
    details: dict = {"states": m.n_states, "m": m.m, "k0": tameness_bound_k0(m)}
    bad = ktame_violation(m, details["k0"], budget)
    details["k0_check"] = str(bad.status)
    if bad.violated:
        return LtVerdict(LtStatus.NOT_LT, Reason.NOT_TAME, None, None, details, bad.witness)
    scanned: dict = {}
    details["scanned"] = scanned
    results: dict = {}
    for kappa in range(0, max_kappa + 1):
        for lam in range(1, max_lambda + 1):
            v = is_kl_testable(m, kappa, lam, budget)
            scanned[f"{kappa},{lam}"] = str(v.status)
            results[kappa, lam] = v
            if v.holds:
                return LtVerdict(LtStatus.LT, Reason.TESTABLE_AT, kappa, lam, details)
    for l in l_ladder(m):
        for k in range(0, max_k + 1):
            v = is_kl_tame(m, k, l, budget)
            if v.unknown:
                break
            if not v.holds:
                continue
            if hstutter_check(m).holds:
                details["certified_by"] = f"({k},{l})-tame and stutter closed"
                return LtVerdict(LtStatus.LT, Reason.TESTABLE_AT, k + 1, 1, details)
            lam_star = m.n_states * l + 1
            kappa_star = count_kl_types(len(m.symbols), k, l) + k + 1
            details.update(k=k, l=l, lambda_bound=lam_star, kappa_bound=kappa_star)
            if kappa_star <= max_kappa and lam_star <= max_lambda and results[kappa_star, lam_star].violated:
                w = results[kappa_star, lam_star].witness
                return LtVerdict(LtStatus.NOT_LT, Reason.BOUND_CHECK_FAILED, kappa_star, lam_star, details, w)
            details["budget_note"] = "bounds beyond the scan limits"
            return LtVerdict(LtStatus.UNKNOWN, Reason.BUDGET_EXCEEDED, None, None, details)
    return LtVerdict(LtStatus.UNKNOWN, Reason.BUDGET_EXCEEDED, None, None, details)
