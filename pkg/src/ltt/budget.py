"""Exploration budgets and the bottom-up saturation loop shared by the analyses."""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .trees import Tree

DEFAULT_ITEMS = 200_000


class BudgetExceeded(Exception):
    """An exploration ran out of budget; ``partial`` holds what was found."""

    def __init__(self, what: str, partial=None, explored: int = 0):
        super().__init__(f"budget exceeded while computing {what} ({explored} items)")
        self.what = what
        self.partial = partial
        self.explored = explored


@dataclass(frozen=True)
class Budget:
    """Caps one exploration: number of distinct items and optional wall-clock seconds."""

    items: int = DEFAULT_ITEMS
    seconds: float | None = None

    def meter(self) -> "Meter":
        return Meter(self)


class Meter:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.deadline = time.monotonic() + budget.seconds if budget.seconds else None

    def over(self, count: int) -> bool:
        if count > self.budget.items:
            return True
        return self.deadline is not None and time.monotonic() > self.deadline


def as_budget(budget) -> Budget:
    if budget is None:
        return Budget()
    if isinstance(budget, Budget):
        return budget
    return Budget(items=int(budget))


def saturate(
    symbols: Sequence[tuple],
    combine: Callable[[str, tuple], object],
    budget: Budget,
    what: str,
    priority: Callable[[object], int] | None = None,
    on_new: Callable[[object, Tree], bool] | None = None,
    found: dict | None = None,
) -> dict:
    """Least fixpoint of a bottom-up rule over ranked symbols.

    ``combine(symbol, child_keys)`` returns the key of the parent item or
    ``None`` to drop the combination.  Every key is reported with a
    smallest-found witness tree.  Items are expanded in order of
    ``(priority(key), witness size)``, and each tuple of expanded items is
    combined exactly once, when its last member is expanded.  ``on_new`` is
    called on every fresh key and may return True to stop early.  ``found``
    may be passed in to watch the witnesses while the loop runs.
    """
    meter = budget.meter()
    found = {} if found is None else found
    heap: list = []
    seq = itertools.count()
    prio = priority or (lambda key: 0)

    def offer(key, make_tree):
        old = found.get(key)
        if old is not None:
            return False
        t = make_tree()
        found[key] = t
        if len(found) > budget.items:
            raise BudgetExceeded(what, found, len(found))
        heapq.heappush(heap, (prio(key), t.size, next(seq), key))
        if on_new is not None and on_new(key, t):
            return True
        return False

    for symbol, arity in symbols:
        if arity == 0:
            key = combine(symbol, ())
            if key is not None and offer(key, lambda s=symbol: Tree(s)):
                return found

    inner = [(s, n) for s, n in symbols if n > 0]
    done: list = []
    done_set: set = set()
    while heap:
        if meter.over(len(found)):
            raise BudgetExceeded(what, found, len(found))
        _, _, _, key = heapq.heappop(heap)
        if key in done_set:
            continue
        old = list(done)
        done.append(key)
        done_set.add(key)
        both = done
        for symbol, arity in inner:
            for i in range(arity):
                pools = [old] * i + [[key]] + [both] * (arity - i - 1)
                for args in itertools.product(*pools):
                    parent = combine(symbol, args)
                    if parent is None or parent in found:
                        continue
                    if offer(parent, lambda s=symbol, a=args: Tree(s, [found[c] for c in a])):
                        return found
    return found
