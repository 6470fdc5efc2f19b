"""Brute-force ground truth on explicit unordered trees.

Only tree-level code is used here: enumeration, bottom-up evaluation,
(k,l)-types of concrete trees and literal subtree duplication.
"""

from __future__ import annotations

import random
from functools import lru_cache

import numpy as np

from ..verdicts import ClosureVerdict, OperationWitness, PairWitness, Status
from .automata import CountingDfta
from .trees import KLTable, UOp, UTree, apply_unranked, exact_ktype


class Universe:
    """All unordered trees up to ``max_nodes`` nodes, children as indices."""

    def __init__(self, symbols, max_nodes: int):
        if max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")
        self.symbols = tuple(symbols)
        self.max_nodes = max_nodes
        self.trees: list = []
        self.label: list = []
        self.kids: list = []
        self.index: dict = {}
        by_size: list = [[] for _ in range(max_nodes + 1)]
        for n in range(1, max_nodes + 1):
            for ms in self._multisets(n - 1, 0, by_size):
                for s in self.symbols:
                    t = UTree(s, [self.trees[i] for i in ms])
                    i = len(self.trees)
                    self.index[t] = i
                    self.trees.append(t)
                    self.label.append(s)
                    self.kids.append(ms)
                    by_size[n].append(i)
        self.by_size = by_size

    def _multisets(self, total: int, start: int, by_size):
        """Non-decreasing index tuples of trees whose sizes sum to ``total``."""
        if total == 0:
            yield ()
            return
        order = [i for n in range(1, total + 1) for i in by_size[n]]
        order.sort()
        for i in order:
            if i < start:
                continue
            size = self.trees[i].size
            if size > total:
                continue
            for rest in self._multisets(total - size, i, by_size):
                yield (i,) + rest

    def __len__(self):
        return len(self.trees)

    def states(self, a: CountingDfta) -> np.ndarray:
        out = np.zeros(len(self.trees), dtype=np.int64)
        for i, (s, ks) in enumerate(zip(self.label, self.kids)):
            out[i] = a.step(s, [out[c] for c in ks])
        return out

    def accepting(self, a: CountingDfta) -> np.ndarray:
        final = np.zeros(a.n_states, dtype=bool)
        final[list(a.final)] = True
        return final[self.states(a)]


@lru_cache(maxsize=None)
def universe(symbols: tuple, max_nodes: int) -> Universe:
    return Universe(symbols, max_nodes)


@lru_cache(maxsize=None)
def _kl_classes(symbols: tuple, kappa: int, lam: int, max_nodes: int):
    u = universe(symbols, max_nodes)
    table = KLTable(lam)
    bits: dict = {}
    tid = [0] * len(u)
    occ = [0] * len(u)
    for i, (s, ks) in enumerate(zip(u.label, u.kids)):
        if kappa == 0:
            tid[i] = table.intern(0, s)
        else:
            tid[i] = table.node(kappa, s, [tid[c] for c in ks])
        b = bits.setdefault(tid[i], 1 << len(bits))
        o = b
        for c in ks:
            o |= occ[c]
        occ[i] = o
    groups: dict = {}
    for i in range(len(u)):
        groups.setdefault((tid[i], occ[i]), []).append(i)
    return [np.array(g, dtype=np.int64) for g in groups.values() if len(g) > 1]


def brute_kl_testable(a: CountingDfta, kappa: int, lam: int, max_nodes: int) -> ClosureVerdict:
    """A (κ,λ)-class straddling membership among trees up to ``max_nodes``."""
    symbols = tuple(a.symbols)
    u = universe(symbols, max_nodes)
    acc = u.accepting(a)
    groups = _kl_classes(symbols, kappa, lam, max_nodes)
    explored = {"classes": len(groups), "max_nodes": max_nodes, "kappa": kappa, "lam": lam}
    for g in groups:
        vals = acc[g]
        if vals.any() and not vals.all():
            yes = u.trees[int(g[np.argmax(vals)])]
            no = u.trees[int(g[np.argmin(vals)])]
            return ClosureVerdict(Status.VIOLATED, PairWitness(yes, no, (kappa, lam)), explored, bounded=True)
    return ClosureVerdict(Status.HOLDS, None, explored, bounded=True)


def brute_ilt(a: CountingDfta, max_kappa: int = 2, max_nodes: int = 8) -> str:
    """"yes" if some κ ≤ max_kappa has no straddling (κ,1)-class, else "no"."""
    for kappa in range(max_kappa + 1):
        if brute_kl_testable(a, kappa, 1, max_nodes).holds:
            return "yes"
    return "no"


@lru_cache(maxsize=None)
def _stutter_pairs(symbols: tuple, max_nodes: int):
    u = universe(symbols, max_nodes)
    left, right, where = [], [], []
    for i, t in enumerate(u.trees):
        if t.size >= max_nodes:
            continue
        for path, node in t.nodes():
            if not path or t.size + node.size > max_nodes:
                continue
            r = apply_unranked(UOp.HSTUTTER, t, [path])
            left.append(i)
            right.append(u.index[r])
            where.append(path)
    return np.array(left, dtype=np.int64), np.array(right, dtype=np.int64), where


def brute_hstutter(a: CountingDfta, max_nodes: int) -> ClosureVerdict:
    """Duplicate every subtree of every tree, keeping results within ``max_nodes``."""
    symbols = tuple(a.symbols)
    u = universe(symbols, max_nodes)
    left, right, where = _stutter_pairs(symbols, max_nodes)
    acc = u.accepting(a)
    explored = {"instances": len(where), "max_nodes": max_nodes}
    flips = np.nonzero(acc[left] != acc[right])[0]
    if not len(flips):
        return ClosureVerdict(Status.HOLDS, None, explored, bounded=True)
    j = int(flips[0])
    w = OperationWitness(str(UOp.HSTUTTER), u.trees[left[j]], (where[j],), 0, u.trees[right[j]])
    return ClosureVerdict(Status.VIOLATED, w, explored, bounded=True)


def random_binary_utree(symbols, depth: int, rng: random.Random, p_leaf: float = 0.35) -> UTree:
    """A random unordered tree where every node has zero or two children."""
    if depth == 0 or rng.random() < p_leaf:
        return UTree(rng.choice(symbols))
    return UTree(rng.choice(symbols), [random_binary_utree(symbols, depth - 1, rng, p_leaf) for _ in range(2)])


def kl2_matches_ktype(t: UTree, k: int) -> bool:
    """On 0-or-2-children trees, equal (k,2)-types iff equal exact k-types, over all node pairs."""
    table = KLTable(2)
    nodes = [n for _, n in t.nodes()]
    kl = [table.of_tree(n, k) for n in nodes]
    exact = [exact_ktype(n, k) for n in nodes]
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if (kl[i] == kl[j]) != (exact[i] == exact[j]):
                return False
    return True
