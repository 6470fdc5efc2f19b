"""Brute-force ground truth for the ranked decision procedures.

Everything here works on explicit trees: enumerate all trees up to a size,
apply every guard-valid operation instance, or group trees by their
occurrence data.  Only tree-level functions from :mod:`ltt.trees` are used;
none of the state-level machinery is shared.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .automata import Dfta
from .trees import (
    Op,
    RankedAlphabet,
    Tree,
    apply_guarded,
    context_between,
    is_prefix,
    ktype_of,
    occurrence_set,
    subtree_at,
    unrelated,
)
from .verdicts import ClosureVerdict, OperationWitness, PairWitness, Status
from .words import lt_equations_hold, syntactic_semigroup  # noqa: F401  word-side oracle


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def trees_by_size(alphabet: RankedAlphabet, max_nodes: int) -> list:
    """``out[n]`` lists the trees with exactly n nodes, in a fixed order."""
    out: list = [[] for _ in range(max_nodes + 1)]
    for n in range(1, max_nodes + 1):
        for symbol, arity in alphabet.symbols:
            if arity == 0:
                if n == 1:
                    out[n].append(Tree(symbol))
                continue
            for sizes in _compositions(n - 1, arity):
                for kids in itertools.product(*(out[s] for s in sizes)):
                    out[n].append(Tree(symbol, kids))
    return out


def enumerate_trees(alphabet: RankedAlphabet, max_nodes: int):
    """Every tree with at most ``max_nodes`` nodes exactly once, by size."""
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    for layer in trees_by_size(alphabet, max_nodes):
        yield from layer


class TreeUniverse:
    """A growing set of trees evaluated on many automata at once.

    Trees are stored as hash-consed nodes; evaluation proceeds in height
    layers with one vectorised table lookup per symbol and layer.
    """

    def __init__(self, alphabet: RankedAlphabet):
        self.alphabet = alphabet
        self.index: dict = {}
        self.trees: list = []
        self.symbol: list = []
        self.kids: list = []
        self.height: list = []
        self._layers = None

    def __len__(self):
        return len(self.trees)

    def add(self, t: Tree) -> int:
        i = self.index.get(t)
        if i is not None:
            return i
        kids = tuple(self.add(c) for c in t.children)
        i = len(self.trees)
        self.index[t] = i
        self.trees.append(t)
        self.symbol.append(t.label)
        self.kids.append(kids)
        self.height.append(1 + max((self.height[c] for c in kids), default=-1))
        self._layers = None
        return i

    def _build_layers(self):
        groups: dict = {}
        for i, (sym, h) in enumerate(zip(self.symbol, self.height)):
            groups.setdefault((h, sym), []).append(i)
        layers = []
        for (h, sym) in sorted(groups, key=lambda x: (x[0], x[1])):
            idx = np.array(groups[h, sym], dtype=np.int64)
            arity = self.alphabet.arity(sym)
            kids = np.array([self.kids[i] for i in groups[h, sym]], dtype=np.int64).reshape(len(idx), arity)
            layers.append((sym, arity, idx, kids))
        self._layers = layers

    def states(self, a: Dfta) -> np.ndarray:
        if a.alphabet != self.alphabet:
            raise ValueError("automaton and universe use different alphabets")
        if self._layers is None:
            self._build_layers()
        tables = a.cached("dense_tables", lambda: _dense_tables(a))
        out = np.zeros(len(self.trees), dtype=np.int64)
        for sym, arity, idx, kids in self._layers:
            table = tables[sym]
            if arity == 0:
                out[idx] = table
            else:
                out[idx] = table[tuple(out[kids[:, j]] for j in range(arity))]
        return out

    def accepting(self, a: Dfta) -> np.ndarray:
        final = np.zeros(a.n_states, dtype=bool)
        final[list(a.final)] = True
        return final[self.states(a)]


def _dense_tables(a: Dfta) -> dict:
    out = {}
    for symbol, arity in a.alphabet.symbols:
        if arity == 0:
            out[symbol] = a.delta[symbol, ()]
            continue
        table = np.zeros((a.n_states,) * arity, dtype=np.int64)
        for args in itertools.product(range(a.n_states), repeat=arity):
            table[args] = a.delta[symbol, args]
        out[symbol] = table
    return out


# -- guarded-operation instances ---------------------------------------------


def _node_data(t: Tree, k: int):
    paths = [p for p, _ in t.nodes()]
    types = {p: ktype_of(t, p, k) for p in paths}
    return paths, types


def operation_instances(t: Tree, op, k: int):
    """Yield every guard-valid node tuple for ``op`` that changes ``t``."""
    op = Op(op)
    paths, types = _node_data(t, k)
    sub = {p: subtree_at(t, p) for p in paths}
    if op is Op.HSWAP:
        for x, y in itertools.combinations(paths, 2):
            if unrelated(x, y) and types[x] == types[y] and sub[x] != sub[y]:
                yield (x, y)
    elif op is Op.HTRANSFER:
        for x, y in itertools.permutations(paths, 2):
            if not unrelated(x, y) or sub[x] != sub[y] or types[x] != types[y]:
                continue
            for z in paths:
                if unrelated(x, z) and unrelated(y, z) and types[z] == types[x] and sub[z] != sub[y]:
                    yield (x, y, z)
    else:
        for x, y, z in itertools.combinations(paths, 3):
            if not (is_prefix(x, y) and is_prefix(y, z)):
                continue
            if not (types[x] == types[y] == types[z]):
                continue
            if op is Op.VSTUTTER and context_between(t, x, y) != context_between(t, y, z):
                continue
            if op is Op.VSWAP and context_between(t, x, y) == context_between(t, y, z):
                continue
            yield (x, y, z)


class _Instances:
    def __init__(self, universe, left, right, info):
        self.universe = universe
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.info = info


_UNIVERSES: dict = {}


def _universe(alphabet: RankedAlphabet) -> TreeUniverse:
    u = _UNIVERSES.get(alphabet)
    if u is None:
        u = _UNIVERSES[alphabet] = TreeUniverse(alphabet)
    return u


@lru_cache(maxsize=None)
def _closure_instances(alphabet: RankedAlphabet, op: Op, k: int, max_nodes: int) -> _Instances:
    u = _universe(alphabet)
    left, right, info = [], [], []
    seen = set()
    for t in enumerate_trees(alphabet, max_nodes):
        for nodes in operation_instances(t, op, k):
            r = apply_guarded(op, t, nodes, k, check_guard=False)
            pair = (u.add(t), u.add(r))
            if pair in seen:
                continue
            seen.add(pair)
            left.append(pair[0])
            right.append(pair[1])
            info.append(nodes)
    return _Instances(u, left, right, info)


def brute_closure(a: Dfta, op, k: int, max_nodes: int) -> ClosureVerdict:
    """Membership flips under guard-valid applications on trees up to a size.

    Holds here means "no flip up to the bound" and is flagged ``bounded``.
    """
    op = Op(op)
    inst = _closure_instances(a.alphabet, op, k, max_nodes)
    acc = inst.universe.accepting(a)
    explored = {"instances": len(inst.info), "max_nodes": max_nodes, "k": k}
    if not len(inst.left):
        return ClosureVerdict(Status.HOLDS, None, explored, "no instances", bounded=True)
    flips = np.nonzero(acc[inst.left] != acc[inst.right])[0]
    if not len(flips):
        return ClosureVerdict(Status.HOLDS, None, explored, bounded=True)
    i = int(flips[0])
    t = inst.universe.trees[inst.left[i]]
    r = inst.universe.trees[inst.right[i]]
    return ClosureVerdict(Status.VIOLATED, OperationWitness(op, t, inst.info[i], k, r), explored, bounded=True)


# -- testability -------------------------------------------------------------


def occurrence_key(t: Tree, kappa: int):
    return ktype_of(t, (), kappa), occurrence_set(t, kappa)


@lru_cache(maxsize=None)
def _classes(alphabet: RankedAlphabet, kappa: int, max_nodes: int):
    u = _universe(alphabet)
    groups: dict = {}
    for t in enumerate_trees(alphabet, max_nodes):
        groups.setdefault(occurrence_key(t, kappa), []).append(u.add(t))
    members = [np.array(g, dtype=np.int64) for g in groups.values() if len(g) > 1]
    return u, members


def brute_testable(a: Dfta, kappa: int, max_nodes: int) -> ClosureVerdict:
    """Look for t ≅κ t' up to ``max_nodes`` nodes with different membership."""
    u, members = _classes(a.alphabet, kappa, max_nodes)
    acc = u.accepting(a)
    explored = {"classes": len(members), "max_nodes": max_nodes, "kappa": kappa}
    for g in members:
        vals = acc[g]
        if vals.any() and not vals.all():
            yes = u.trees[int(g[np.argmax(vals)])]
            no = u.trees[int(g[np.argmin(vals)])]
            return ClosureVerdict(Status.VIOLATED, PairWitness(yes, no, kappa), explored, bounded=True)
    return ClosureVerdict(Status.HOLDS, None, explored, bounded=True)
