"""Unranked unordered trees, (k,l)-types and the guarded rewrites.

A tree is stored in canonical form: children sorted by their rendering, so
structural equality is multiset equality of children.  Paths index into
the canonical child order.  Syntax is ``a{t,...,t}``; a leaf is ``a`` or
``a{}``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from ..trees import PORT_LABEL, SYMBOL_RE, InvalidPathError, OperationError, TreeSyntaxError, render_path


class UTree:
    """An immutable unordered tree with canonically sorted children."""

    __slots__ = ("label", "children", "key", "size", "depth", "_hash")

    def __init__(self, label: str, children=()):
        kids = tuple(sorted(children, key=lambda c: c.key))
        key = label if not kids else label + "{" + ",".join(c.key for c in kids) + "}"
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "size", 1 + sum(c.size for c in kids))
        object.__setattr__(self, "depth", 1 + max(c.depth for c in kids) if kids else 0)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("UTree is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, UTree) and self.key == other.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"UTree({self.key!r})"

    def __str__(self):
        return self.key

    def nodes(self) -> Iterator[tuple]:
        """Pre-order (path, subtree) pairs."""
        stack = [((), self)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((path + (i,), node.children[i]))

    def labels(self) -> set:
        return {n.label for _, n in self.nodes()}


PORT = UTree(PORT_LABEL)


def leaf(label: str) -> UTree:
    return UTree(label)


# -- syntax -----------------------------------------------------------------


def _tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "{},":
            yield ch, ch, i
            i += 1
        else:
            m = SYMBOL_RE.match(text, i)
            if not m:
                raise TreeSyntaxError(f"unexpected character {ch!r}", i)
            yield "sym", m.group(), i
            i = m.end()
    yield "end", "", n


def parse_unranked(text: str) -> UTree:
    toks = list(_tokens(text))
    pos = 0

    def tree():
        nonlocal pos
        kind, value, off = toks[pos]
        if kind != "sym":
            raise TreeSyntaxError("expected a symbol", off)
        pos += 1
        if toks[pos][0] != "{":
            return UTree(value)
        pos += 1
        kids = []
        if toks[pos][0] == "}":
            pos += 1
            return UTree(value)
        while True:
            kids.append(tree())
            kind, _, off = toks[pos]
            pos += 1
            if kind == "}":
                return UTree(value, kids)
            if kind != ",":
                raise TreeSyntaxError("expected ',' or '}'", off)

    t = tree()
    kind, _, off = toks[pos]
    if kind != "end":
        raise TreeSyntaxError("trailing input", off)
    return t


def render_unranked(t: UTree) -> str:
    return t.key


def check_symbols(t: UTree, symbols, allow_port: bool = False) -> None:
    allowed = set(symbols)
    for _, node in t.nodes():
        if node.label == PORT_LABEL and allow_port and not node.children:
            continue
        if node.label not in allowed:
            raise ValueError(f"unknown symbol {node.label!r}")


# -- addressing, contexts ---------------------------------------------------


def subtree_at(t: UTree, x: Sequence[int]) -> UTree:
    node = t
    for step in x:
        if not 0 <= step < len(node.children):
            raise InvalidPathError(f"path {render_path(x)!r} is not a node")
        node = node.children[step]
    return node


def replace_many(t: UTree, repl: dict) -> UTree:
    """Replace several pairwise unrelated subtrees at once (paths refer to ``t``)."""
    for x in repl:
        subtree_at(t, x)

    def rec(node, path):
        if path in repl:
            return repl[path]
        if not any(len(x) > len(path) and x[: len(path)] == path for x in repl):
            return node
        return UTree(node.label, [rec(c, path + (i,)) for i, c in enumerate(node.children)])

    return rec(t, ())


def replace_at(t: UTree, x: Sequence[int], new: UTree) -> UTree:
    return replace_many(t, {tuple(x): new})


def is_prefix(x, y) -> bool:
    return len(x) <= len(y) and tuple(y[: len(x)]) == tuple(x)


def unrelated(x, y) -> bool:
    return not is_prefix(x, y) and not is_prefix(y, x)


def port_path(c: UTree):
    found = [p for p, n in c.nodes() if n.label == PORT_LABEL and not n.children]
    if len(found) != 1:
        raise ValueError(f"a context needs exactly one port, found {len(found)}")
    return found[0]


def plug(c: UTree, u: UTree) -> UTree:
    """Put ``u`` (a tree or another context) into the port of context ``c``."""
    return replace_at(c, port_path(c), u)


def context_between(t: UTree, x, y) -> UTree:
    if not is_prefix(x, y):
        raise InvalidPathError(f"{render_path(y)!r} is not a descendant of {render_path(x)!r}")
    return replace_at(subtree_at(t, x), tuple(y[len(x):]), PORT)


def add_children(t: UTree, extra) -> UTree:
    return UTree(t.label, list(t.children) + list(extra))


# -- (k,l)-types ------------------------------------------------------------


@dataclass(frozen=True)
class KLType:
    """Label plus, per child (k-1,l)-type, the count capped at l.

    ``l is None`` means exact counts, i.e. the isomorphism type of the
    depth-k truncation.
    """

    k: int
    l: int | None
    label: str
    counts: tuple = ()

    def __str__(self):
        if self.k == 0:
            return self.label
        parts = []
        for child, c in self.counts:
            sign = ">=" if self.l is not None and c == self.l else "="
            parts.append(f"{child}:{sign}{c}")
        return self.label + "{" + ",".join(parts) + "}"


class KLTable:
    """Interns (k,l)-types as integers; ``l=None`` gives exact k-types."""

    def __init__(self, l: int | None):
        if l is not None and l < 1:
            raise ValueError("l must be at least 1")
        self.l = l
        self._ids: dict = {}
        self._info: list = []
        self._trunc: dict = {}

    def __len__(self):
        return len(self._info)

    def cap(self, c: int) -> int:
        return c if self.l is None else min(c, self.l)

    def intern(self, level: int, label: str, counts=()) -> int:
        key = (level, label, tuple(counts) if level else ())
        tid = self._ids.get(key)
        if tid is None:
            tid = len(self._info)
            self._ids[key] = tid
            self._info.append(key)
        return tid

    def level(self, tid: int) -> int:
        return self._info[tid][0]

    def label(self, tid: int) -> str:
        return self._info[tid][1]

    def counts(self, tid: int) -> tuple:
        return self._info[tid][2]

    def from_counts(self, level: int, label: str, counter: dict) -> int:
        """Type from a map child type id (level-1) -> count, capping here."""
        return self.intern(level, label, tuple(sorted((c, self.cap(n)) for c, n in counter.items() if n)))

    def node(self, level: int, label: str, child_ids) -> int:
        """Type of a node from the level-``level`` types of its children."""
        if level == 0:
            return self.intern(0, label)
        counter: dict = {}
        for c in child_ids:
            tc = self.truncate(c)
            counter[tc] = counter.get(tc, 0) + 1
        return self.from_counts(level, label, counter)

    def truncate(self, tid: int) -> int:
        out = self._trunc.get(tid)
        if out is None:
            level, label, counts = self._info[tid]
            if level == 0:
                raise ValueError("cannot truncate a level-0 type")
            if level == 1:
                out = self.intern(0, label)
            else:
                counter: dict = {}
                for c, n in counts:
                    tc = self.truncate(c)
                    counter[tc] = counter.get(tc, 0) + n
                out = self.from_counts(level - 1, label, counter)
            self._trunc[tid] = out
        return out

    def of_tree(self, t: UTree, level: int) -> int:
        if level == 0:
            return self.intern(0, t.label)
        return self.node(level, t.label, [self.of_tree(c, level) for c in t.children])

    def all_types(self, t: UTree, level: int) -> tuple:
        """(root type id, set of type ids at every node)."""
        seen: set = set()

        def rec(node):
            if level == 0:
                tid = self.intern(0, node.label)
                for c in node.children:
                    rec(c)
            else:
                tid = self.node(level, node.label, [rec(c) for c in node.children])
            seen.add(tid)
            return tid

        return rec(t), frozenset(seen)

    def kltype(self, tid: int) -> KLType:
        level, label, counts = self._info[tid]
        return KLType(level, self.l, label, tuple((self.kltype(c), n) for c, n in counts))


def kl_type_of(t: UTree, x: Sequence[int], k: int, l: int | None) -> KLType:
    if k < 0:
        raise ValueError("k must be non-negative")
    table = KLTable(l)
    return table.kltype(table.of_tree(subtree_at(t, x), k))


def kl_occurrences(t: UTree, k: int, l: int | None) -> frozenset:
    table = KLTable(l)
    _, occ = table.all_types(t, k)
    return frozenset(table.kltype(i) for i in occ)


def equiv_kl(t: UTree, t2: UTree, k: int, l: int | None) -> bool:
    """Same root (k,l)-type and the same set of (k,l)-types occurring."""
    table = KLTable(l)
    return table.all_types(t, k) == table.all_types(t2, k)


def count_kl_types(n_symbols: int, k: int, l: int) -> int:
    """f(0) = |Σ| and f(j+1) = |Σ|·(l+1)^f(j)."""
    if l < 1:
        raise ValueError("l must be at least 1")
    f = n_symbols
    for _ in range(k):
        f = n_symbols * (l + 1) ** f
    return f


def enumerate_kl_types(symbols, k: int, l: int) -> list:
    """Every (k,l)-type over ``symbols`` (exhaustive, for checking)."""
    level = [KLType(0, l, s) for s in symbols]
    for j in range(1, k + 1):
        nxt = []
        for s in symbols:
            for counts in itertools.product(range(l + 1), repeat=len(level)):
                kids = tuple((c, n) for c, n in zip(level, counts) if n)
                nxt.append(KLType(j, l, s, kids))
        level = nxt
    return level


def exact_ktype(t: UTree, k: int) -> UTree:
    """Depth-k truncation: the unordered k-type as a tree."""
    if k <= 0 or not t.children:
        return UTree(t.label)
    return UTree(t.label, [exact_ktype(c, k - 1) for c in t.children])


# -- guarded operations ------------------------------------------------------


class UOp(str, enum.Enum):
    HSWAP = "hswap"
    HTRANSFER = "htransfer"
    VSWAP = "vswap"
    VSTUTTER = "vstutter"
    HSTUTTER = "hstutter"

    def __str__(self):
        return self.value


TAMENESS_OPS = (UOp.HSWAP, UOp.HTRANSFER, UOp.VSWAP, UOp.VSTUTTER)


def _check_guard(t: UTree, nodes, k: int, l) -> None:
    table = KLTable(l)
    types = {table.of_tree(subtree_at(t, x), k) for x in nodes}
    if len(types) != 1:
        what = f"{k}-type" if l is None else f"({k},{l})-type"
        raise OperationError(f"guard violated: nodes do not share a {what}")


def apply_unranked(op, t: UTree, nodes, k: int = 0, l: int | None = None, check_guard: bool = True) -> UTree:
    """Rewrite ``t``; the guard compares (k,l)-types, or exact k-types if l is None."""
    op = UOp(op)
    nodes = [tuple(x) for x in nodes]
    for x in nodes:
        subtree_at(t, x)
    if op is UOp.HSTUTTER:
        if len(nodes) != 1 or not nodes[0]:
            raise OperationError("horizontal stutter takes one non-root node")
        (x,) = nodes
        parent = subtree_at(t, x[:-1])
        return replace_at(t, x[:-1], add_children(parent, [subtree_at(t, x)]))
    if op in (UOp.HSWAP, UOp.HTRANSFER):
        want = 2 if op is UOp.HSWAP else 3
        if len(nodes) != want:
            raise OperationError(f"{op} takes {want} nodes")
        if any(not unrelated(x, y) for x, y in itertools.combinations(nodes, 2)):
            raise OperationError("nodes must be pairwise unrelated")
        if check_guard:
            _check_guard(t, nodes, k, l)
        if op is UOp.HSWAP:
            x, y = nodes
            return replace_many(t, {x: subtree_at(t, y), y: subtree_at(t, x)})
        x, y, z = nodes
        if subtree_at(t, x) != subtree_at(t, y):
            raise OperationError("transfer needs equal subtrees at the first two nodes")
        return replace_at(t, y, subtree_at(t, z))
    if len(nodes) != 3:
        raise OperationError("vertical operations take three nodes")
    x, y, z = nodes
    if not (is_prefix(x, y) and is_prefix(y, z)) or x == y or y == z:
        raise OperationError("vertical operations need x strictly above y strictly above z")
    d1 = context_between(t, x, y)
    d2 = context_between(t, y, z)
    bottom = subtree_at(t, z)
    if op is UOp.VSTUTTER and d1 != d2:
        raise OperationError("stutter needs equal contexts between x,y and y,z")
    if check_guard:
        _check_guard(t, nodes, k, l)
    if op is UOp.VSWAP:
        new = plug(d2, plug(d1, bottom))
    else:
        new = plug(d1, bottom)
    return replace_at(t, x, new)
