"""Ranked trees, one-port contexts, node paths and k-types.

Trees are immutable and ordered.  A node path is a tuple of 0-based child
indices read from the root.  The port of a context is a leaf labelled
``_``, which is why ``_`` is not a legal alphabet symbol.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

PORT_LABEL = "_"
SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

Path = tuple  # tuple[int, ...]


class TreeSyntaxError(ValueError):
    """Malformed term text; ``offset`` is the character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class InvalidPathError(ValueError):
    pass


class OperationError(ValueError):
    """A guarded operation was applied to nodes violating its side conditions."""


class Tree:
    """An immutable ordered tree with a cached structural hash."""

    __slots__ = ("label", "children", "size", "depth", "_hash")

    def __init__(self, label: str, children: Iterable["Tree"] = ()):
        children = tuple(children)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "size", 1 + sum(c.size for c in children))
        object.__setattr__(
            self, "depth", 1 + max(c.depth for c in children) if children else 0
        )
        object.__setattr__(self, "_hash", hash((label, children)))

    def __setattr__(self, name, value):
        raise AttributeError("Tree is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Tree) or self._hash != other._hash:
            return False
        return self.label == other.label and self.children == other.children

    def __repr__(self):
        return f"Tree({render_tree(self)!r})"

    def __str__(self):
        return render_tree(self)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def nodes(self) -> Iterator[tuple[Path, "Tree"]]:
        """Yield ``(path, subtree)`` for every node in preorder."""
        stack = [((), self)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((path + (i,), node.children[i]))


PORT = Tree(PORT_LABEL)


@dataclass(frozen=True)
class RankedAlphabet:
    """A finite set of symbols, each with a fixed arity."""

    symbols: tuple

    def __init__(self, symbols):
        if isinstance(symbols, dict):
            symbols = symbols.items()
        pairs = tuple((str(name), int(arity)) for name, arity in symbols)
        object.__setattr__(self, "symbols", pairs)
        names = [name for name, _ in pairs]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be pairwise distinct")
        for name, arity in pairs:
            if name == PORT_LABEL or not SYMBOL_RE.fullmatch(name):
                raise ValueError(f"illegal symbol name {name!r}")
            if arity < 0:
                raise ValueError(f"negative arity for {name!r}")
        if not any(arity == 0 for _, arity in pairs):
            raise ValueError("alphabet needs at least one leaf symbol")

    @property
    def arities(self) -> dict:
        return dict(self.symbols)

    @property
    def names(self) -> list:
        return [name for name, _ in self.symbols]

    def arity(self, symbol: str) -> int:
        for name, arity in self.symbols:
            if name == symbol:
                return arity
        raise KeyError(symbol)

    def __contains__(self, symbol) -> bool:
        return any(name == symbol for name, _ in self.symbols)

    def __len__(self):
        return len(self.symbols)

    @property
    def max_arity(self) -> int:
        return max(arity for _, arity in self.symbols)

    def check(self, t: Tree, allow_port: bool = False) -> None:
        """Raise ValueError unless every node of ``t`` respects its arity."""
        arities = self.arities
        for path, node in t.nodes():
            if allow_port and node.label == PORT_LABEL and not node.children:
                continue
            if node.label not in arities:
                raise ValueError(f"unknown symbol {node.label!r} at {render_path(path)!r}")
            if arities[node.label] != len(node.children):
                raise ValueError(
                    f"symbol {node.label!r} expects {arities[node.label]} children, "
                    f"got {len(node.children)}"
                )


# -- term syntax ------------------------------------------------------------


def _tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "(),":
            yield ch, ch, i
            i += 1
        else:
            m = SYMBOL_RE.match(text, i)
            if not m:
                raise TreeSyntaxError(f"unexpected character {ch!r}", i)
            yield "sym", m.group(), i
            i = m.end()
    yield "end", "", n


def parse_term(text: str) -> Tree:
    """Parse term syntax without any alphabet check (ports allowed)."""
    toks = list(_tokens(text))
    pos = 0
    # each frame: [label, children, offset]
    stack: list = []
    result = None
    while True:
        kind, value, off = toks[pos]
        if kind != "sym":
            raise TreeSyntaxError("expected a symbol", off)
        pos += 1
        if toks[pos][0] == "(":
            stack.append([value, [], off])
            pos += 1
            continue
        node = Tree(value)
        # reduce
        while True:
            if node is not None:
                if not stack:
                    result = node
                    break
                stack[-1][1].append(node)
                node = None
            kind, value, off = toks[pos]
            if kind == ",":
                pos += 1
                break
            if kind == ")":
                pos += 1
                label, children, _ = stack.pop()
                node = Tree(label, children)
                continue
            raise TreeSyntaxError("expected ',' or ')'", off)
        if result is not None:
            kind, value, off = toks[pos]
            if kind != "end":
                raise TreeSyntaxError("trailing input", off)
            return result


def parse_tree(text: str, alphabet: RankedAlphabet) -> Tree:
    t = parse_term(text)
    # locate offending node for a positional error
    try:
        alphabet.check(t)
    except ValueError as exc:
        raise TreeSyntaxError(str(exc), _first_bad_offset(text, t, alphabet)) from None
    return t


def _first_bad_offset(text: str, t: Tree, alphabet: RankedAlphabet) -> int:
    arities = alphabet.arities
    bad = None
    for _, node in t.nodes():
        if arities.get(node.label) != len(node.children):
            bad = node.label
            break
    offsets = [off for kind, value, off in _tokens(text) if kind == "sym" and value == bad]
    return offsets[0] if offsets else 0


def render_tree(t: Tree) -> str:
    out: list = []
    stack: list = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        out.append(item.label)
        if item.children:
            stack.append(")")
            for i in range(len(item.children) - 1, -1, -1):
                stack.append(item.children[i])
                if i:
                    stack.append(",")
            stack.append("(")
    return "".join(out)


def parse_path(text: str) -> Path:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split("/"))
    except ValueError:
        raise InvalidPathError(f"bad node path {text!r}") from None


def render_path(path: Sequence[int]) -> str:
    return "/".join(str(i) for i in path)


# -- addressing -------------------------------------------------------------


def subtree_at(t: Tree, x: Sequence[int]) -> Tree:
    node = t
    for step in x:
        if not 0 <= step < len(node.children):
            raise InvalidPathError(f"path {render_path(x)!r} is not a node")
        node = node.children[step]
    return node


def replace_at(t: Tree, x: Sequence[int], new: Tree) -> Tree:
    if not x:
        return new
    step = x[0]
    if not 0 <= step < len(t.children):
        raise InvalidPathError(f"path {render_path(x)!r} is not a node")
    kids = list(t.children)
    kids[step] = replace_at(kids[step], x[1:], new)
    return Tree(t.label, kids)


def is_prefix(x: Sequence[int], y: Sequence[int]) -> bool:
    return len(x) <= len(y) and tuple(y[: len(x)]) == tuple(x)


def unrelated(x: Sequence[int], y: Sequence[int]) -> bool:
    return not is_prefix(x, y) and not is_prefix(y, x)


class Context:
    """A tree with exactly one port leaf."""

    __slots__ = ("tree", "port")

    def __init__(self, tree: Tree, port: Path | None = None):
        if port is None:
            ports = [p for p, n in tree.nodes() if n.label == PORT_LABEL and not n.children]
            if len(ports) != 1:
                raise ValueError(f"a context needs exactly one port, found {len(ports)}")
            port = ports[0]
        object.__setattr__(self, "tree", tree)
        object.__setattr__(self, "port", tuple(port))

    def __setattr__(self, name, value):
        raise AttributeError("Context is immutable")

    def __eq__(self, other):
        return isinstance(other, Context) and self.tree == other.tree

    def __hash__(self):
        return hash(("ctx", self.tree))

    def __repr__(self):
        return f"Context({render_tree(self.tree)!r})"

    def __str__(self):
        return render_tree(self.tree)

    @property
    def is_empty(self) -> bool:
        return not self.port

    def plug(self, u):
        return concat(self, u)


EMPTY_CONTEXT = Context(PORT, ())


def parse_context(text: str, alphabet: RankedAlphabet) -> Context:
    t = parse_term(text)
    alphabet.check(t, allow_port=True)
    return Context(t)


def context_between(t: Tree, x: Sequence[int], y: Sequence[int]) -> Context:
    if not is_prefix(x, y):
        raise InvalidPathError(f"{render_path(y)!r} is not a descendant of {render_path(x)!r}")
    top = subtree_at(t, x)
    rel = tuple(y[len(x):])
    subtree_at(top, rel)
    return Context(replace_at(top, rel, PORT), rel)


def context_above(t: Tree, x: Sequence[int]) -> Context:
    """The context of ``t`` between its root and ``x``."""
    return context_between(t, (), x)


def concat(c: Context, u):
    """Plug a tree or a context into the port of ``c``."""
    if isinstance(u, Context):
        return Context(replace_at(c.tree, c.port, u.tree), c.port + u.port)
    return replace_at(c.tree, c.port, u)


def compose_contexts(contexts: Iterable[Context]) -> Context:
    result = EMPTY_CONTEXT
    for c in contexts:
        result = concat(result, c)
    return result


# -- k-types ----------------------------------------------------------------


def truncate(t: Tree, k: int) -> Tree:
    """Restrict ``t`` to nodes at depth at most ``k``."""
    if k <= 0 or not t.children:
        return Tree(t.label) if t.children else t
    return Tree(t.label, [truncate(c, k - 1) for c in t.children])


@dataclass(frozen=True)
class KType:
    """The depth-``k`` truncation of a subtree, compared structurally."""

    k: int
    shape: Tree

    def __str__(self):
        return render_tree(self.shape)


def ktype_of(t: Tree, x: Sequence[int], k: int) -> KType:
    if k < 0:
        raise ValueError("k must be non-negative")
    return KType(k, truncate(subtree_at(t, x), k))


def _ktypes_bottom_up(t: Tree, k: int, out: set) -> list:
    """Return [truncations of t at depths 0..k] and collect k-types into out."""
    if not t.children:
        levels = [t] * (k + 1)
    else:
        kids = [_ktypes_bottom_up(c, k, out) for c in t.children]
        levels = [Tree(t.label)]
        for j in range(1, k + 1):
            levels.append(Tree(t.label, [kl[j - 1] for kl in kids]))
    out.add(KType(k, levels[k]))
    return levels


def occurrence_set(t: Tree, k: int) -> frozenset:
    out: set = set()
    _ktypes_bottom_up(t, k, out)
    return frozenset(out)


def equiv_k(t: Tree, t2: Tree, k: int) -> bool:
    return ktype_of(t, (), k) == ktype_of(t2, (), k) and occurrence_set(
        t, k
    ) == occurrence_set(t2, k)


def count_ktypes(alphabet: RankedAlphabet, k: int) -> int:
    f = len(alphabet)
    for _ in range(k):
        f = sum(f**arity for _, arity in alphabet.symbols)
    return f


def enumerate_ktype_shapes(alphabet: RankedAlphabet, k: int) -> list:
    """All depth-k truncations over ``alphabet`` (exhaustive, for checking)."""
    level = [Tree(name) for name in alphabet.names]
    for _ in range(k):
        nxt = []
        for name, arity in alphabet.symbols:
            for kids in itertools.product(level, repeat=arity):
                nxt.append(Tree(name, kids))
        level = nxt
    return level


class TypeTable:
    """Interns k-types as integers, level by level.

    A level-``j`` type is ``(j, label, child ids)`` with children at level
    ``j - 1``; level 0 keeps only the label.  Truncating a level-``j`` type
    gives its level-``j-1`` type.
    """

    def __init__(self):
        self._ids: dict = {}
        self._info: list = []
        self._trunc: dict = {}

    def __len__(self):
        return len(self._info)

    def intern(self, level: int, label: str, child_ids: tuple = ()) -> int:
        key = (level, label, child_ids if level else ())
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

    def truncate(self, tid: int) -> int:
        """Level ``j`` to level ``j - 1``."""
        out = self._trunc.get(tid)
        if out is None:
            level, label, kids = self._info[tid]
            if level == 0:
                raise ValueError("cannot truncate a level-0 type")
            if level == 1:
                out = self.intern(0, label)
            else:
                out = self.intern(level - 1, label, tuple(self.truncate(c) for c in kids))
            self._trunc[tid] = out
        return out

    def node(self, level: int, label: str, child_ids: Sequence[int]) -> int:
        """Type of a node from the level-``level`` types of its children."""
        if level == 0:
            return self.intern(0, label)
        return self.intern(level, label, tuple(self.truncate(c) for c in child_ids))

    def of_tree(self, t: Tree, level: int) -> int:
        if level == 0:
            return self.intern(0, t.label)
        return self.node(level, t.label, [self.of_tree(c, level) for c in t.children])

    def shape(self, tid: int) -> Tree:
        level, label, kids = self._info[tid]
        return Tree(label, [self.shape(c) for c in kids])

    def ktype(self, tid: int) -> KType:
        return KType(self.level(tid), self.shape(tid))


# -- guarded operations ------------------------------------------------------


class Op(str, enum.Enum):
    HSWAP = "hswap"
    HTRANSFER = "htransfer"
    VSWAP = "vswap"
    VSTUTTER = "vstutter"

    def __str__(self):
        return self.value


RANKED_OPS = (Op.HSWAP, Op.HTRANSFER, Op.VSWAP, Op.VSTUTTER)


def _check_guard(t: Tree, nodes, k: int) -> None:
    types = {ktype_of(t, x, k) for x in nodes}
    if len(types) != 1:
        raise OperationError(f"guard violated: nodes do not share a {k}-type")


def apply_guarded(op, t: Tree, nodes: Sequence[Sequence[int]], k: int, check_guard: bool = True) -> Tree:
    """Rewrite ``t`` by one of the four guarded operations."""
    op = Op(op)
    nodes = [tuple(x) for x in nodes]
    for x in nodes:
        subtree_at(t, x)
    if op is Op.HSWAP:
        if len(nodes) != 2:
            raise OperationError("horizontal swap takes two nodes")
        x, x2 = nodes
        if not unrelated(x, x2):
            raise OperationError("swapped nodes must not be related by descent")
        if check_guard:
            _check_guard(t, nodes, k)
        s, s2 = subtree_at(t, x), subtree_at(t, x2)
        return replace_at(replace_at(t, x, s2), x2, s)
    if op is Op.HTRANSFER:
        if len(nodes) != 3:
            raise OperationError("horizontal transfer takes three nodes")
        x, y, z = nodes
        if not (unrelated(x, y) and unrelated(x, z) and unrelated(y, z)):
            raise OperationError("transfer nodes must be pairwise unrelated")
        if subtree_at(t, x) != subtree_at(t, y):
            raise OperationError("transfer needs equal subtrees at the first two nodes")
        if check_guard:
            _check_guard(t, nodes, k)
        return replace_at(t, y, subtree_at(t, z))
    if len(nodes) != 3:
        raise OperationError("vertical operations take three nodes")
    x, y, z = nodes
    if not (is_prefix(x, y) and is_prefix(y, z)):
        raise OperationError("vertical operations need x above y above z")
    top = context_above(t, x)
    d1 = context_between(t, x, y)
    d2 = context_between(t, y, z)
    bottom = subtree_at(t, z)
    if op is Op.VSTUTTER and d1 != d2:
        raise OperationError("stutter needs equal contexts between x,y and y,z")
    if check_guard:
        _check_guard(t, nodes, k)
    if op is Op.VSWAP:
        return concat(top, concat(d2, concat(d1, bottom)))
    return concat(top, concat(d1, bottom))
