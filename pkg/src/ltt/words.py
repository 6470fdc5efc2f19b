"""Word automata, syntactic semigroups and the rank-1 tree encoding of words."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .automata import Dfta, minimize
from .trees import RankedAlphabet, Tree

LEAF = "end"


@dataclass(frozen=True)
class WordDfa:
    """A complete deterministic word automaton; states are ``0..n-1``."""

    alphabet: tuple
    n_states: int
    initial: int
    accepting: frozenset
    delta: dict = field(hash=False)
    state_names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        if not self.state_names:
            object.__setattr__(self, "state_names", tuple(range(self.n_states)))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("letters must be distinct")
        for q in range(self.n_states):
            for letter in self.alphabet:
                target = self.delta.get((q, letter))
                if target is None:
                    raise ValueError(f"word automaton is incomplete at ({q}, {letter})")
                if not 0 <= target < self.n_states:
                    raise ValueError(f"transition ({q}, {letter}) leaves the state set")
        if not 0 <= self.initial < self.n_states:
            raise ValueError("initial state out of range")

    def read(self, word, q=None) -> int:
        q = self.initial if q is None else q
        for letter in word:
            q = self.delta[q, letter]
        return q

    def accepts(self, word) -> bool:
        return self.read(word) in self.accepting


def word_dfa(alphabet, n_states, initial, accepting, transitions) -> WordDfa:
    """Build from a transition function ``transitions(q, letter)`` or a dict."""
    if callable(transitions):
        delta = {(q, c): transitions(q, c) for q in range(n_states) for c in alphabet}
    else:
        delta = dict(transitions)
    return WordDfa(tuple(alphabet), n_states, initial, frozenset(accepting), delta)


def minimize_word_dfa(d: WordDfa) -> WordDfa:
    reach = {d.initial}
    stack = [d.initial]
    while stack:
        q = stack.pop()
        for c in d.alphabet:
            p = d.delta[q, c]
            if p not in reach:
                reach.add(p)
                stack.append(p)
    order = sorted(reach)
    block = {q: int(q in d.accepting) for q in order}
    while True:
        sig = {q: (block[q],) + tuple(block[d.delta[q, c]] for c in d.alphabet) for q in order}
        ids: dict = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in order}
        stable = len(ids) == len(set(block.values()))
        block = new
        if stable:
            break
    # renumber so that the initial state's block comes first, then by first visit
    renum: dict = {}
    queue = [d.initial]
    while queue:
        q = queue.pop(0)
        if block[q] in renum:
            continue
        renum[block[q]] = len(renum)
        queue.extend(d.delta[q, c] for c in d.alphabet)
    rep = {}
    for q in order:
        rep.setdefault(renum[block[q]], q)
    delta = {(i, c): renum[block[d.delta[rep[i], c]]] for i in rep for c in d.alphabet}
    accepting = {i for i in rep if rep[i] in d.accepting}
    return WordDfa(d.alphabet, len(rep), 0, frozenset(accepting), delta)


@dataclass(frozen=True)
class SyntacticSemigroup:
    """Transformations induced by nonempty words, with their products.

    ``elements[i]`` is a tuple mapping each state to its image;
    ``product[i, j]`` is the element of ``words[i] + words[j]``.
    """

    elements: tuple
    product: dict = field(hash=False)
    words: tuple = ()
    letters: dict = field(default_factory=dict, hash=False)

    def __len__(self):
        return len(self.elements)

    @property
    def idempotents(self) -> list:
        return [i for i in range(len(self.elements)) if self.product[i, i] == i]

    def element_of(self, word) -> int:
        if not word:
            raise ValueError("the semigroup has no element for the empty word")
        e = self.letters[word[0]]
        for c in word[1:]:
            e = self.product[e, self.letters[c]]
        return e

    def is_associative(self) -> bool:
        n = len(self.elements)
        p = self.product
        return all(p[p[x, y], z] == p[x, p[y, z]] for x in range(n) for y in range(n) for z in range(n))


def syntactic_semigroup(d: WordDfa) -> SyntacticSemigroup:
    """Transition semigroup of the minimal automaton of ``d``."""
    d = minimize_word_dfa(d)
    states = range(d.n_states)
    letter_maps = {c: tuple(d.delta[q, c] for q in states) for c in d.alphabet}
    index: dict = {}
    elements: list = []
    words: list = []
    queue = []
    for c in d.alphabet:
        f = letter_maps[c]
        if f not in index:
            index[f] = len(elements)
            elements.append(f)
            words.append(c)
            queue.append(f)
    while queue:
        f = queue.pop(0)
        for c in d.alphabet:
            g = tuple(letter_maps[c][f[q]] for q in states)
            if g not in index:
                index[g] = len(elements)
                elements.append(g)
                words.append(words[index[f]] + c)
                queue.append(g)
    product = {}
    for i, f in enumerate(elements):
        for j, g in enumerate(elements):
            product[i, j] = index[tuple(g[f[q]] for q in states)]
    letters = {c: index[letter_maps[c]] for c in d.alphabet}
    return SyntacticSemigroup(tuple(elements), product, tuple(words), letters)


def lt_equations_hold(s: SyntacticSemigroup) -> bool:
    """exe = exexe and exeye = eyexe for every idempotent e and all x, y."""
    p = s.product
    n = len(s.elements)

    def mul(*xs):
        out = xs[0]
        for x in xs[1:]:
            out = p[out, x]
        return out

    for e in s.idempotents:
        for x in range(n):
            exe = mul(e, x, e)
            if exe != mul(exe, x, e):
                return False
            for y in range(n):
                if mul(exe, y, e) != mul(e, y, e, x, e):
                    return False
    return True


def encode_word(word, leaf: str = LEAF) -> Tree:
    """a1 a2 ... an as the unary tree a1(a2(...an(leaf)))."""
    t = Tree(leaf)
    for c in reversed(list(word)):
        t = Tree(c, [t])
    return t


def decode_word(t: Tree, leaf: str = LEAF) -> str:
    out = []
    while t.children:
        out.append(t.label)
        t = t.children[0]
    if t.label != leaf:
        raise ValueError("not a word encoding")
    return "".join(out)


def word_alphabet(d: WordDfa, leaf: str = LEAF) -> RankedAlphabet:
    if leaf in d.alphabet:
        raise ValueError(f"letter {leaf!r} clashes with the leaf symbol")
    return RankedAlphabet([(c, 1) for c in d.alphabet] + [(leaf, 0)])


def encode_word_language(d: WordDfa, leaf: str = LEAF) -> Dfta:
    """Bottom-up tree automaton accepting the encodings of members of ``d``.

    A subtree spells a suffix u of the word; its state is the set of word
    states from which u leads to acceptance, which is the subset
    construction for the reversed automaton.
    """
    alphabet = word_alphabet(d, leaf)
    start = frozenset(d.accepting)
    index = {start: 0}
    order = [start]
    delta: dict = {(leaf, ()): 0}
    i = 0
    while i < len(order):
        s = order[i]
        for c in d.alphabet:
            pre = frozenset(q for q in range(d.n_states) if d.delta[q, c] in s)
            if pre not in index:
                index[pre] = len(order)
                order.append(pre)
            delta[c, (i,)] = index[pre]
        i += 1
    final = [j for j, s in enumerate(order) if d.initial in s]
    names = ["{" + ",".join(str(d.state_names[q]) for q in sorted(s)) + "}" for s in order]
    return minimize(Dfta(alphabet, len(order), final, delta, names))


def words_up_to(alphabet, length: int):
    for n in range(length + 1):
        for w in itertools.product(alphabet, repeat=n):
            yield "".join(w)
