"""Reading and writing automata and trees as structured text.

Inputs are YAML (so JSON also loads); outputs are plain dicts that the
CLI serialises with sorted keys.
"""

from __future__ import annotations

import itertools
import json

import yaml

from .automata import Dfta
from .trees import RankedAlphabet, parse_tree
from .unranked.automata import CountingDfta, all_profiles, complete_with_sink, render_constraint
from .unranked.trees import check_symbols, parse_unranked
from .words import WordDfa


class FormatError(ValueError):
    """A file does not follow one of the automaton formats."""


def load_document(text: str) -> dict:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise FormatError(f"not valid YAML/JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("expected a mapping at the top level")
    return doc


def kind_of(doc: dict) -> str:
    if "initial" in doc:
        return "word"
    if "m" in doc:
        return "counting"
    return "ranked"


def _field(doc: dict, name: str, what: str):
    if name not in doc:
        raise FormatError(f"{what}: missing field {name!r}")
    return doc[name]


def _state_index(states, what: str) -> dict:
    if not isinstance(states, list) or not states:
        raise FormatError(f"{what}: states must be a non-empty list")
    index = {}
    for s in states:
        if s in index:
            raise FormatError(f"{what}: duplicate state {s!r}")
        index[s] = len(index)
    return index


def _lookup(index: dict, s, what: str) -> int:
    if s not in index:
        raise FormatError(f"{what}: unknown state {s!r}")
    return index[s]


def _final(doc, index, what, name="final") -> set:
    return {_lookup(index, s, what) for s in _field(doc, name, what) or []}


def dfta_from_doc(doc: dict, complete: bool = False) -> Dfta:
    what = "ranked automaton"
    try:
        alphabet = RankedAlphabet([(e["symbol"], e["arity"]) for e in _field(doc, "alphabet", what)])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{what}: alphabet entries need symbol and arity ({exc})") from None
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None
    index = _state_index(_field(doc, "states", what), what)
    final = _final(doc, index, what)
    delta = {}
    for e in _field(doc, "delta", what) or []:
        try:
            key = (e["symbol"], tuple(_lookup(index, s, what) for s in e.get("children") or []))
            target = _lookup(index, e["to"], what)
        except (KeyError, TypeError):
            raise FormatError(f"{what}: transitions need symbol, children and to") from None
        if key in delta and delta[key] != target:
            raise FormatError(f"{what}: conflicting transitions for {key[0]}{list(key[1])}")
        delta[key] = target
    names = list(index)
    n = len(names)
    if complete:
        sink = n
        names.append("sink")
        for symbol, arity in alphabet.symbols:
            for args in itertools.product(range(n + 1), repeat=arity):
                delta.setdefault((symbol, args), sink)
        n += 1
    try:
        return Dfta(alphabet, n, final, delta, names)
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None


def dfta_to_doc(a: Dfta) -> dict:
    name = a.state_names
    return {
        "alphabet": [{"symbol": s, "arity": n} for s, n in a.alphabet.symbols],
        "states": list(name),
        "final": [name[q] for q in sorted(a.final)],
        "delta": [
            {"symbol": s, "children": [name[q] for q in args], "to": name[t]}
            for (s, args), t in sorted(a.delta.items())
        ],
    }


def _constraint(token, m: int, what: str) -> range:
    """Counts (as capped profile entries) allowed by ``=c`` or ``>=c``."""
    text = str(token).strip()
    try:
        if text.startswith(">="):
            c = int(text[2:])
            if not 0 <= c <= m:
                raise ValueError
            return range(c, m + 1)
        if text.startswith("="):
            c = int(text[1:])
            if not 0 <= c < m:
                raise ValueError
            return range(c, c + 1)
    except ValueError:
        pass
    raise FormatError(f"{what}: bad constraint {token!r} for threshold {m}")


def counting_from_doc(doc: dict, complete: bool = False) -> CountingDfta:
    what = "counting automaton"
    symbols = []
    for e in _field(doc, "alphabet", what):
        symbols.append(e["symbol"] if isinstance(e, dict) else str(e))
    m = _field(doc, "m", what)
    if not isinstance(m, int) or m < 1:
        raise FormatError(f"{what}: m must be a positive integer")
    index = _state_index(_field(doc, "states", what), what)
    n = len(index)
    final = _final(doc, index, what)
    partial: dict = {}
    for e in _field(doc, "delta", what) or []:
        try:
            symbol, target = e["symbol"], _lookup(index, e["to"], what)
            ranges = [range(0, 1)] * n
            for c in e.get("profile") or []:
                ranges[_lookup(index, c["state"], what)] = _constraint(c["constraint"], m, what)
        except (KeyError, TypeError):
            raise FormatError(f"{what}: transitions need symbol, profile and to") from None
        if symbol not in symbols:
            raise FormatError(f"{what}: unknown symbol {symbol!r}")
        for prof in itertools.product(*ranges):
            if partial.get((symbol, prof), target) != target:
                raise FormatError(f"{what}: conflicting transitions for {symbol} {prof}")
            partial[symbol, prof] = target
    try:
        if complete:
            return complete_with_sink(symbols, n, m, final, partial, list(index))
        return CountingDfta(symbols, n, m, final, partial, list(index))
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None


def counting_to_doc(a: CountingDfta) -> dict:
    name = a.state_names
    delta = []
    for s in a.symbols:
        for prof in all_profiles(a.n_states, a.m):
            profile = [
                {"state": name[q], "constraint": render_constraint(c, a.m)} for q, c in enumerate(prof) if c
            ]
            delta.append({"symbol": s, "profile": profile, "to": name[a.delta[s, prof]]})
    return {
        "alphabet": list(a.symbols),
        "m": a.m,
        "states": list(name),
        "final": [name[q] for q in sorted(a.final)],
        "delta": delta,
    }


def word_from_doc(doc: dict) -> WordDfa:
    what = "word automaton"
    alphabet = [str(c) for c in _field(doc, "alphabet", what)]
    index = _state_index(_field(doc, "states", what), what)
    initial = _lookup(index, _field(doc, "initial", what), what)
    accepting = _final(doc, index, what, "accepting")
    delta = {}
    for e in _field(doc, "delta", what) or []:
        try:
            delta[_lookup(index, e["from"], what), str(e["letter"])] = _lookup(index, e["to"], what)
        except (KeyError, TypeError):
            raise FormatError(f"{what}: transitions need from, letter and to") from None
    try:
        return WordDfa(tuple(alphabet), len(index), initial, frozenset(accepting), delta, tuple(index))
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None


def word_to_doc(d: WordDfa) -> dict:
    name = d.state_names
    return {
        "alphabet": list(d.alphabet),
        "states": list(name),
        "initial": name[d.initial],
        "accepting": [name[q] for q in sorted(d.accepting)],
        "delta": [{"from": name[q], "letter": c, "to": name[t]} for (q, c), t in sorted(d.delta.items())],
    }


def load_automaton(text: str, complete: bool = False):
    """A Dfta, CountingDfta or WordDfa, chosen by the fields present."""
    doc = load_document(text)
    kind = kind_of(doc)
    if kind == "word":
        return word_from_doc(doc)
    if kind == "counting":
        return counting_from_doc(doc, complete)
    return dfta_from_doc(doc, complete)


def automaton_to_doc(a) -> dict:
    if isinstance(a, CountingDfta):
        return counting_to_doc(a)
    if isinstance(a, WordDfa):
        return word_to_doc(a)
    return dfta_to_doc(a)


def read_tree(text: str, a):
    """Parse a term for the automaton's tree kind."""
    text = text.strip()
    if isinstance(a, CountingDfta):
        t = parse_unranked(text)
        check_symbols(t, a.symbols)
        return t
    return parse_tree(text, a.alphabet)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

