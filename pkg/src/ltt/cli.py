"""Command-line front-end: ``ltt <command> --automaton FILE ...``.

Every command prints one verdict document.  Exit status is 0 for a
conclusive answer, 2 for Unknown and 1 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources

from . import oracles, tameness, testability, words
from .automata import Dfta, minimize, random_dfta
from .budget import DEFAULT_ITEMS, Budget
from .io import FormatError, automaton_to_doc, dumps, load_automaton, read_tree
from .trees import OperationError, RankedAlphabet, TreeSyntaxError, apply_guarded, ktype_of, occurrence_set, parse_path
from .trees import render_path
from .unranked import closure as uclosure
from .unranked import oracles as uoracles
from .unranked import testability as utestability
from .unranked.automata import CountingDfta, minimize_counting, random_counting
from .unranked.trees import apply_unranked, kl_occurrences, kl_type_of
from .verdicts import LtStatus, Status
from .words import WordDfa


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _budget(args) -> Budget:
    return Budget(items=args.budget, seconds=args.seconds)


def _load(args, kinds=None):
    if not args.automaton:
        raise UsageError("--automaton is required")
    try:
        with open(args.automaton, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.automaton}: {exc.strerror}") from None
    a = load_automaton(text, complete=args.complete_with_sink)
    if kinds and not isinstance(a, kinds):
        names = " or ".join(_kind_name(k) for k in kinds)
        raise UsageError(f"this command needs a {names}")
    return a


def _kind_name(cls) -> str:
    return {Dfta: "ranked automaton", CountingDfta: "counting automaton", WordDfa: "word automaton"}[cls]


def _tree(args, a):
    if not args.tree:
        raise UsageError("--tree is required")
    if args.tree == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.tree, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.tree}: {exc.strerror}") from None
    return read_tree(text, a)


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    return value


def _doc(command, status, params, witness=None, bounds=None, result=None, **extra):
    doc = {
        "command": command,
        "status": str(status),
        "parameters": params,
        "witnesses": witness.terms() if witness is not None else [],
        "bounds": bounds or {},
    }
    if witness is not None:
        doc["witness"] = witness.to_dict()
    if result is not None:
        doc["result"] = result
    doc.update(extra)
    return doc


def _closure_doc(command, v, params):
    bounds = dict(v.explored)
    if v.bounded:
        bounds["bounded"] = True
    return _doc(command, v.status, params, v.witness, bounds, note=v.note)


def _lt_doc(command, v, params):
    d = v.to_dict()
    return _doc(
        command, v.status, params, v.witness, d["details"], reason=d["reason"], kappa=v.kappa, **{"lambda": v.lam}
    )


def cmd_validate(args):
    a = _load(args)
    info = {"kind": _kind_name(type(a)), "states": a.n_states}
    if isinstance(a, Dfta):
        info["alphabet"] = {s: n for s, n in a.alphabet.symbols}
    elif isinstance(a, CountingDfta):
        info.update(alphabet=list(a.symbols), m=a.m)
    else:
        info["alphabet"] = list(a.alphabet)
    return _doc("validate", "Valid", {"automaton": args.automaton}, result=info)


def cmd_minimize(args):
    a = _load(args)
    if isinstance(a, Dfta):
        m = minimize(a)
    elif isinstance(a, CountingDfta):
        m = minimize_counting(a)
    else:
        m = words.minimize_word_dfa(a)
    return _doc("minimize", "Done", {"automaton": args.automaton}, result=automaton_to_doc(m))


def cmd_run(args):
    a = _load(args, (Dfta, CountingDfta))
    t = _tree(args, a)
    q = a.run(t)
    result = {"state": a.state_names[q], "accepted": q in a.final}
    return _doc("run", "Accepted" if q in a.final else "Rejected", {"tree": str(t)}, result=result)


def cmd_ktype(args):
    a = _load(args, (Dfta, CountingDfta))
    t = _tree(args, a)
    k = _need(args, "k")
    path = parse_path(args.path or "")
    if isinstance(a, Dfta):
        root = ktype_of(t, path, k)
        occ = occurrence_set(t, k)
    else:
        root = kl_type_of(t, path, k, args.l)
        occ = kl_occurrences(t, k, args.l)
    params = {"tree": str(t), "k": k, "l": args.l, "path": render_path(path)}
    result = {"type": str(root), "occurrences": sorted(str(x) for x in occ)}
    return _doc("ktype", "Done", params, result=result)


def cmd_apply_op(args):
    a = _load(args, (Dfta, CountingDfta))
    t = _tree(args, a)
    op = _need(args, "op")
    k = args.k if args.k is not None else 0
    nodes = [parse_path(x) for x in args.nodes or []]
    if isinstance(a, Dfta):
        out = apply_guarded(op, t, nodes, k)
    else:
        out = apply_unranked(op, t, nodes, k, args.l)
    before, after = a.accepts(t), a.accepts(out)
    params = {"op": op, "k": k, "l": args.l, "nodes": [render_path(x) for x in nodes], "tree": str(t)}
    result = {"tree": str(out), "accepted_before": before, "accepted_after": after}
    return _doc("apply-op", "Flipped" if before != after else "Preserved", params, result=result)


def cmd_tame(args):
    a = _load(args, (Dfta, CountingDfta))
    params = {"k": args.k, "l": args.l, "budget": args.budget}
    if isinstance(a, Dfta):
        if args.k is None:
            v = tameness.is_tame(a, _budget(args))
        else:
            v = tameness.is_k_tame(a, args.k, _budget(args))
    elif args.k is None:
        v = uclosure.is_tame_unranked(a, _budget(args))
    else:
        v = uclosure.is_kl_tame(a, args.k, _need(args, "l"), _budget(args))
    return _closure_doc("tame", v, params)


def cmd_testable(args):
    a = _load(args, (Dfta, CountingDfta))
    kappa = _need(args, "kappa")
    params = {"kappa": kappa, "budget": args.budget}
    if isinstance(a, Dfta):
        v = testability.is_kappa_testable(a, kappa, _budget(args))
    else:
        params["lambda"] = args.lam if args.lam is not None else 1
        v = utestability.is_kl_testable(a, kappa, params["lambda"], _budget(args))
    return _closure_doc("testable", v, params)


def cmd_decide_lt(args):
    a = _load(args, (Dfta, WordDfa))
    if isinstance(a, WordDfa):
        a = words.encode_word_language(a)
    max_kappa = args.max_kappa if args.max_kappa is not None else 3
    v = testability.decide_lt(a, max_kappa=max_kappa, budget=_budget(args))
    return _lt_doc("decide-lt", v, {"max_kappa": max_kappa, "budget": args.budget})


def cmd_decide_ilt(args):
    a = _load(args, (CountingDfta,))
    max_kappa = args.max_kappa if args.max_kappa is not None else 2
    v = utestability.decide_ilt(a, budget=_budget(args), max_kappa=max_kappa)
    return _lt_doc("decide-ilt", v, {"max_kappa": max_kappa, "budget": args.budget})


def cmd_decide_alt(args):
    a = _load(args, (CountingDfta,))
    max_kappa = args.max_kappa if args.max_kappa is not None else 2
    max_lambda = args.lam if args.lam is not None else 3
    v = utestability.decide_alt(a, max_kappa=max_kappa, max_lambda=max_lambda, budget=_budget(args))
    return _lt_doc("decide-alt", v, {"max_kappa": max_kappa, "max_lambda": max_lambda, "budget": args.budget})


def cmd_oracle(args):
    mode = args.mode
    if mode == "semigroup":
        d = _load(args, (WordDfa,))
        s = words.syntactic_semigroup(words.minimize_word_dfa(d))
        holds = words.lt_equations_hold(s)
        result = {"elements": len(s.elements), "idempotents": len(s.idempotents)}
        return _doc("oracle semigroup", Status.HOLDS if holds else Status.VIOLATED, {}, result=result)
    a = _load(args, (Dfta, CountingDfta))
    max_nodes = args.max_nodes
    if mode == "closure":
        op = _need(args, "op")
        params = {"op": op, "k": args.k or 0, "max_nodes": max_nodes}
        if isinstance(a, Dfta):
            v = oracles.brute_closure(a, op, args.k or 0, max_nodes)
        elif op == "hstutter":
            v = uoracles.brute_hstutter(a, max_nodes)
        else:
            raise UsageError("the unranked closure oracle covers hstutter only")
        return _closure_doc("oracle closure", v, params)
    kappa = _need(args, "kappa")
    params = {"kappa": kappa, "max_nodes": max_nodes}
    if isinstance(a, Dfta):
        v = oracles.brute_testable(a, kappa, max_nodes)
    else:
        params["lambda"] = args.lam if args.lam is not None else 1
        v = uoracles.brute_kl_testable(a, kappa, params["lambda"], max_nodes)
    return _closure_doc("oracle testable", v, params)


def cmd_random(args):
    seed = args.seed if args.seed is not None else 0
    states = args.states
    if args.kind == "ranked":
        alphabet = RankedAlphabet(json.loads(args.alphabet or '{"a": 2, "b": 0}'))
        a = random_dfta(alphabet, states, seed)
    else:
        symbols = (args.alphabet or "a,b").split(",")
        a = random_counting(symbols, states, args.m, seed)
    params = {"kind": args.kind, "states": states, "seed": seed}
    return _doc("random", "Done", params, result=automaton_to_doc(a))


COMMANDS = {
    "validate": cmd_validate,
    "minimize": cmd_minimize,
    "run": cmd_run,
    "ktype": cmd_ktype,
    "apply-op": cmd_apply_op,
    "tame": cmd_tame,
    "testable": cmd_testable,
    "decide-lt": cmd_decide_lt,
    "decide-ilt": cmd_decide_ilt,
    "decide-alt": cmd_decide_alt,
    "oracle": cmd_oracle,
    "random": cmd_random,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--automaton", metavar="FILE")
    common.add_argument("--tree", metavar="FILE|-")
    common.add_argument("--k", type=int)
    common.add_argument("--l", type=int)
    common.add_argument("--kappa", type=int)
    common.add_argument("--lambda", dest="lam", type=int)
    common.add_argument("--max-kappa", type=int)
    common.add_argument("--budget", type=int, default=DEFAULT_ITEMS, help="item budget per exploration")
    common.add_argument("--seconds", type=float, help="wall-clock budget per exploration")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--complete-with-sink", action="store_true")
    common.add_argument("--timing", action="store_true", help="add elapsed milliseconds to the document")

    parser = _Parser(prog="ltt", description="Local testability of regular tree languages.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in ["validate", "minimize", "run", "tame", "testable", "decide-lt", "decide-ilt", "decide-alt"]:
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("ktype", parents=[common])
    p.add_argument("--path", help='node path such as "0/1"; default is the root')
    p = sub.add_parser("apply-op", parents=[common])
    p.add_argument("--op", choices=["hswap", "htransfer", "vswap", "vstutter", "hstutter"])
    p.add_argument("--nodes", nargs="+", metavar="PATH", help='node paths; use "" for the root')
    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("mode", choices=["closure", "testable", "semigroup"])
    p.add_argument("--op", choices=["hswap", "htransfer", "vswap", "vstutter", "hstutter"])
    p.add_argument("--max-nodes", type=int, default=7)
    p = sub.add_parser("random", parents=[common])
    p.add_argument("--kind", choices=["ranked", "counting"], default="ranked")
    p.add_argument("--states", type=int, default=3)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--alphabet", help='ranked: JSON like {"a": 2, "b": 0}; counting: a,b')
    return parser


def render_text(doc: dict) -> str:
    lines = []
    for key in sorted(doc):
        value = doc[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True, ensure_ascii=False)
        elif value is None:
            value = "-"
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def verdict_schema() -> dict:
    """JSON Schema that every emitted document satisfies."""
    return json.loads(resources.files("ltt").joinpath("verdict.schema.json").read_text())


def exit_code(doc: dict) -> int:
    return 2 if doc["status"] in (str(Status.UNKNOWN), str(LtStatus.UNKNOWN)) else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a command is required")
        start = time.perf_counter()
        doc = COMMANDS[args.command](args)
        if args.timing:
            doc["timing_ms"] = round(1000 * (time.perf_counter() - start), 1)
    except UsageError as exc:
        print(f"ltt: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (InputError, FormatError, TreeSyntaxError, OperationError, ValueError, KeyError) as exc:
        print(f"ltt: error: {exc}", file=sys.stderr)
        return 1
    out = dumps(doc) if args.format == "json" else render_text(doc)
    sys.stdout.write(out)
    return exit_code(doc)


if __name__ == "__main__":
    sys.exit(main())
