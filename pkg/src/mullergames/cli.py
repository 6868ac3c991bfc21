"""Command-line interface: inspect Zielonka trees, build automata, certify
them on lasso words, solve games with minimal memory, and print the
succinctness separation report."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from typing import Optional, Sequence

from .automata import (
    AutomatonError,
    RabinLassoChecker,
    export_dot,
    export_hoa,
    has_duplicated_edges,
    parse_hoa,
    run_deterministic,
    simplify_rabin,
)
from .conditions import (
    ConditionError,
    LassoWord,
    inf_set,
    load_condition,
    satisfies_muller,
)
from .construction import (
    build_gfg_rabin,
    build_parity_automaton,
    provenance_document,
    resolve_run,
)
from .games import GameError, is_chromatic, load_game, memory_to_dict, solve_muller_game, verify_strategy
from .succinctness import (
    SearchBudgetError,
    report_to_dict,
    report_to_text,
    succinctness_report,
)
from .zielonka import build_zielonka


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _write_json(path: str, doc) -> None:
    _write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_zielonka(args) -> int:
    condition = load_condition(args.condition)
    tree = build_zielonka(condition)
    eta = tree.eta()
    print("node  label          kind    eta")
    for n in range(len(tree)):
        label = "{%s}" % ",".join(tree.label(n))
        kind = "round" if tree.is_round(n) else "square"
        eta_text = str(eta[n]) if n in eta else "-"
        print(f"{tree.node_name(n):<5} {label:<14} {kind:<7} {eta_text}")
    print(f"memtree = {tree.memtree()}")
    if args.dot:
        _write(args.dot, tree.to_dot())
    return 0


def cmd_build(args) -> int:
    condition = load_condition(args.condition)
    if args.kind == "gfg-rabin":
        gfg = build_gfg_rabin(condition)
        automaton = gfg.automaton
        if args.simplify:
            automaton = simplify_rabin(automaton)
            assert not has_duplicated_edges(automaton)
        print(f"{len(automaton.states)} states, {len(automaton.acceptance)} Rabin pairs")
        if args.provenance:
            _write_json(args.provenance, provenance_document(gfg))
    else:
        if args.simplify:
            raise AutomatonError("--simplify applies to gfg-rabin only")
        if args.provenance:
            raise AutomatonError("--provenance applies to gfg-rabin only")
        automaton = build_parity_automaton(condition)
        prios = sorted({int(t.colour) for t in automaton.transitions})
        print(f"{len(automaton.states)} states, priorities {prios[0]}..{prios[-1]}")
    if args.hoa:
        _write(args.hoa, export_hoa(automaton))
    if args.dot:
        _write(args.dot, export_dot(automaton))
    return 0


def _lassos(alphabet, max_prefix: int, max_period: int):
    for lu in range(max_prefix + 1):
        for prefix in itertools.product(alphabet.symbols, repeat=lu):
            for lv in range(1, max_period + 1):
                for period in itertools.product(alphabet.symbols, repeat=lv):
                    yield LassoWord(prefix, period)


def cmd_check(args) -> int:
    condition = load_condition(args.condition)
    bound = args.bound if args.bound is not None else 2 * len(condition.alphabet)
    if bound == 0:
        print("warning: bound 0 checks no lasso; vacuous pass")
        return 0
    gfg = build_gfg_rabin(condition)
    parity = build_parity_automaton(condition)
    if args.automaton == "self":
        rabin = gfg.automaton
    else:
        rabin = parse_hoa(open(args.automaton, encoding="utf-8").read())
        if rabin.alphabet != condition.alphabet:
            raise AutomatonError("checked automaton runs over a different alphabet")
    checker = RabinLassoChecker(rabin)
    checked = 0
    for w in _lassos(condition.alphabet, 2, bound):
        expected = satisfies_muller(condition, inf_set(w))
        verdicts = {"rabin": checker.accepts(w)}
        if args.automaton == "self":
            verdicts["parity"] = run_deterministic(parity, w)[1]
            verdicts["resolver"] = resolve_run(gfg, w)[1]
        for name, got in verdicts.items():
            if got != expected:
                print(
                    f"counterexample: {w!r} expected {expected} but {name} gives {got}"
                )
                return 1
        checked += 1
    print(f"pass: {checked} lassos agree with the condition (bound {bound})")
    return 0


def cmd_solve(args) -> int:
    condition = load_condition(args.condition)
    game = load_game(args.game, condition)
    solution = solve_muller_game(game, condition)
    print(f"winner: {solution.winner}")
    if solution.memory is None:
        return 0
    memory = solution.memory
    if not verify_strategy(game, condition, memory):
        raise GameError("extracted memory failed strategy verification")
    chromatic = is_chromatic(memory, game)
    print(f"memory size: {memory.size}")
    print(f"chromatic: {'yes' if chromatic else 'no'}")
    if args.memory_out:
        _write_json(args.memory_out, memory_to_dict(memory))
    return 0


def cmd_succinctness(args) -> int:
    row = succinctness_report(args.n, exact_chi=(True if args.exact_chi else None))
    print(report_to_text([row]), end="")
    if args.json:
        _write_json(args.json, report_to_dict(row))
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mullergames",
        description=(
            "Zielonka trees, minimal good-for-games Rabin automata, and "
            "memory-optimal Muller game solving"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zielonka", help="print a condition's Zielonka tree and memtree")
    p.add_argument("condition", help="condition file (JSON)")
    p.add_argument("--dot", metavar="PATH", help="write the tree as DOT")
    p.set_defaults(handler=cmd_zielonka)

    p = sub.add_parser("build", help="build the GFG Rabin or parity automaton")
    p.add_argument("condition", help="condition file (JSON)")
    p.add_argument("--kind", choices=["gfg-rabin", "parity"], required=True)
    p.add_argument("--simplify", action="store_true", help="merge duplicated edges")
    p.add_argument("--hoa", metavar="PATH", help="write the automaton as HOA v1")
    p.add_argument("--dot", metavar="PATH", help="write the automaton as DOT")
    p.add_argument(
        "--provenance", metavar="PATH", help="write the transition provenance map"
    )
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("check", help="certify automata against the condition on lassos")
    p.add_argument("condition", help="condition file (JSON)")
    p.add_argument(
        "--automaton",
        default="self",
        help="'self' for the built automata, or a HOA file emitted by 'build'",
    )
    p.add_argument("--bound", type=int, default=None, help="max period length")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("solve", help="solve a Muller game and extract a memory")
    p.add_argument("--game", required=True, help="game file (JSON)")
    p.add_argument("--condition", required=True, help="condition file (JSON)")
    p.add_argument("--memory-out", metavar="PATH", help="write the memory structure")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("succinctness", help="print the separation report for F_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exact-chi", action="store_true", help="force the exact colouring")
    p.add_argument("--json", metavar="PATH", help="write the machine-readable report")
    p.set_defaults(handler=cmd_succinctness)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ConditionError, AutomatonError, GameError, SearchBudgetError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
