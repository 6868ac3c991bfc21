"""From a Zielonka tree to automata: the minimal good-for-games Rabin
automaton, the deterministic parity automaton over the tree's leaves, and
the leaf-memory resolver tying the two together.

States of the Rabin automaton are the values of a leaf numbering with
distinct values across branches of round nodes; its transitions follow the
tree walk "climb to the deepest ancestor containing the letter, output that
node, switch to its next child, descend leftmost".
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import Automaton, Run, Transition, accepts_colour_set
from .conditions import (
    Alphabet,
    ConditionError,
    LassoWord,
    MullerCondition,
    ParityCondition,
    RabinCondition,
    inf_set,
    satisfies_rabin,
)
from .zielonka import ZielonkaTree, build_zielonka


def node_alphabet(tree: ZielonkaTree) -> Alphabet:
    return Alphabet([tree.node_name(n) for n in range(len(tree))])


def node_rabin_pairs(tree: ZielonkaTree) -> RabinCondition:
    """One Rabin pair per round node n: green is n itself, red is every node
    that is neither n nor a descendant of n (strict descendants stay orange)."""
    colours = node_alphabet(tree)
    pairs = []
    for n in range(len(tree)):
        if not tree.is_round(n):
            continue
        green = [tree.node_name(n)]
        red = [
            tree.node_name(m)
            for m in range(len(tree))
            if m != n and not tree.is_ancestor(n, m)
        ]
        pairs.append((green, red))
    return RabinCondition(colours, pairs)


def check_node_sequence(tree: ZielonkaTree, w: LassoWord) -> bool:
    """Rabin satisfaction of a node sequence, cross-checked against the
    characterisation "a unique minimal node recurs and it is round"."""
    pairs = node_rabin_pairs(tree)
    letters = inf_set(w)
    by_rabin = satisfies_rabin(pairs, letters)

    name_to_id = {tree.node_name(n): n for n in range(len(tree))}
    try:
        members = [name_to_id[name] for name in letters]
    except KeyError as err:
        raise ConditionError(f"unknown node id {err.args[0]!r}") from None
    minimal = [
        n
        for n in members
        if not any(m != n and tree.is_ancestor(m, n) for m in members)
    ]
    by_tree = len(minimal) == 1 and tree.is_round(minimal[0])
    if by_rabin != by_tree:
        raise AssertionError(
            "Rabin evaluation and unique-minimal-round characterisation disagree"
        )
    return by_rabin


def node_priorities(tree: ZielonkaTree) -> dict[int, int]:
    """Priorities decreasing with depth, parity-aligned so that round nodes
    are even; the unique minimal node recurring in a run then decides
    acceptance through the maximum."""
    base = {n: tree.height - tree.depth(n) for n in range(len(tree))}
    root_even = base[tree.root] % 2 == 0
    offset = 0 if root_even == tree.is_round(tree.root) else 1
    return {n: p + offset for n, p in base.items()}


@dataclass
class GfgRabinAutomaton:
    """The good-for-games Rabin automaton plus its construction context."""

    automaton: Automaton
    tree: ZielonkaTree
    eta: dict[int, int]
    provenance: dict[Transition, tuple[int, int, int]]

    @property
    def condition(self) -> MullerCondition:
        return self.tree.condition


def build_gfg_rabin(condition: MullerCondition) -> GfgRabinAutomaton:
    """The GFG Rabin automaton with memtree(Z_F) states recognising L_F."""
    tree = build_zielonka(condition)
    eta = tree.eta()
    size = tree.memtree()
    transitions: list[Transition] = []
    provenance: dict[Transition, tuple[int, int, int]] = {}
    # First leaf provenance wins when two leaves induce the same transition.
    for leaf in tree.leaves():
        for letter in condition.alphabet.symbols:
            witness, target = tree.step(leaf, letter)
            t = Transition(eta[leaf], letter, tree.node_name(witness), eta[target])
            if t not in provenance:
                provenance[t] = (leaf, witness, target)
                transitions.append(t)
    automaton = Automaton(
        range(1, size + 1),
        condition.alphabet,
        [eta[tree.leftmost_leaf(tree.root)]],
        transitions,
        node_rabin_pairs(tree),
    )
    return GfgRabinAutomaton(automaton, tree, eta, provenance)


def build_parity_automaton(condition: MullerCondition) -> Automaton:
    """The deterministic parity automaton whose states are the tree's leaves."""
    tree = build_zielonka(condition)
    prio = node_priorities(tree)
    colours = Alphabet([str(p) for p in sorted(set(prio.values()))])
    priorities = {str(p): p for p in set(prio.values())}
    transitions = []
    for leaf in tree.leaves():
        for letter in condition.alphabet.symbols:
            witness, target = tree.step(leaf, letter)
            transitions.append(Transition(leaf, letter, str(prio[witness]), target))
    return Automaton(
        tree.leaves(),
        condition.alphabet,
        [tree.leftmost_leaf(tree.root)],
        transitions,
        ParityCondition(colours, priorities),
    )


def check_quotient(parity: Automaton, gfg: GfgRabinAutomaton, eta: dict[int, int]) -> bool:
    """True iff merging the parity automaton's leaf states through eta and
    relabelling each transition by its witness node yields exactly the GFG
    Rabin automaton's transitions."""
    tree = gfg.tree
    if set(parity.states) != set(tree.leaves()):
        raise ConditionError("parity automaton does not run over this tree's leaves")
    if set(eta) != set(tree.leaves()):
        raise ConditionError("eta labelling does not cover this tree's leaves")
    merged = set()
    for t in parity.transitions:
        witness, expected_target = tree.step(t.src, t.letter)
        if expected_target != t.dst:
            raise ConditionError("parity automaton does not follow this tree's jumps")
        merged.add(Transition(eta[t.src], t.letter, tree.node_name(witness), eta[t.dst]))
    return merged == set(gfg.automaton.transitions)


class Resolver:
    """Letter-by-letter nondeterminism resolution for the GFG automaton,
    keeping the current tree leaf as memory; the automaton state always
    equals eta of that leaf."""

    def __init__(self, gfg: GfgRabinAutomaton):
        self.gfg = gfg
        self.leaf = gfg.tree.leftmost_leaf(gfg.tree.root)

    @property
    def state(self):
        return self.gfg.eta[self.leaf]

    def step(self, letter: str) -> Transition:
        tree = self.gfg.tree
        witness, target = tree.step(self.leaf, letter)
        t = Transition(
            self.gfg.eta[self.leaf], letter, tree.node_name(witness), self.gfg.eta[target]
        )
        self.leaf = target
        return t


def resolve_run(gfg: GfgRabinAutomaton, w: LassoWord) -> tuple[Run, bool]:
    """The run of the GFG automaton driven by the leaf-memory resolver.

    Accepting whenever the lasso's letter set is a member of the condition:
    this is the good-for-games guarantee.
    """
    resolver = Resolver(gfg)
    steps: list[Transition] = []
    for letter in w.prefix:
        steps.append(resolver.step(letter))
    seen: dict[int, int] = {}
    while resolver.leaf not in seen:
        seen[resolver.leaf] = len(steps)
        for letter in w.period:
            steps.append(resolver.step(letter))
    start = seen[resolver.leaf]
    run = Run(tuple(steps[:start]), tuple(steps[start:]))
    accepted = accepts_colour_set(gfg.automaton.acceptance, run.cycle_colours())
    return run, accepted


def provenance_document(gfg: GfgRabinAutomaton) -> list[dict]:
    """The transition -> (leaf, witness node, leaf') map as a plain document."""
    tree = gfg.tree
    rows = []
    for t in gfg.automaton.transitions:
        leaf, witness, target = gfg.provenance[t]
        rows.append(
            {
                "src": t.src,
                "letter": t.letter,
                "colour": t.colour,
                "dst": t.dst,
                "from_leaf": tree.node_name(leaf),
                "witness": tree.node_name(witness),
                "to_leaf": tree.node_name(target),
            }
        )
    return rows
