"""Transition-based omega-automata over output colours.

Acceptance (Muller, Rabin, or parity) is evaluated on the colours that a
run produces infinitely often.  Lasso words give finite witnesses for
membership; duplicated edges can be merged without changing the language.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Union

from ._graph import reachable, strongly_connected_components
from .conditions import (
    Alphabet,
    AnyCondition,
    ConditionError,
    LassoWord,
    MullerCondition,
    ParityCondition,
    RabinCondition,
)

State = Hashable


class AutomatonError(ValueError):
    """Malformed automaton or unsupported operation for its acceptance type."""


@dataclass(frozen=True)
class Transition:
    src: State
    letter: str
    colour: str
    dst: State


def condition_colours(acceptance: AnyCondition) -> Alphabet:
    if isinstance(acceptance, MullerCondition):
        return acceptance.alphabet
    return acceptance.colours


def accepts_colour_set(acceptance: AnyCondition, colours: Iterable[str]) -> bool:
    alphabet = condition_colours(acceptance)
    return acceptance.accepts_mask(alphabet.letters(colours).mask)


class Automaton:
    """A non-deterministic automaton with colours on transitions."""

    def __init__(
        self,
        states: Sequence[State],
        alphabet: Alphabet,
        initial: Iterable[State],
        transitions: Iterable[Transition | tuple],
        acceptance: AnyCondition,
    ):
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise AutomatonError("duplicate states")
        self.alphabet = alphabet
        self.acceptance = acceptance
        self.initial = tuple(initial)
        if not self.initial:
            raise AutomatonError("at least one initial state is required")
        known = set(self.states)
        for q in self.initial:
            if q not in known:
                raise AutomatonError(f"initial state {q!r} not among the states")
        colours = condition_colours(acceptance)
        seen: set[Transition] = set()
        ordered: list[Transition] = []
        for t in transitions:
            t = t if isinstance(t, Transition) else Transition(*t)
            if t.src not in known or t.dst not in known:
                raise AutomatonError(f"transition {t} uses an unknown state")
            if t.letter not in alphabet:
                raise AutomatonError(f"transition letter {t.letter!r} not in input alphabet")
            if t.colour not in colours:
                raise AutomatonError(f"transition colour {t.colour!r} not in output alphabet")
            if t not in seen:
                seen.add(t)
                ordered.append(t)
        self.transitions = tuple(ordered)
        self._by_source: dict[tuple[State, str], list[Transition]] = {}
        for t in self.transitions:
            self._by_source.setdefault((t.src, t.letter), []).append(t)

    def transitions_from(self, state: State, letter: str) -> tuple[Transition, ...]:
        return tuple(self._by_source.get((state, letter), ()))

    @property
    def is_deterministic(self) -> bool:
        """Single initial state and exactly one transition per (state, letter)."""
        if len(self.initial) != 1:
            return False
        return all(
            len(self._by_source.get((q, a), ())) == 1
            for q in self.states
            for a in self.alphabet
        )

    @property
    def colour_alphabet(self) -> Alphabet:
        return condition_colours(self.acceptance)

    def state_index(self, state: State) -> int:
        return self.states.index(state)

    def __repr__(self) -> str:
        kind = type(self.acceptance).__name__.replace("Condition", "")
        return (
            f"Automaton({len(self.states)} states, {len(self.transitions)} transitions, "
            f"{kind} acceptance)"
        )


@dataclass(frozen=True)
class Run:
    """A finite presentation of an ultimately periodic run."""

    prefix: tuple[Transition, ...]
    cycle: tuple[Transition, ...]

    def cycle_colours(self) -> frozenset[str]:
        return frozenset(t.colour for t in self.cycle)


def run_deterministic(automaton: Automaton, w: LassoWord) -> tuple[Run, bool]:
    """The unique run of a deterministic complete automaton on u v^omega,
    and whether the colours of its eventual cycle satisfy the acceptance."""
    if not automaton.is_deterministic:
        raise AutomatonError("run_deterministic needs a deterministic, complete automaton")
    state = automaton.initial[0]
    steps: list[Transition] = []

    def advance(letter: str) -> None:
        nonlocal state
        options = automaton.transitions_from(state, letter)
        t = options[0]
        steps.append(t)
        state = t.dst

    for letter in w.prefix:
        advance(letter)
    # Iterate whole periods until the state at the period boundary repeats;
    # the transitions between the two occurrences form the eventual cycle.
    seen: dict[State, int] = {}
    while state not in seen:
        seen[state] = len(steps)
        for letter in w.period:
            advance(letter)
    start = seen[state]
    run = Run(tuple(steps[:start]), tuple(steps[start:]))
    accepted = accepts_colour_set(automaton.acceptance, run.cycle_colours())
    return run, accepted


class RabinLassoChecker:
    """Nondeterministic membership oracle for Rabin automata on lasso words.

    Searches the product of states with the lasso phase for a reachable
    cycle avoiding some pair's red colours while using one of its greens.
    Period analyses are memoised, so sweeping many lassos against one
    automaton stays cheap.
    """

    def __init__(self, automaton: Automaton):
        if not isinstance(automaton.acceptance, RabinCondition):
            raise AutomatonError("lasso membership oracle expects Rabin acceptance")
        self.automaton = automaton
        self._period_memo: dict[tuple[str, ...], dict[State, bool]] = {}
        self._prefix_memo: dict[tuple[str, ...], frozenset[State]] = {}

    def accepts(self, w: LassoWord) -> bool:
        reach = self._reach_after(w.prefix)
        if not reach:
            return False
        good_from = self._analyse_period(w.period)
        return any(good_from.get(q, False) for q in reach)

    def _reach_after(self, prefix: tuple[str, ...]) -> frozenset[State]:
        if prefix in self._prefix_memo:
            return self._prefix_memo[prefix]
        if not prefix:
            out = frozenset(self.automaton.initial)
        else:
            before = self._reach_after(prefix[:-1])
            out = frozenset(
                t.dst
                for q in before
                for t in self.automaton.transitions_from(q, prefix[-1])
            )
        self._prefix_memo[prefix] = out
        return out

    def _analyse_period(self, period: tuple[str, ...]) -> dict[State, bool]:
        if period in self._period_memo:
            return self._period_memo[period]
        aut = self.automaton
        length = len(period)
        nodes = [(q, i) for q in aut.states for i in range(length)]
        edges: dict[tuple[State, int], list[tuple[tuple[State, int], str]]] = {
            node: [] for node in nodes
        }
        for q, i in nodes:
            for t in aut.transitions_from(q, period[i]):
                edges[(q, i)].append(((t.dst, (i + 1) % length), t.colour))

        pairs = aut.acceptance.pairs
        winning_nodes: set[tuple[State, int]] = set()
        for green, red in pairs:
            def safe_succ(node):
                return [dst for dst, colour in edges[node] if colour not in red]

            for component in strongly_connected_components(nodes, safe_succ):
                members = set(component)
                has_green_inside = any(
                    dst in members and colour in green
                    for node in component
                    for dst, colour in edges[node]
                    if colour not in red
                )
                if has_green_inside:
                    winning_nodes.update(members)
        # A lasso from q is accepted iff some winning cycle is reachable
        # from (q, 0) in the full period graph.
        out = {
            q: bool(
                reachable([(q, 0)], lambda n: [dst for dst, _ in edges[n]])
                & winning_nodes
            )
            for q in aut.states
        }
        self._period_memo[period] = out
        return out


def accepts_lasso(automaton: Automaton, w: LassoWord) -> bool:
    """True iff some run of the Rabin automaton over u v^omega is accepting."""
    return RabinLassoChecker(automaton).accepts(w)


def has_duplicated_edges(automaton: Automaton) -> bool:
    """True iff two transitions share source, input letter, and target."""
    seen = set()
    for t in automaton.transitions:
        key = (t.src, t.letter, t.dst)
        if key in seen:
            return True
        seen.add(key)
    return False


def _merge_bundles(automaton: Automaton) -> list[tuple[State, str, State, tuple[str, ...]]]:
    """Group parallel transitions; bundles keep the output-colour order."""
    colour_idx = {c: i for i, c in enumerate(automaton.colour_alphabet.symbols)}
    groups: dict[tuple[State, str, State], list[str]] = {}
    for t in automaton.transitions:
        groups.setdefault((t.src, t.letter, t.dst), []).append(t.colour)
    state_idx = {q: i for i, q in enumerate(automaton.states)}
    letter_idx = {a: i for i, a in enumerate(automaton.alphabet.symbols)}
    out = []
    for (src, letter, dst), colours in groups.items():
        bundle = tuple(sorted(set(colours), key=colour_idx.__getitem__))
        out.append((src, letter, dst, bundle))
    out.sort(key=lambda g: (state_idx[g[0]], letter_idx[g[1]], state_idx[g[2]]))
    return out


def _bundle_names(
    automaton: Automaton, bundles: Iterable[tuple[str, ...]]
) -> dict[tuple[str, ...], str]:
    """A fresh colour name per multi-colour bundle, rendered like "(ab)"."""
    taken = set(automaton.colour_alphabet.symbols)
    names: dict[tuple[str, ...], str] = {}
    for bundle in bundles:
        if bundle in names:
            continue
        if len(bundle) == 1:
            names[bundle] = bundle[0]
            continue
        name = "(%s)" % "".join(bundle)
        while name in taken:
            name += "'"
        taken.add(name)
        names[bundle] = name
    return names


def simplify_rabin(automaton: Automaton) -> Automaton:
    """Merge duplicated edges of a Rabin automaton, preserving the language.

    Each merged transition gets one colour standing for its bundle: green
    for pair i when some bundled colour was green, red when all of them
    were red.  States and the number of pairs are unchanged.
    """
    if not isinstance(automaton.acceptance, RabinCondition):
        raise AutomatonError("simplify_rabin expects Rabin acceptance")
    merged = _merge_bundles(automaton)
    names = _bundle_names(automaton, (b for *_x, b in merged))
    fresh = [
        names[b] for *_x, b in merged
        if len(b) > 1 and names[b] not in automaton.colour_alphabet
    ]
    seen_fresh: list[str] = []
    for name in fresh:
        if name not in seen_fresh:
            seen_fresh.append(name)
    colours = Alphabet(tuple(automaton.colour_alphabet.symbols) + tuple(seen_fresh))

    old = automaton.acceptance
    pairs = []
    for green, red in old.pairs:
        new_green = list(green)
        new_red = list(red)
        for bundle, name in names.items():
            if len(bundle) == 1:
                continue
            if any(c in green for c in bundle):
                new_green.append(name)
            if all(c in red for c in bundle):
                new_red.append(name)
        pairs.append((new_green, new_red))

    transitions = [
        Transition(src, letter, names[bundle], dst)
        for src, letter, dst, bundle in merged
    ]
    return Automaton(
        automaton.states,
        automaton.alphabet,
        automaton.initial,
        transitions,
        RabinCondition(colours, pairs),
    )


def simplify_muller(automaton: Automaton, budget: int = 1 << 18) -> Automaton:
    """Merge duplicated edges of a transition-coloured Muller automaton.

    A merged colour set is accepting when non-empty sub-bundles can be
    picked whose union is accepting in the original automaton; this is
    materialised by scanning every subset of the merged colour alphabet,
    which is exponential and therefore guarded by `budget`.
    """
    if not isinstance(automaton.acceptance, MullerCondition):
        raise AutomatonError("simplify_muller expects Muller acceptance")
    merged = _merge_bundles(automaton)
    names = _bundle_names(automaton, (b for *_x, b in merged))
    seen_fresh: list[str] = []
    for *_x, bundle in merged:
        name = names[bundle]
        if name not in automaton.colour_alphabet and name not in seen_fresh:
            seen_fresh.append(name)
    colours = Alphabet(tuple(automaton.colour_alphabet.symbols) + tuple(seen_fresh))
    bundle_of: dict[str, frozenset[str]] = {c: frozenset([c]) for c in automaton.colour_alphabet}
    for bundle, name in names.items():
        bundle_of[name] = frozenset(bundle)

    if (1 << len(colours)) > budget:
        raise AutomatonError(
            f"bundle-subset enumeration needs {1 << len(colours)} subsets, over budget {budget}"
        )

    old = automaton.acceptance
    old_alphabet = old.alphabet
    old_members = [frozenset(old_alphabet.from_mask(m)) for m in old.masks]
    symbols = colours.symbols
    accepted = []
    for mask in range(1, 1 << len(symbols)):
        chosen = [symbols[i] for i in range(len(symbols)) if mask >> i & 1]
        union = frozenset().union(*(bundle_of[c] for c in chosen))
        for member in old_members:
            # Witness form of the sub-bundle rule: picking S_x = member & bundle(x)
            # works exactly when the member sits inside the union and meets
            # every chosen bundle.
            if member <= union and all(member & bundle_of[c] for c in chosen):
                accepted.append(chosen)
                break

    transitions = [
        Transition(src, letter, names[bundle], dst)
        for src, letter, dst, bundle in merged
    ]
    return Automaton(
        automaton.states,
        automaton.alphabet,
        automaton.initial,
        transitions,
        MullerCondition(colours, accepted),
    )


# -- HOA / DOT export ---------------------------------------------------------


def _parity_formula(top: int) -> str:
    atom = ("Inf(%d)" if top % 2 == 0 else "Fin(%d)") % top
    if top == 0:
        return atom
    inner = _parity_formula(top - 1)
    wrapped = inner if " " not in inner else f"({inner})"
    op = "|" if top % 2 == 0 else "&"
    return f"{atom} {op} {wrapped}"


def _transition_marks(acceptance: AnyCondition, colour: str) -> tuple[int, ...]:
    if isinstance(acceptance, RabinCondition):
        marks = []
        for i, (green, red) in enumerate(acceptance.pairs):
            if colour in red:
                marks.append(2 * i)
            if colour in green:
                marks.append(2 * i + 1)
        return tuple(marks)
    if isinstance(acceptance, ParityCondition):
        return (acceptance.priority(colour),)
    raise AutomatonError("HOA export supports Rabin and parity acceptance only")


def export_hoa(automaton: Automaton) -> str:
    """HOA v1 text with transition-based acceptance.

    Input letter k is encoded as the minterm where only AP k holds.
    """
    acc = automaton.acceptance
    if isinstance(acc, RabinCondition):
        r = len(acc.pairs)
        acc_name = f"Rabin {r}"
        formula = (
            "|".join(f"(Fin({2 * i})&Inf({2 * i + 1}))" for i in range(r)) if r else "f"
        )
        n_sets = 2 * r
    elif isinstance(acc, ParityCondition):
        n_sets = max(acc.priorities.values()) + 1
        acc_name = f"parity max even {n_sets}"
        formula = _parity_formula(n_sets - 1)
    else:
        raise AutomatonError("HOA export supports Rabin and parity acceptance only")

    idx = {q: i for i, q in enumerate(automaton.states)}
    lines = ["HOA: v1", f"States: {len(automaton.states)}"]
    for q in sorted(automaton.initial, key=idx.__getitem__):
        lines.append(f"Start: {idx[q]}")
    aps = " ".join(f'"{a}"' for a in automaton.alphabet.symbols)
    lines.append(f"AP: {len(automaton.alphabet)} {aps}")
    lines.append(f"acc-name: {acc_name}")
    lines.append(f"Acceptance: {n_sets} {formula}")
    lines.append("properties: trans-labels explicit-labels trans-acc")
    lines.append("--BODY--")
    letter_idx = {a: i for i, a in enumerate(automaton.alphabet.symbols)}
    n_ap = len(automaton.alphabet)
    for q in automaton.states:
        lines.append(f"State: {idx[q]}")
        rows = []
        for a in automaton.alphabet.symbols:
            for t in automaton.transitions_from(q, a):
                rows.append((letter_idx[a], idx[t.dst], _transition_marks(acc, t.colour)))
        for ap, dst, marks in sorted(rows):
            label = "&".join(("%d" if i == ap else "!%d") % i for i in range(n_ap))
            mark_text = (" {%s}" % " ".join(map(str, marks))) if marks else ""
            lines.append(f"[{label}] {dst}{mark_text}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


def parse_hoa(text: str) -> Automaton:
    """Parse a document produced by export_hoa.

    Output colours are reconstructed from acceptance marks, so the result
    equals the exported automaton up to colour renaming.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    headers: dict[str, list[str]] = {}
    body_at = None
    for i, line in enumerate(lines):
        if line == "--BODY--":
            body_at = i
            break
        key, _, value = line.partition(" ")
        headers.setdefault(key.rstrip(":"), []).append(value)
    if body_at is None:
        raise AutomatonError("HOA document has no --BODY-- marker")

    n_states = int(headers["States"][0])
    starts = [int(v) for v in headers.get("Start", [])]
    ap_parts = headers["AP"][0].split('"')[1::2]
    alphabet = Alphabet(ap_parts)
    acc_name = headers["acc-name"][0]

    # Transitions, keyed by the current "State:" block.
    transitions: list[tuple[int, str, tuple[int, ...], int]] = []
    current = None
    for line in lines[body_at + 1 :]:
        if line == "--END--":
            break
        if line.startswith("State:"):
            current = int(line.split()[1])
            continue
        if not line.startswith("["):
            raise AutomatonError(f"unexpected HOA body line: {line!r}")
        label, rest = line[1:].split("]", 1)
        positive = [term for term in label.split("&") if not term.startswith("!")]
        if len(positive) != 1:
            raise AutomatonError(f"expected an exactly-one letter encoding: {label!r}")
        letter = alphabet.symbols[int(positive[0])]
        rest = rest.strip()
        if "{" in rest:
            dst_text, marks_text = rest.split("{", 1)
            marks = tuple(sorted(int(m) for m in marks_text.rstrip("}").split()))
        else:
            dst_text, marks = rest, ()
        transitions.append((current, letter, marks, int(dst_text.strip())))

    mark_sets = sorted({marks for _, _, marks, _ in transitions})
    colour_names = {marks: ("-" if not marks else "m" + "_".join(map(str, marks))) for marks in mark_sets}
    colours = Alphabet([colour_names[m] for m in mark_sets]) if mark_sets else Alphabet(["-"])

    acceptance: AnyCondition
    if acc_name.startswith("Rabin"):
        r = int(acc_name.split()[1]) if len(acc_name.split()) > 1 else 0
        pairs = []
        for i in range(r):
            green = [colour_names[m] for m in mark_sets if 2 * i + 1 in m]
            red = [colour_names[m] for m in mark_sets if 2 * i in m]
            pairs.append((green, red))
        acceptance = RabinCondition(colours, pairs)
    elif acc_name.startswith("parity max even"):
        priorities = {}
        for marks in mark_sets:
            if len(marks) != 1:
                raise AutomatonError("parity transitions must carry exactly one mark")
            priorities[colour_names[marks]] = marks[0]
        if not mark_sets:
            priorities["-"] = 1
        acceptance = ParityCondition(colours, priorities)
    else:
        raise AutomatonError(f"unsupported acc-name: {acc_name!r}")

    return Automaton(
        range(n_states),
        alphabet,
        starts,
        [
            Transition(src, letter, colour_names[marks], dst)
            for src, letter, marks, dst in transitions
        ],
        acceptance,
    )


def hoa_signature(automaton: Automaton):
    """What HOA preserves: sizes, start states, and mark-labelled edges."""
    idx = {q: i for i, q in enumerate(automaton.states)}
    return (
        len(automaton.states),
        tuple(sorted(idx[q] for q in automaton.initial)),
        frozenset(
            (idx[t.src], t.letter, _transition_marks(automaton.acceptance, t.colour), idx[t.dst])
            for t in automaton.transitions
        ),
    )


def export_dot(automaton: Automaton) -> str:
    idx = {q: i for i, q in enumerate(automaton.states)}
    lines = ["digraph automaton {", "  rankdir=LR;"]
    for q in automaton.states:
        lines.append(f'  q{idx[q]} [shape=circle, label="{q}"];')
    for q in sorted(automaton.initial, key=idx.__getitem__):
        lines.append(f"  init{idx[q]} [shape=point];")
        lines.append(f"  init{idx[q]} -> q{idx[q]};")
    letter_idx = {a: i for i, a in enumerate(automaton.alphabet.symbols)}
    rows = sorted(
        automaton.transitions,
        key=lambda t: (idx[t.src], letter_idx[t.letter], idx[t.dst], t.colour),
    )
    for t in rows:
        lines.append(f'  q{idx[t.src]} -> q{idx[t.dst]} [label="{t.letter} : {t.colour}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
