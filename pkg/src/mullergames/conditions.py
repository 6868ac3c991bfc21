"""Alphabets, letter sets, and Muller / Rabin / parity acceptance conditions.

Letter sets are bit-indexed subsets of a fixed alphabet, so all the
subset combinatorics downstream (trees, acceptance tests, condition
graphs) reduce to integer mask operations.  Everything here is immutable
after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union


class ConditionError(ValueError):
    """Malformed condition, unknown letter, or mismatched alphabet."""


class Alphabet:
    """An ordered list of distinct colour names with stable indices 0..n-1."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[str]):
        syms = tuple(symbols)
        if not syms:
            raise ConditionError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise ConditionError("alphabet symbols must be unique")
        self.symbols = syms
        self._index = {s: i for i, s in enumerate(syms)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)!r})"

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ConditionError(f"letter {symbol!r} not in alphabet") from None

    def letters(self, members: "LetterLike") -> "LetterSet":
        """Coerce a LetterSet or an iterable of symbols into a LetterSet."""
        if isinstance(members, LetterSet):
            if members.alphabet != self:
                raise ConditionError("letter set belongs to a different alphabet")
            return members
        mask = 0
        for symbol in members:
            mask |= 1 << self.index(symbol)
        return LetterSet(self, mask)

    def from_mask(self, mask: int) -> "LetterSet":
        if mask < 0 or mask >> len(self.symbols):
            raise ConditionError("mask out of range for this alphabet")
        return LetterSet(self, mask)

    def full(self) -> "LetterSet":
        return LetterSet(self, (1 << len(self.symbols)) - 1)

    def empty(self) -> "LetterSet":
        return LetterSet(self, 0)

    def subsets(self) -> Iterator["LetterSet"]:
        """All 2^n subsets, in mask order."""
        for mask in range(1 << len(self.symbols)):
            yield LetterSet(self, mask)


@dataclass(frozen=True)
class LetterSet:
    """A subset of an alphabet, stored as a bit mask over symbol indices."""

    alphabet: Alphabet
    mask: int

    def __contains__(self, symbol: str) -> bool:
        return bool(self.mask >> self.alphabet.index(symbol) & 1)

    def __iter__(self) -> Iterator[str]:
        for i, symbol in enumerate(self.alphabet.symbols):
            if self.mask >> i & 1:
                yield symbol

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __le__(self, other: "LetterSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __or__(self, other: "LetterSet") -> "LetterSet":
        self._check(other)
        return LetterSet(self.alphabet, self.mask | other.mask)

    def __and__(self, other: "LetterSet") -> "LetterSet":
        self._check(other)
        return LetterSet(self.alphabet, self.mask & other.mask)

    def __sub__(self, other: "LetterSet") -> "LetterSet":
        self._check(other)
        return LetterSet(self.alphabet, self.mask & ~other.mask)

    def __repr__(self) -> str:
        return "{%s}" % ",".join(self)

    def _check(self, other: "LetterSet") -> None:
        if self.alphabet != other.alphabet:
            raise ConditionError("letter sets over different alphabets")

    def names(self) -> tuple[str, ...]:
        return tuple(self)


LetterLike = Union[LetterSet, Iterable[str]]


class MullerCondition:
    """An acceptance family F of non-empty letter sets over an alphabet."""

    __slots__ = ("alphabet", "masks")

    def __init__(self, alphabet: Alphabet, accepting: Iterable[LetterLike]):
        self.alphabet = alphabet
        masks = []
        for member in accepting:
            mask = alphabet.letters(member).mask
            if mask == 0:
                raise ConditionError("accepting sets must be non-empty")
            if mask in masks:
                raise ConditionError(
                    "duplicate accepting set {%s}" % ",".join(alphabet.from_mask(mask))
                )
            masks.append(mask)
        self.masks = frozenset(masks)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MullerCondition)
            and self.alphabet == other.alphabet
            and self.masks == other.masks
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.masks))

    def __repr__(self) -> str:
        return f"MullerCondition({self.alphabet!r}, {sorted(self.masks)!r})"

    def members(self) -> tuple[LetterSet, ...]:
        return tuple(self.alphabet.from_mask(m) for m in sorted(self.masks))

    def accepts_mask(self, mask: int) -> bool:
        return mask in self.masks


class RabinCondition:
    """Rabin pairs (G_i, R_i) over an output alphabet, with G_i and R_i disjoint."""

    __slots__ = ("colours", "pairs")

    def __init__(
        self,
        colours: Alphabet,
        pairs: Iterable[tuple[LetterLike, LetterLike]],
    ):
        self.colours = colours
        built = []
        for green, red in pairs:
            g = colours.letters(green)
            r = colours.letters(red)
            if g.mask & r.mask:
                raise ConditionError("green and red sets of a Rabin pair must be disjoint")
            built.append((g, r))
        self.pairs = tuple(built)

    def __repr__(self) -> str:
        return f"RabinCondition({self.colours!r}, {self.pairs!r})"

    def __len__(self) -> int:
        return len(self.pairs)

    def pair_accepts_mask(self, j: int, mask: int) -> bool:
        g, r = self.pairs[j]
        return bool(mask & g.mask) and not mask & r.mask

    def accepts_mask(self, mask: int) -> bool:
        return any(self.pair_accepts_mask(j, mask) for j in range(len(self.pairs)))

    def pair_colour(self, j: int, colour: str) -> str:
        """The green / red / orange status of an output colour for pair j."""
        g, r = self.pairs[j]
        if colour in g:
            return "green"
        if colour in r:
            return "red"
        return "orange"


class ParityCondition:
    """A priority for every output colour; accepting iff the max priority
    seen infinitely often is even."""

    __slots__ = ("colours", "priorities")

    def __init__(self, colours: Alphabet, priorities: Mapping[str, int]):
        self.colours = colours
        missing = [c for c in colours if c not in priorities]
        extra = [c for c in priorities if c not in colours]
        if missing or extra:
            raise ConditionError(
                f"priorities must cover the colour alphabet exactly "
                f"(missing {missing!r}, extra {extra!r})"
            )
        self.priorities = {c: int(priorities[c]) for c in colours}

    def __repr__(self) -> str:
        return f"ParityCondition({self.colours!r}, {self.priorities!r})"

    def priority(self, colour: str) -> int:
        try:
            return self.priorities[colour]
        except KeyError:
            raise ConditionError(f"colour {colour!r} has no priority") from None

    def accepts_mask(self, mask: int) -> bool:
        if mask == 0:
            raise ConditionError("empty letter set has no maximal priority")
        best = max(
            self.priorities[c]
            for i, c in enumerate(self.colours.symbols)
            if mask >> i & 1
        )
        return best % 2 == 0


AnyCondition = Union[MullerCondition, RabinCondition, ParityCondition]


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word prefix . period^omega."""

    prefix: tuple[str, ...]
    period: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.period:
            raise ConditionError("lasso period must be non-empty")

    @classmethod
    def from_letters(cls, prefix: str, period: str) -> "LassoWord":
        """Build a lasso from strings of single-character letters."""
        return cls(tuple(prefix), tuple(period))

    def __repr__(self) -> str:
        return f"{''.join(self.prefix)}({''.join(self.period)})^w"


def inf_set(w: LassoWord) -> frozenset[str]:
    """The letters occurring infinitely often in w, i.e. the letters of its period."""
    return frozenset(w.period)


def satisfies_muller(cond: MullerCondition, letters: LetterLike) -> bool:
    """True iff the set of infinitely occurring letters is a member of F.

    The empty set never satisfies: members of F are non-empty.
    """
    return cond.accepts_mask(cond.alphabet.letters(letters).mask)


def satisfies_rabin(cond: RabinCondition, letters: LetterLike) -> bool:
    """True iff some pair sees a green colour in `letters` and no red one."""
    current = cond.colours.letters(letters)
    if not current:
        raise ConditionError("Rabin satisfaction is undefined on the empty set")
    return cond.accepts_mask(current.mask)


def satisfies_parity(cond: ParityCondition, letters: LetterLike) -> bool:
    """True iff the maximum priority over `letters` is even."""
    current = cond.colours.letters(letters)
    if not current:
        raise ConditionError("parity satisfaction is undefined on the empty set")
    return cond.accepts_mask(current.mask)


def restrict(cond: MullerCondition, letters: LetterLike) -> MullerCondition:
    """The restriction F|_C: alphabet C, accepting sets the members of F inside C."""
    sub = cond.alphabet.letters(letters)
    if not sub:
        raise ConditionError("cannot restrict a condition to the empty letter set")
    members = []
    for mask in sorted(cond.masks):
        if mask & ~sub.mask == 0:
            members.append(list(cond.alphabet.from_mask(mask)))
    return MullerCondition(Alphabet(sub.names()), members)


def rabin_from_parity(cond: ParityCondition) -> RabinCondition:
    """The Rabin condition equivalent to a max-even parity condition.

    One pair per even priority d: green = colours of priority d,
    red = colours of priority above d.
    """
    pairs = []
    for d in sorted({p for p in cond.priorities.values() if p % 2 == 0}):
        green = [c for c, p in cond.priorities.items() if p == d]
        red = [c for c, p in cond.priorities.items() if p > d]
        pairs.append((green, red))
    return RabinCondition(cond.colours, pairs)


def condition_from_dict(doc: Mapping) -> MullerCondition:
    """Build a Muller condition from the document format used by the CLI.

    Expected fields: `alphabet` (list of strings) and `accepting`
    (list of lists of strings).  Duplicate accepting sets are an error.
    """
    if not isinstance(doc, Mapping):
        raise ConditionError("condition document must be an object")
    for field in ("alphabet", "accepting"):
        if field not in doc:
            raise ConditionError(f"condition document lacks field {field!r}")
    alphabet = Alphabet(_string_list(doc["alphabet"], "alphabet"))
    accepting = doc["accepting"]
    if not isinstance(accepting, Sequence) or isinstance(accepting, (str, bytes)):
        raise ConditionError("field 'accepting' must be a list of letter lists")
    return MullerCondition(
        alphabet,
        [_string_list(member, "accepting set") for member in accepting],
    )


def load_condition(path: str) -> MullerCondition:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as err:
            raise ConditionError(f"{path}: invalid JSON ({err})") from None
    return condition_from_dict(doc)


def condition_to_dict(cond: MullerCondition) -> dict:
    return {
        "alphabet": list(cond.alphabet.symbols),
        "accepting": [list(member) for member in cond.members()],
    }


def _string_list(value: object, what: str) -> list[str]:
    if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
        raise ConditionError(f"{what} must be a list of strings")
    out = []
    for item in value:
        if not isinstance(item, str):
            raise ConditionError(f"{what} must contain only strings, got {item!r}")
        out.append(item)
    return out
