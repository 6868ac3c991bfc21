"""Ordered Zielonka trees: construction, memtree, cyclic jumps, leaf numbering.

The tree of a Muller condition alternates round (accepting) and square
(rejecting) nodes; every node's children carry the maximal subsets of its
label with the opposite membership.  Node ids are dense integers in BFS
construction order and children are kept sorted by label bit pattern, so
the whole structure is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .conditions import ConditionError, LetterSet, MullerCondition


@dataclass
class ZNode:
    ident: int
    label: LetterSet
    round: bool
    parent: Optional[int]
    children: list[int] = field(default_factory=list)


ChildOrder = Callable[[list[int]], list[int]]


class ZielonkaTree:
    """The ordered Zielonka tree of a Muller condition."""

    def __init__(self, condition: MullerCondition, child_order: Optional[ChildOrder] = None):
        self.condition = condition
        self.alphabet = condition.alphabet
        order = child_order if child_order is not None else sorted
        self.nodes: list[ZNode] = []
        root_mask = self.alphabet.full().mask
        self._add_node(root_mask, None)
        # BFS so that ids go level by level, left to right.
        head = 0
        while head < len(self.nodes):
            node = self.nodes[head]
            for mask in order(_maximal_flipped_subsets(condition, node.label.mask)):
                node.children.append(self._add_node(mask, node.ident))
            head += 1
        self._memtree: dict[int, int] = {}
        self._depth: dict[int, int] = {}
        for node in self.nodes:
            self._depth[node.ident] = (
                0 if node.parent is None else self._depth[node.parent] + 1
            )
        for node in reversed(self.nodes):
            kids = node.children
            if not kids:
                self._memtree[node.ident] = 1
            elif node.round:
                self._memtree[node.ident] = sum(self._memtree[k] for k in kids)
            else:
                self._memtree[node.ident] = max(self._memtree[k] for k in kids)

    def _add_node(self, mask: int, parent: Optional[int]) -> int:
        ident = len(self.nodes)
        label = self.alphabet.from_mask(mask)
        self.nodes.append(ZNode(ident, label, self.condition.accepts_mask(mask), parent))
        return ident

    # -- structure queries ------------------------------------------------

    @property
    def root(self) -> int:
        return 0

    def __len__(self) -> int:
        return len(self.nodes)

    def label(self, n: int) -> LetterSet:
        return self.nodes[n].label

    def is_round(self, n: int) -> bool:
        return self.nodes[n].round

    def is_leaf(self, n: int) -> bool:
        return not self.nodes[n].children

    def children(self, n: int) -> tuple[int, ...]:
        return tuple(self.nodes[n].children)

    def parent(self, n: int) -> Optional[int]:
        return self.nodes[n].parent

    def depth(self, n: int) -> int:
        return self._depth[n]

    @property
    def height(self) -> int:
        return 1 + max(self._depth.values())

    def node_name(self, n: int) -> str:
        return f"n{n}"

    def ancestors(self, n: int) -> list[int]:
        """Path from the root down to n, inclusive."""
        path = [n]
        while self.nodes[path[-1]].parent is not None:
            path.append(self.nodes[path[-1]].parent)
        path.reverse()
        return path

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff a lies on the root path of b (a node is its own ancestor)."""
        cur: Optional[int] = b
        while cur is not None:
            if cur == a:
                return True
            cur = self.nodes[cur].parent
        return False

    def leaves(self) -> tuple[int, ...]:
        """All leaves in leftmost-first (depth-first) order."""
        out: list[int] = []
        stack = [self.root]
        while stack:
            n = stack.pop()
            kids = self.nodes[n].children
            if not kids:
                out.append(n)
            else:
                stack.extend(reversed(kids))
        return tuple(out)

    def leftmost_leaf(self, n: int) -> int:
        while self.nodes[n].children:
            n = self.nodes[n].children[0]
        return n

    def leaves_below(self, n: int) -> tuple[int, ...]:
        out = []
        stack = [n]
        while stack:
            m = stack.pop()
            kids = self.nodes[m].children
            if not kids:
                out.append(m)
            else:
                stack.extend(reversed(kids))
        return tuple(out)

    # -- navigation --------------------------------------------------------

    def next_child(self, n: int, c: int) -> int:
        kids = self.nodes[n].children
        try:
            i = kids.index(c)
        except ValueError:
            raise ConditionError(f"node {c} is not a child of node {n}") from None
        return kids[(i + 1) % len(kids)]

    def jump(self, n: int, leaf: int) -> tuple[frozenset[int], int]:
        """Leaves reachable by going up to n, switching to its next child, and
        re-descending; plus the leftmost among them."""
        if n == leaf:
            return frozenset([leaf]), leaf
        if not self.is_ancestor(n, leaf):
            raise ConditionError(f"node {n} is not an ancestor of leaf {leaf}")
        branch = leaf
        while self.nodes[branch].parent != n:
            branch = self.nodes[branch].parent
        target = self.next_child(n, branch)
        below = self.leaves_below(target)
        return frozenset(below), self.leftmost_leaf(target)

    def deepest_ancestor_containing(self, leaf: int, letter: str) -> int:
        """The maximal (deepest) ancestor of `leaf` whose label contains `letter`.

        The root is labelled with the full alphabet, so this always exists.
        """
        idx = self.alphabet.index(letter)
        best = None
        for n in self.ancestors(leaf):
            if self.nodes[n].label.mask >> idx & 1:
                best = n
        if best is None:
            raise ConditionError(f"letter {letter!r} outside the tree's alphabet")
        return best

    def step(self, leaf: int, letter: str) -> tuple[int, int]:
        """One move of the tree walk: (witness node, next leaf) for a letter."""
        n = self.deepest_ancestor_containing(leaf, letter)
        _, nxt = self.jump(n, leaf)
        return n, nxt

    # -- derived quantities -------------------------------------------------

    def memtree(self, n: Optional[int] = None) -> int:
        return self._memtree[self.root if n is None else n]

    def eta(self) -> dict[int, int]:
        """A leaf numbering into {1..memtree} with distinct values across any
        two branches of a round node; the leftmost leaf gets 1."""
        out: dict[int, int] = {}

        def assign(n: int, offset: int) -> None:
            kids = self.nodes[n].children
            if not kids:
                out[n] = offset + 1
            elif self.nodes[n].round:
                for k in kids:
                    assign(k, offset)
                    offset += self._memtree[k]
            else:
                for k in kids:
                    assign(k, offset)

        assign(self.root, 0)
        return out

    def to_dot(self) -> str:
        lines = ["digraph zielonka {", "  ordering=out;"]
        for node in self.nodes:
            shape = "ellipse" if node.round else "box"
            text = "{%s}" % ",".join(node.label)
            lines.append(f'  {self.node_name(node.ident)} [shape={shape}, label="{text}"];')
        for node in self.nodes:
            for k in node.children:
                lines.append(f"  {self.node_name(node.ident)} -> {self.node_name(k)};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _maximal_flipped_subsets(condition: MullerCondition, mask: int) -> list[int]:
    """Maximal non-empty subsets of `mask` whose F-membership differs from it.

    Candidates are scanned from largest cardinality down; a candidate is kept
    when it is not contained in an already-kept one.
    """
    want = not condition.accepts_mask(mask)
    candidates = []
    sub = mask
    while True:
        if sub and condition.accepts_mask(sub) == want:
            candidates.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    candidates.sort(key=lambda m: (-m.bit_count(), m))
    kept: list[int] = []
    for cand in candidates:
        if not any(cand & ~k == 0 for k in kept):
            kept.append(cand)
    return kept


# -- spec-level operation surface -------------------------------------------


def build_zielonka(
    condition: MullerCondition, child_order: Optional[ChildOrder] = None
) -> ZielonkaTree:
    return ZielonkaTree(condition, child_order)


def memtree(tree: ZielonkaTree) -> int:
    return tree.memtree()


def next_child(tree: ZielonkaTree, n: int, c: int) -> int:
    return tree.next_child(n, c)


def jump(tree: ZielonkaTree, n: int, leaf: int) -> tuple[frozenset[int], int]:
    return tree.jump(n, leaf)


def eta_labelling(tree: ZielonkaTree) -> dict[int, int]:
    return tree.eta()
