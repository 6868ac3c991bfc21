import pytest

from mullergames.conditions import Alphabet, MullerCondition
from mullergames.zielonka import build_zielonka


@pytest.fixture
def running_condition():
    # Gamma = {a,b,c}, accepting family {{a,b},{a,c},{b}}
    return MullerCondition(Alphabet("abc"), [["a", "b"], ["a", "c"], ["b"]])


@pytest.fixture
def running_tree(running_condition):
    # BFS ids: 0={a,b,c} square, 1={a,b} round, 2={a,c} round,
    #          3={a} leaf under 1, 4={a} and 5={c} leaves under 2
    return build_zielonka(running_condition)


def all_muller_conditions(alphabet):
    """Every Muller condition over `alphabet` (including the empty family)."""
    from itertools import combinations

    masks = [m for m in range(1, 1 << len(alphabet))]
    for r in range(len(masks) + 1):
        for chosen in combinations(masks, r):
            yield MullerCondition(alphabet, [alphabet.from_mask(m) for m in chosen])


def random_muller_condition(rng, alphabet):
    masks = [m for m in range(1, 1 << len(alphabet)) if rng.random() < 0.5]
    if not masks:
        masks = [rng.randrange(1, 1 << len(alphabet))]
    return MullerCondition(alphabet, [alphabet.from_mask(m) for m in masks])
