import json
from pathlib import Path

import pytest

from rcsbr.game import ProductSet, validate_game
from rcsbr.jsonio import load_game, load_state_space, load_structure

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def centipede():
    return load_game(FIXTURES / "centipede.game.json")


@pytest.fixture(scope="session")
def static3x3():
    return load_game(FIXTURES / "static3x3.game.json")


@pytest.fixture(scope="session")
def table1(centipede):
    return load_structure(centipede, FIXTURES / "table1.ts.json")


@pytest.fixture(scope="session")
def table3(centipede):
    return load_structure(centipede, FIXTURES / "table3.ts.json")


@pytest.fixture(scope="session")
def static_ts(static3x3):
    return load_structure(static3x3, FIXTURES / "static3x3.ts.json")


@pytest.fixture(scope="session")
def table2_ss(centipede):
    return load_state_space(FIXTURES / "table2.ss.json", game=centipede)


@pytest.fixture(scope="session")
def table3_ss(centipede):
    return load_state_space(FIXTURES / "table3.ss.json", game=centipede)


@pytest.fixture(scope="session")
def static_ss(static3x3):
    return load_state_space(FIXTURES / "static3x3.ss.json", game=static3x3)


@pytest.fixture(scope="session")
def broken_recall_raw():
    with open(FIXTURES / "broken_recall.game.json", encoding="utf-8") as fh:
        return json.load(fh)


def by_label(game, i):
    return {s.label: s for s in game.strategies(i)}


def pset(game, spec):
    """Product set from {player name: [labels]}; missing players get
    empty components."""
    components = []
    for i, name in enumerate(game.players):
        lookup = by_label(game, i)
        components.append(frozenset(lookup[l] for l in spec.get(name, ())))
    return ProductSet(tuple(components))


def labels(game, subset):
    return sorted(s.label for s in subset)


def product_labels(game, ps):
    if ps.is_empty:
        return None
    return tuple(tuple(labels(game, c)) for c in ps.components)
