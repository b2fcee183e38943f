import itertools
import json
from fractions import Fraction

import pytest

from conftest import FIXTURES, by_label, labels
from rcsbr.errors import (
    BadPayoffArity,
    DanglingChild,
    EmptyActionSet,
    GameFormatError,
    InfoSetActionMismatch,
    NotATree,
    PerfectRecallViolation,
    UnknownInfoSet,
)
from rcsbr.game import (
    conditioning_family,
    enumerate_standard_strategies,
    is_static,
    opponent_profiles,
    payoff,
    reachable_infosets,
    reduce_strategies,
    standard_payoff,
    strategies_allowing,
    validate_game,
)


def test_centipede_validates(centipede):
    assert centipede.players == ("a", "b")
    assert len(centipede.infosets[0]) == 2
    assert len(centipede.infosets[1]) == 1


def test_static_game_validates(static3x3):
    fam = conditioning_family(static3x3, 0)
    assert len(fam) == 1 and fam[0].tags[0] == "root"
    assert is_static(static3x3)


def test_merged_infosets_break_recall(broken_recall_raw):
    with pytest.raises(PerfectRecallViolation):
        validate_game(broken_recall_raw)


def test_standard_strategy_counts(centipede, static3x3):
    assert len(enumerate_standard_strategies(centipede, 0)) == 4
    assert len(enumerate_standard_strategies(centipede, 1)) == 2
    assert len(enumerate_standard_strategies(static3x3, 0)) == 3


def test_reduction(centipede, static3x3):
    assert [s.label for s in reduce_strategies(centipede, 0)] == [
        "Out",
        "In-Down",
        "In-Across",
    ]
    assert [s.label for s in reduce_strategies(centipede, 1)] == ["Stop", "Go"]
    # one-shot games reduce to themselves
    assert [s.label for s in reduce_strategies(static3x3, 0)] == ["U", "M", "D"]
    assert [s.label for s in reduce_strategies(static3x3, 1)] == ["L", "C", "R"]


def test_reduction_covers_standard_strategies(centipede):
    for i in range(2):
        classes = reduce_strategies(centipede, i)
        standards = enumerate_standard_strategies(centipede, i)
        seen = []
        for std in standards:
            matching = [
                s
                for s in classes
                if all(std.action_at(iid) == act for iid, act in s.plan)
            ]
            assert len(matching) == 1  # disjoint cover
            seen.append(matching[0])
        assert set(seen) == set(classes)


def test_strategies_allowing(centipede):
    a = by_label(centipede, 0)
    assert strategies_allowing(centipede, 0, "a2") == {
        a["In-Down"],
        a["In-Across"],
    }
    assert labels(centipede, strategies_allowing(centipede, 1, "a2")) == ["Go"]
    assert strategies_allowing(centipede, 0, "root") == set(
        centipede.strategies(0)
    )
    with pytest.raises(UnknownInfoSet):
        strategies_allowing(centipede, 0, "nope")


def test_product_identity(centipede, static3x3):
    # S(h) = S_i(h) x S_-i(h): joint reachability equals the product
    for game in (centipede, static3x3):
        for per_player in game.infosets:
            for info in per_player:
                per = [
                    strategies_allowing(game, j, info)
                    for j in range(game.n_players)
                ]
                joint = {
                    profile
                    for profile in itertools.product(
                        *[game.strategies(j) for j in range(game.n_players)]
                    )
                    if any(
                        all(game.allows(s, nid) for s in profile)
                        for nid in info.nodes
                    )
                }
                assert joint == set(itertools.product(*per))


def test_conditioning_families(centipede, static3x3):
    fam_a = conditioning_family(centipede, 0)
    assert [c.tags for c in fam_a] == [("root", "a1"), ("a2",)]
    assert {tuple(labels(centipede, [s for (s,) in c.event])) for c in fam_a} == {
        ("Go", "Stop"),
        ("Go",),
    }
    fam_b = conditioning_family(centipede, 1)
    assert [c.tags for c in fam_b] == [("root",), ("b1",)]
    assert sorted(s.label for (s,) in fam_b[1].event) == [
        "In-Across",
        "In-Down",
    ]
    for i in range(2):
        fam = conditioning_family(static3x3, i)
        assert len(fam) == 1


def test_reachable_infosets(centipede):
    a = by_label(centipede, 0)
    b = by_label(centipede, 1)
    own = lambda s: {
        f.infoset_id for f in reachable_infosets(centipede, s, player=s.owner)
    }
    assert own(a["Out"]) == {"a1"}
    assert own(a["In-Across"]) == {"a1", "a2"}
    assert {
        (f.player, f.infoset_id) for f in reachable_infosets(centipede, b["Stop"])
    } == {(0, "a1"), (1, "b1")}


def test_payoffs(centipede, static3x3):
    a = by_label(centipede, 0)
    b = by_label(centipede, 1)
    assert payoff(centipede, (a["Out"], b["Stop"])) == (2, 2)
    assert payoff(centipede, (a["In-Across"], b["Go"])) == (3, 3)
    assert payoff(centipede, (a["In-Down"], b["Go"])) == (0, 0)
    u = by_label(static3x3, 0)
    c = by_label(static3x3, 1)
    assert payoff(static3x3, (u["U"], c["C"])) == (2, 1)
    assert all(
        isinstance(v, Fraction) for v in payoff(centipede, (a["Out"], b["Go"]))
    )


def test_payoff_invariant_across_representatives(centipede):
    reduced = [reduce_strategies(centipede, i) for i in range(2)]
    standards = [enumerate_standard_strategies(centipede, i) for i in range(2)]
    for profile in itertools.product(*standards):
        via_standard = standard_payoff(centipede, profile)
        chosen = []
        for i, std in enumerate(profile):
            match = [
                s
                for s in reduced[i]
                if all(std.action_at(iid) == act for iid, act in s.plan)
            ]
            chosen.append(match[0])
        assert payoff(centipede, tuple(chosen)) == via_standard


def test_enumeration_is_deterministic():
    raw = json.loads((FIXTURES / "centipede.game.json").read_text())
    g1 = validate_game(raw)
    g2 = validate_game(json.loads((FIXTURES / "centipede.game.json").read_text()))
    for i in range(2):
        assert [s.label for s in g1.strategies(i)] == [
            s.label for s in g2.strategies(i)
        ]
        assert [c.tags for c in conditioning_family(g1, i)] == [
            c.tags for c in conditioning_family(g2, i)
        ]
        assert [
            tuple(s.label for s in atom) for atom in opponent_profiles(g1, i)
        ] == [tuple(s.label for s in atom) for atom in opponent_profiles(g2, i)]


# -- validation error paths -----------------------------------------------------


def _centipede_raw():
    return json.loads((FIXTURES / "centipede.game.json").read_text())


def test_not_a_tree():
    raw = _centipede_raw()
    raw["nodes"]["x2"]["children"]["Down"] = "x1"  # second parent for x1
    with pytest.raises(NotATree):
        validate_game(raw)
    raw = _centipede_raw()
    raw["nodes"]["orphan"] = {"payoffs": ["0", "0"]}
    with pytest.raises(NotATree):
        validate_game(raw)


def test_dangling_child():
    raw = _centipede_raw()
    raw["nodes"]["x2"]["children"]["Across"] = "missing"
    with pytest.raises(DanglingChild):
        validate_game(raw)
    raw = _centipede_raw()
    del raw["nodes"]["x2"]["children"]["Across"]
    with pytest.raises(DanglingChild):
        validate_game(raw)


def test_empty_action_set():
    raw = _centipede_raw()
    raw["nodes"]["x2"]["actions"]["a"] = []
    with pytest.raises(EmptyActionSet):
        validate_game(raw)


def test_bad_payoff_arity():
    raw = _centipede_raw()
    raw["nodes"]["z1"]["payoffs"] = ["2"]
    with pytest.raises(BadPayoffArity):
        validate_game(raw)


def test_infoset_action_mismatch():
    raw = _centipede_raw()
    # x1 belongs to Bob; claiming it for Ann's a2 cell must fail
    raw["infosets"]["a"]["a2"] = ["x2", "x1"]
    with pytest.raises(InfoSetActionMismatch):
        validate_game(raw)


def test_uncovered_active_node_rejected():
    raw = _centipede_raw()
    del raw["infosets"]["a"]["a2"]
    with pytest.raises(GameFormatError):
        validate_game(raw)


def test_float_payoffs_rejected():
    raw = _centipede_raw()
    raw["nodes"]["z1"]["payoffs"] = [2.0, 2.0]
    with pytest.raises(GameFormatError):
        validate_game(raw)
