import random

import pytest

from conftest import by_label, product_labels, pset
from oracles import random_state_space, random_type_structure
from rcsbr.concepts import enumerate_fsbrs, enumerate_mfsbrs
from rcsbr.epistemic import rcsbr, validate_type_structure
from rcsbr.errors import (
    EmptyTarget,
    MismatchedStateSpace,
    StructureFormatError,
    TargetNotInFamily,
    UnknownType,
)
from rcsbr.game import ProductSet
from rcsbr.jsonio import parse_structure
from rcsbr.separating import (
    Closure,
    StateSpace,
    classify,
    construct_prop2,
    induce_separating_structure,
    is_belief_closed,
    is_non_belief_closed,
    minimal_closure,
    real_csb_i,
    real_rcsbr_i,
    real_rcsbr_profile,
    validate_closure,
    verify_prop1,
)


def event_labels(event):
    return sorted((s.label, t) for s, t in event)


def minimal_profile(ss):
    host = ss.host
    closures = [
        minimal_closure(host, ss, i) for i in range(host.game.n_players)
    ]
    return tuple(
        induce_separating_structure(host, cl) for cl in closures
    )


# -- belief-closedness ------------------------------------------------------------


def test_full_host_is_belief_closed(table1):
    full = StateSpace(
        table1,
        tuple(frozenset(table1.types[i]) for i in range(2)),
    )
    assert is_belief_closed(table1, full)


def test_table2_state_space_is_not_closed(table1, table2_ss):
    closed = is_belief_closed(table1, table2_ss)
    assert not closed
    non, witness = is_non_belief_closed(table1, table2_ss)
    assert non
    player, event_id, label = witness
    assert (player, label) == (0, "t_a")  # t_a's beliefs reach t'_b
    assert event_id in ("root", "a2")


def test_singleton_self_believing_types_closed(centipede):
    raw = {
        "a": {
            "types": ["t_a"],
            "beliefs": {
                "t_a": {
                    "root": [{"s": ["Stop"], "t": ["t_b"], "p": "1"}],
                    "a2": [{"s": ["Go"], "t": ["t_b"], "p": "1"}],
                }
            },
        },
        "b": {
            "types": ["t_b"],
            "beliefs": {
                "t_b": {
                    "root": [{"s": ["Out"], "t": ["t_a"], "p": "1"}],
                    "b1": [{"s": ["In-Down"], "t": ["t_a"], "p": "1"}],
                }
            },
        },
    }
    host = parse_structure(centipede, raw)
    ss = StateSpace(host, (frozenset({"t_a"}), frozenset({"t_b"})))
    assert is_belief_closed(host, ss)
    non, witness = is_non_belief_closed(host, ss)
    assert not non and witness is None


def test_open_only_at_inner_event(centipede):
    """Closed at the root but escaping at the inner conditioning event."""
    raw = {
        "a": {
            "types": ["t_a", "t_x"],
            "beliefs": {
                "t_a": {
                    "root": [{"s": ["Stop"], "t": ["t_b"], "p": "1"}],
                    "a2": [{"s": ["Go"], "t": ["t_b"], "p": "1"}],
                },
                "t_x": {
                    "root": [{"s": ["Stop"], "t": ["t_b"], "p": "1"}],
                    "a2": [{"s": ["Go"], "t": ["t_b"], "p": "1"}],
                },
            },
        },
        "b": {
            "types": ["t_b"],
            "beliefs": {
                "t_b": {
                    "root": [{"s": ["Out"], "t": ["t_a"], "p": "1"}],
                    "b1": [{"s": ["In-Down"], "t": ["t_x"], "p": "1"}],
                }
            },
        },
    }
    host = parse_structure(centipede, raw)
    ss = StateSpace(host, (frozenset({"t_a"}), frozenset({"t_b"})))
    non, witness = is_non_belief_closed(host, ss)
    assert non
    assert witness == (1, "b1", "t_b")


def test_state_space_type_checks(table1):
    with pytest.raises(UnknownType):
        StateSpace(table1, (frozenset({"ghost"}), frozenset({"t_b"})))
    with pytest.raises(StructureFormatError):
        StateSpace(table1, (frozenset(), frozenset({"t_b"})))


# -- closures ----------------------------------------------------------------------


def test_minimal_closures_table2(table1, table2_ss):
    ann = minimal_closure(table1, table2_ss, 0)
    assert ann.type_sets == (("t_a",), ("t'_b",))
    assert ann.imaginary == ()
    assert ann.degenerate
    bob = minimal_closure(table1, table2_ss, 1)
    assert bob.type_sets == (("t'_a",), ("t_b",))
    assert bob.degenerate


def test_minimal_closure_of_closed_space_is_itself(table1):
    full = StateSpace(
        table1, tuple(frozenset(table1.types[i]) for i in range(2))
    )
    for i in range(2):
        cl = minimal_closure(table1, full, i)
        assert cl.type_sets == tuple(tuple(t) for t in table1.types)
        assert cl.imaginary == ()


def test_minimal_closure_table3_adds_imaginary_bob(table3, table3_ss):
    for i in range(2):
        cl = minimal_closure(table3, table3_ss, i)
        assert cl.type_sets == (("t_a",), ("t_b", "t'_b"))
        assert (cl.imaginary == ("t'_b",)) == (i == 1)
        assert cl.degenerate == (i == 0)


def test_minimality(table1, table2_ss, table3, table3_ss, static_ts, static_ss):
    """Dropping any non-seed type from a minimal closure breaks
    belief-closedness."""
    cases = [
        (table1, table2_ss),
        (table3, table3_ss),
        (static_ts, static_ss),
    ]
    for host, ss in cases:
        for i in range(host.game.n_players):
            closure = minimal_closure(host, ss, i)
            seeds = ss.real_types[i]
            for j, labels in enumerate(closure.type_sets):
                for label in labels:
                    if j == i and label in seeds:
                        continue
                    trimmed = tuple(
                        tuple(t for t in labels_k if (k, t) != (j, label))
                        for k, labels_k in enumerate(closure.type_sets)
                    )
                    with pytest.raises(StructureFormatError):
                        validate_closure(
                            host, Closure(i, ss, trimmed)
                        )


def test_user_supplied_closure_accepted(table1, table2_ss):
    # the full host is also a valid (non-minimal) closure
    full = tuple(tuple(t) for t in table1.types)
    closure = Closure(0, table2_ss, full)
    validate_closure(table1, closure)
    st = induce_separating_structure(table1, closure)
    assert not st.degenerate  # t'_a becomes imaginary


def test_closure_must_contain_reals(table1, table2_ss):
    with pytest.raises(StructureFormatError):
        validate_closure(
            table1, Closure(0, table2_ss, (("t'_a",), ("t'_b",)))
        )


# -- induced structures and taxonomy -----------------------------------------------


def test_induced_structures_table2(centipede, table1, table2_ss):
    st_a, st_b = minimal_profile(table2_ss)
    assert st_a.structure.types == (("t_a",), ("t'_b",))
    assert st_b.structure.types == (("t'_a",), ("t_b",))
    validate_type_structure(centipede, st_a.structure)
    validate_type_structure(centipede, st_b.structure)
    taxonomy = classify((st_a, st_b))
    assert taxonomy.quadrant == ("degenerate", "non-common")
    assert taxonomy.cell == "prod FSBRS_i"


def test_induced_structures_table3(centipede, table3, table3_ss):
    profile = minimal_profile(table3_ss)
    taxonomy = classify(profile)
    assert taxonomy.quadrant == ("non-degenerate", "common")
    assert taxonomy.cell == "MFSBRS"


def test_belief_closed_space_is_degenerate_common(table1):
    full = StateSpace(
        table1, tuple(frozenset(table1.types[i]) for i in range(2))
    )
    profile = minimal_profile(full)
    taxonomy = classify(profile)
    assert taxonomy.quadrant == ("degenerate", "common")
    assert taxonomy.cell == "FSBRS"


def test_classify_rejects_mixed_profiles(table1, table2_ss, table3, table3_ss):
    st_a = minimal_profile(table2_ss)[0]
    st_b = minimal_profile(table3_ss)[1]
    with pytest.raises(MismatchedStateSpace):
        classify((st_a, st_b))


# -- real events --------------------------------------------------------------------


def test_real_rcsbr_table2(centipede, table2_ss):
    st_a, st_b = minimal_profile(table2_ss)
    assert event_labels(real_rcsbr_i(centipede, st_a)) == [
        ("In-Across", "t_a")
    ]
    assert event_labels(real_rcsbr_i(centipede, st_b)) == [("Stop", "t_b")]
    events, projection = real_rcsbr_profile(centipede, (st_a, st_b))
    assert product_labels(centipede, projection) == (
        ("In-Across",),
        ("Stop",),
    )


def test_real_rcsbr_table3(centipede, table3_ss):
    profile = minimal_profile(table3_ss)
    assert event_labels(real_rcsbr_i(centipede, profile[0])) == [
        ("Out", "t_a")
    ]
    assert event_labels(real_rcsbr_i(centipede, profile[1])) == [
        ("Go", "t_b")
    ]
    _events, projection = real_rcsbr_profile(centipede, profile)
    assert product_labels(centipede, projection) == (("Out",), ("Go",))


def test_real_csb_rounds_decrease(centipede, table3_ss):
    profile = minimal_profile(table3_ss)
    for st in profile:
        previous = None
        for m in range(3):
            current = real_csb_i(centipede, st, m)
            if previous is not None:
                assert current <= previous
            previous = current


def test_real_rcbr_static(static3x3, static_ss):
    profile = minimal_profile(static_ss)
    taxonomy = classify(profile)
    assert taxonomy.quadrant == ("non-degenerate", "common")
    _events, projection = real_rcsbr_profile(static3x3, profile)
    assert product_labels(static3x3, projection) == (("U",), ("R",))
    _seq, p_inf = __import__("rcsbr.concepts", fromlist=["x"]).correlated_rationalizability(
        static3x3
    )
    assert p_inf.contains(projection)


def test_empty_component_collapses_projection(centipede, table1, table2_ss):
    st_a, st_b = minimal_profile(table2_ss)
    events = (frozenset(), real_rcsbr_i(centipede, st_b))
    from rcsbr.epistemic import project_profile

    assert project_profile(centipede, events).is_empty


# -- the characterization ------------------------------------------------------------


def test_prop1_on_fixture_profiles(centipede, static3x3, table2_ss, table3_ss, static_ss):
    for game, ss in (
        (centipede, table2_ss),
        (centipede, table3_ss),
        (static3x3, static_ss),
    ):
        report = verify_prop1(game, minimal_profile(ss))
        assert report.ok, [
            (p.name, p.applicable, p.holds) for p in report.parts
        ]


def test_prop1_table2_details(centipede, table2_ss):
    report = verify_prop1(centipede, minimal_profile(table2_ss))
    parts = {p.name: p for p in report.parts}
    assert parts["projection in prod FSBRS_i"].applicable
    assert parts["projection in prod FSBRS_i"].holds
    assert not parts["projection in MFSBRS"].applicable
    # and indeed the projection is not a full set itself
    fam = enumerate_fsbrs(centipede)
    assert report.projection not in fam.members


def test_prop1_table3_details(centipede, table3_ss):
    report = verify_prop1(centipede, minimal_profile(table3_ss))
    parts = {p.name: p for p in report.parts}
    assert parts["projection in MFSBRS"].applicable
    assert parts["projection in MFSBRS"].holds
    fam = enumerate_fsbrs(centipede)
    assert report.projection not in fam.members  # in MFSBRS \ FSBRS


def test_prop2_round_trips_all_quadrants(centipede):
    fs = enumerate_fsbrs(centipede)
    ms = enumerate_mfsbrs(centipede)
    for member in fs.members:
        if member.is_empty:
            continue
        for quadrant in ((True, True), (False, True)):
            built = construct_prop2(
                centipede, member, common=quadrant[0], degenerate=quadrant[1],
                fsbrs=fs, mfsbrs=ms,
            )
            _e, projection = real_rcsbr_profile(centipede, built.profile)
            assert projection == member
    for member in ms.members:
        if member.is_empty:
            continue
        for quadrant in ((True, False), (False, False)):
            built = construct_prop2(
                centipede, member, common=quadrant[0], degenerate=quadrant[1],
                fsbrs=fs, mfsbrs=ms,
            )
            _e, projection = real_rcsbr_profile(centipede, built.profile)
            assert projection == member
            if quadrant[0]:
                assert built.taxonomy.common


def test_prop2_mixed_specific_products(centipede):
    fs = enumerate_fsbrs(centipede)
    ms = enumerate_mfsbrs(centipede)
    # {In-Across} x {Stop}: a product of player-specific members that is
    # itself in neither family
    target = pset(centipede, {"a": ["In-Across"], "b": ["Stop"]})
    built = construct_prop2(
        centipede, target, common=False, degenerate=True, fsbrs=fs, mfsbrs=ms
    )
    _e, projection = real_rcsbr_profile(centipede, built.profile)
    assert projection == target
    assert built.taxonomy.quadrant == ("degenerate", "non-common")
    report = verify_prop1(centipede, built.profile)
    assert report.ok


def test_prop2_rejects_bad_targets(centipede):
    fs = enumerate_fsbrs(centipede)
    ms = enumerate_mfsbrs(centipede)
    with pytest.raises(TargetNotInFamily):
        construct_prop2(
            centipede,
            pset(centipede, {"a": ["Out"], "b": ["Go"]}),
            common=True,
            degenerate=True,
            fsbrs=fs,
        )
    with pytest.raises(TargetNotInFamily):
        construct_prop2(
            centipede,
            pset(centipede, {"a": ["In-Across"], "b": ["Stop"]}),
            common=True,
            degenerate=False,
            fsbrs=fs,
            mfsbrs=ms,
        )
    with pytest.raises(EmptyTarget):
        construct_prop2(
            centipede,
            ProductSet((frozenset(), frozenset())),
            common=True,
            degenerate=True,
            fsbrs=fs,
        )


def test_prop2_construction_validates(centipede):
    ms = enumerate_mfsbrs(centipede)
    target = pset(centipede, {"a": ["Out"], "b": ["Go"]})
    built = construct_prop2(centipede, target, common=True, degenerate=False,
                            mfsbrs=ms)
    validate_type_structure(centipede, built.host)
    assert built.taxonomy.quadrant == ("non-degenerate", "common")
    report = verify_prop1(centipede, built.profile)
    assert report.ok


# -- randomized property runs ---------------------------------------------------------


def test_prop1_on_random_state_spaces(centipede, static3x3):
    rng = random.Random(987654321)
    runs = 0
    for game in (centipede, static3x3):
        fs = enumerate_fsbrs(game)
        ms = enumerate_mfsbrs(game)
        for _ in range(20):
            host = random_type_structure(game, rng)
            ss = random_state_space(host, rng)
            profile = minimal_profile(ss)
            report = verify_prop1(game, profile, fsbrs=fs, mfsbrs=ms)
            assert report.ok, [
                (p.name, p.applicable, p.holds) for p in report.parts
            ]
            runs += 1
    assert runs == 40
