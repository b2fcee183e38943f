import json

import pytest

from conftest import FIXTURES
from rcsbr.cli import main

CENTIPEDE = str(FIXTURES / "centipede.game.json")
STATIC = str(FIXTURES / "static3x3.game.json")
BROKEN = str(FIXTURES / "broken_recall.game.json")
TABLE1 = str(FIXTURES / "table1.ts.json")
TABLE2_SS = str(FIXTURES / "table2.ss.json")
TABLE3_SS = str(FIXTURES / "table3.ss.json")
STATIC_TS = str(FIXTURES / "static3x3.ts.json")
STATIC_SS = str(FIXTURES / "static3x3.ss.json")


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_validate_game_ok(capsys):
    code, out = run(capsys, "validate", CENTIPEDE)
    assert code == 0
    assert "OK" in out and out.endswith("\n")


def test_validate_broken_recall_exits_one(capsys):
    code, out = run(capsys, "validate", BROKEN)
    assert code == 1
    assert "PerfectRecallViolation" in out


def test_validate_type_structure(capsys):
    code, out = run(capsys, "validate", TABLE1, "--game", CENTIPEDE)
    assert code == 0
    assert "OK" in out


def test_missing_file_exits_one(capsys):
    code, _out = run(capsys, "validate", "no-such-file.json")
    assert code == 1


def test_usage_error_exits_three(capsys):
    assert main(["solve", "nonsense", CENTIPEDE]) == 3
    assert main([]) == 3


def test_solve_sr(capsys):
    code, out = run(capsys, "solve", "sr", CENTIPEDE)
    assert code == 0
    assert "SR^∞ = {In-Across} × {Go}" in out


def test_solve_fsbrs_with_certificates(capsys):
    code, out = run(capsys, "--certify", "solve", "fsbrs", CENTIPEDE)
    assert code == 0
    assert "{Out} × {Stop, Go}" in out
    assert "certificate" in out and "given root" in out


def test_solve_mfsbrs(capsys):
    code, out = run(capsys, "solve", "mfsbrs", CENTIPEDE)
    assert code == 0
    assert "{Out} × {Go}" in out
    assert "MFSBRS of player a" in out


def test_solve_p_infinity_static(capsys):
    code, out = run(capsys, "solve", "p-infinity", STATIC)
    assert code == 0
    assert "P^∞ = {U, M, D} × {L, C, R}" in out


def test_solve_p_infinity_rejects_dynamic(capsys):
    code, out = run(capsys, "solve", "p-infinity", CENTIPEDE)
    assert code == 1
    assert "NotStatic" in out


def test_solve_fbrs_rejects_dynamic(capsys):
    code, _out = run(capsys, "solve", "fbrs", CENTIPEDE)
    assert code == 1


def test_rcsbr_command(capsys):
    code, out = run(capsys, "rcsbr", CENTIPEDE, TABLE1)
    assert code == 0
    assert "{(In-Across, t_a)}" in out
    assert "[pass] projection ∈ FSBRS family" in out


def test_rcbr_flag(capsys):
    code, out = run(capsys, "--json", "rcsbr", STATIC, STATIC_TS, "--rcbr")
    assert code == 0
    doc = json.loads(out)
    titles = [s["title"] for s in doc["sections"]]
    assert "RCBR" in titles
    assert doc["assertions"][0]["ok"]


def test_real_table2(capsys):
    code, out = run(
        capsys, "real", CENTIPEDE, TABLE2_SS, "--classify", "--verify-prop1"
    )
    assert code == 0
    assert "degenerate & non-common" in out
    assert "{In-Across} × {Stop}" in out
    assert "[pass] projection in prod FSBRS_i" in out


def test_real_table3(capsys):
    code, out = run(
        capsys, "real", CENTIPEDE, TABLE3_SS, "--classify", "--verify-prop1"
    )
    assert code == 0
    assert "non-degenerate & common" in out
    assert "{Out} × {Go}" in out
    assert "[pass] projection in MFSBRS" in out


def test_real_static(capsys):
    code, out = run(capsys, "real", STATIC, STATIC_SS, "--classify")
    assert code == 0
    assert "{U} × {R}" in out


def test_real_with_closure_file(capsys, tmp_path):
    closure_file = tmp_path / "closures.json"
    closure_file.write_text(
        json.dumps(
            {
                "a": {"a": ["t_a", "t'_a"], "b": ["t_b", "t'_b"]},
                "b": {"a": ["t_a", "t'_a"], "b": ["t_b", "t'_b"]},
            }
        )
    )
    code, out = run(
        capsys,
        "real",
        CENTIPEDE,
        TABLE2_SS,
        "--closures",
        str(closure_file),
        "--classify",
    )
    assert code == 0
    # the full host as common closure makes both players non-degenerate
    assert "non-degenerate & common" in out


def test_construct_round_trip(capsys, tmp_path):
    code, out = run(
        capsys,
        "construct",
        CENTIPEDE,
        "--target",
        '{"a": ["Out"], "b": ["Go"]}',
        "--quadrant",
        "common/non-degenerate",
        "--out",
        str(tmp_path / "built"),
    )
    assert code == 0
    assert "[pass] projection equals target" in out
    assert (tmp_path / "built" / "host.ts.json").exists()
    assert (tmp_path / "built" / "state_space.ss.json").exists()
    assert (tmp_path / "built" / "closures.json").exists()


def test_construct_degenerate_quadrant(capsys, tmp_path):
    code, out = run(
        capsys,
        "construct",
        CENTIPEDE,
        "--target",
        '{"a": ["In-Across"], "b": ["Go"]}',
        "--quadrant",
        "common/degenerate",
        "--out",
        str(tmp_path / "built"),
    )
    assert code == 0
    assert "[pass] projection equals target" in out


def test_construct_rejects_target_not_in_family(capsys, tmp_path):
    code, out = run(
        capsys,
        "construct",
        CENTIPEDE,
        "--target",
        '{"a": ["In-Across"], "b": ["Stop"]}',
        "--quadrant",
        "common/non-degenerate",
        "--out",
        str(tmp_path / "built"),
    )
    assert code == 1
    assert "TargetNotInFamily" in out


def test_reports_are_byte_identical(capsys):
    _code, first = run(capsys, "--json", "solve", "mfsbrs", CENTIPEDE)
    _code, second = run(capsys, "--json", "solve", "mfsbrs", CENTIPEDE)
    assert first == second
    _code, third = run(capsys, "real", CENTIPEDE, TABLE3_SS, "--verify-prop1")
    _code, fourth = run(capsys, "real", CENTIPEDE, TABLE3_SS, "--verify-prop1")
    assert third == fourth


def test_seed_is_echoed(capsys):
    code, out = run(capsys, "--seed", "7", "validate", CENTIPEDE)
    assert code == 0
    assert "== seed" in out and "7" in out
