"""Command-line front end.

Commands: validate | solve | rcsbr | real | construct.  Reports are
deterministic (byte-identical for identical inputs) and are printed as
aligned text by default or as a JSON document under --json.  Exit
codes: 0 success, 1 validation failure, 2 assertion failure, 3 usage
error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import jsonio
from .beliefs import find_justifying_cps
from .concepts import (
    correlated_rationalizability,
    enumerate_fbrs,
    enumerate_fsbrs,
    enumerate_mfsbrs,
    is_fsbrs,
    player_specific_fsbrs,
    player_specific_mfsbrs,
    strong_rationalizability,
)
from .epistemic import (
    check_theorem_bf,
    csb_sequence,
    project_profile,
    rcbr_sequence,
    validate_type_structure,
)
from .errors import RcsbrError
from .game import ProductSet
from .separating import (
    classify,
    construct_prop2,
    induce_separating_structure,
    minimal_closure,
    real_rcsbr_profile,
    verify_prop1,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ASSERTION = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Report:
    """Accumulates sections, key-value rows, and assertion outcomes;
    renders identically across runs."""

    def __init__(self, argv):
        self.command = " ".join(argv)
        self.inputs = {}
        self.sections = []  # (title, list of lines)
        self.assertions = []  # (name, bool)

    def add_input(self, path):
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        self.inputs[str(path)] = f"sha256:{digest}"

    def section(self, title, lines):
        self.sections.append((title, list(lines)))

    def check(self, name, ok):
        self.assertions.append((name, bool(ok)))
        return ok

    @property
    def ok(self) -> bool:
        return all(ok for _name, ok in self.assertions)

    def render_text(self) -> str:
        out = [f"command: {self.command}"]
        for path in sorted(self.inputs):
            out.append(f"input: {path} {self.inputs[path]}")
        for title, lines in self.sections:
            out.append("")
            out.append(f"== {title}")
            out.extend(f"  {line}" for line in lines)
        if self.assertions:
            out.append("")
            out.append("== assertions")
            for name, ok in self.assertions:
                out.append(f"  [{'pass' if ok else 'FAIL'}] {name}")
        return "\n".join(out) + "\n"

    def render_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "sections": [
                {"title": title, "lines": lines}
                for title, lines in self.sections
            ],
            "assertions": [
                {"name": name, "ok": ok} for name, ok in self.assertions
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- rendering helpers ---------------------------------------------------------


def fmt_set(game, strategies) -> str:
    inner = ", ".join(s.label for s in game.sort_strategies(strategies))
    return "{" + inner + "}"


def fmt_product(game, ps: ProductSet) -> str:
    if ps.is_empty:
        return "∅"
    return " × ".join(fmt_set(game, c) for c in ps.components)


def fmt_event(game, ts, i, event) -> str:
    pairs = sorted(
        event,
        key=lambda st: (game.strategy_index[st[0]], ts.types[i].index(st[1])),
    )
    inner = ", ".join(f"({s.label}, {t})" for s, t in pairs)
    return "{" + inner + "}"


def fmt_profile(game, ts_list, profile) -> list:
    return [
        f"{game.players[i]}: "
        f"{fmt_event(game, ts_list[i] if isinstance(ts_list, list) else ts_list, i, profile[i])}"
        for i in range(game.n_players)
    ]


def fmt_family(game, family) -> list:
    lines = []
    for k, member in enumerate(family.members):
        if isinstance(member, ProductSet):
            lines.append(f"{k}: {fmt_product(game, member)}")
        else:
            lines.append(
                f"{k}: " + (fmt_set(game, member) if member else "∅")
            )
    return lines


def fmt_cps(game, i, cps) -> list:
    doc = jsonio.cps_to_dict(game, i, cps)
    return [
        f"given {eid}: "
        + ", ".join(f"{atom} ↦ {p}" for atom, p in doc["conditionals"][eid].items())
        for eid in doc["family"]
    ]


# -- commands -------------------------------------------------------------------


def cmd_validate(args, report) -> int:
    if args.game:
        report.add_input(args.game)
        report.add_input(args.path)
        game = jsonio.load_game(args.game)
        ts = jsonio.load_structure(game, args.path)
        warnings = validate_type_structure(game, ts)
        lines = [
            f"players: {', '.join(game.players)}",
            "types: "
            + "; ".join(
                f"{game.players[i]}: {', '.join(ts.types[i])}"
                for i in range(game.n_players)
            ),
        ]
        lines += [f"warning: {w}" for w in warnings]
        lines.append("OK")
        report.section("type structure", lines)
        return EXIT_OK
    report.add_input(args.path)
    game = jsonio.load_game(args.path)
    lines = [f"players: {', '.join(game.players)}"]
    for i in range(game.n_players):
        infos = ", ".join(f.infoset_id for f in game.infosets[i]) or "none"
        lines.append(
            f"{game.players[i]}: |standard|="
            f"{len(game.standard_strategies(i))} "
            f"strategies={fmt_set(game, game.strategies(i))} "
            f"infosets=[{infos}]"
        )
    lines.append("OK")
    report.section("game", lines)
    return EXIT_OK


def cmd_solve(args, report) -> int:
    report.add_input(args.game)
    game = jsonio.load_game(args.game)
    if args.which == "sr":
        sequence, fixpoint = strong_rationalizability(game)
        lines = [
            f"SR^{m} = {fmt_product(game, ps)}"
            for m, ps in enumerate(sequence)
        ]
        lines.append(f"SR^∞ = {fmt_product(game, fixpoint)}")
        report.section("strong rationalizability", lines)
        if args.certify:
            _certify_set(game, fixpoint, fixpoint, report)
    elif args.which in ("fsbrs", "fbrs"):
        family = (
            enumerate_fbrs(game) if args.which == "fbrs" else enumerate_fsbrs(game)
        )
        report.section(f"{family.kind} family", fmt_family(game, family))
        for i in range(game.n_players):
            specific = player_specific_fsbrs(game, i, family)
            report.section(
                f"{family.kind} of player {game.players[i]}",
                fmt_family(game, specific),
            )
        if args.certify:
            for member in family.members:
                if not member.is_empty:
                    _certify_set(game, member, member, report)
    elif args.which == "mfsbrs":
        family = enumerate_mfsbrs(game)
        report.section("MFSBRS family", fmt_family(game, family))
        for i in range(game.n_players):
            specific = player_specific_mfsbrs(game, i, family)
            report.section(
                f"MFSBRS of player {game.players[i]}",
                fmt_family(game, specific),
            )
    elif args.which == "p-infinity":
        sequence, fixpoint = correlated_rationalizability(game)
        lines = [
            f"P^{m} = {fmt_product(game, ps)}"
            for m, ps in enumerate(sequence)
        ]
        lines.append(f"P^∞ = {fmt_product(game, fixpoint)}")
        report.section("correlated rationalizability", lines)
    return EXIT_OK


def _certify_set(game, members: ProductSet, believe: ProductSet, report):
    for i in range(game.n_players):
        for s in game.sort_strategies(members.components[i]):
            cps = find_justifying_cps(
                game, i, s, believe=believe, fullness=believe.components[i]
            )
            if cps is None:
                cps = find_justifying_cps(game, i, s, believe=believe)
            title = f"certificate: {game.players[i]} plays {s.label}"
            report.section(title, fmt_cps(game, i, cps))


def cmd_rcsbr(args, report) -> int:
    report.add_input(args.game)
    report.add_input(args.structure)
    game = jsonio.load_game(args.game)
    ts = jsonio.load_structure(game, args.structure)
    sequence = (
        rcbr_sequence(game, ts) if args.rcbr else csb_sequence(game, ts)
    )
    word = "CB" if args.rcbr else "CSB"
    report.section(
        "Rat", [line for line in fmt_profile(game, ts, sequence[0])]
    )
    for m, profile in enumerate(sequence[1:], start=1):
        report.section(
            f"{word}^{m}(Rat)", fmt_profile(game, ts, profile)
        )
    final = sequence[-1]
    name = "RCBR" if args.rcbr else "RCSBR"
    report.section(name, fmt_profile(game, ts, final))
    projection = project_profile(game, final)
    report.section("projection", [fmt_product(game, projection)])
    theorem = check_theorem_bf(game, ts)
    report.check("projection ∈ FSBRS family", theorem.is_member)
    return EXIT_OK if report.ok else EXIT_ASSERTION


def _load_real_inputs(args, report):
    report.add_input(args.game)
    report.add_input(args.statespace)
    game = jsonio.load_game(args.game)
    ss = jsonio.load_state_space(args.statespace, game=game)
    host = ss.host
    if args.closures == "minimal":
        closures = [
            minimal_closure(host, ss, i) for i in range(game.n_players)
        ]
    else:
        report.add_input(args.closures)
        closures = jsonio.parse_closures(ss, jsonio.load_json(args.closures))
    profile = tuple(
        induce_separating_structure(host, cl) for cl in closures
    )
    return game, ss, closures, profile


def cmd_real(args, report) -> int:
    game, ss, closures, profile = _load_real_inputs(args, report)
    for cl, st in zip(closures, profile):
        name = game.players[cl.owner]
        lines = [
            f"types of {game.players[j]}: " + ", ".join(cl.type_sets[j])
            for j in range(game.n_players)
        ]
        lines.append("real: " + ", ".join(sorted(cl.real)))
        lines.append(
            "imaginary: " + (", ".join(cl.imaginary) or "(none)")
        )
        lines.append(f"degenerate: {'yes' if cl.degenerate else 'no'}")
        report.section(f"closure for {name}", lines)
    taxonomy = classify(profile)
    if args.classify:
        report.section(
            "taxonomy",
            [
                f"quadrant: {taxonomy.quadrant[0]} & {taxonomy.quadrant[1]}",
                f"characterizing family: {taxonomy.cell}",
            ],
        )
    events, projection = real_rcsbr_profile(game, profile)
    report.section(
        "real RCSBR",
        [
            f"{game.players[i]}: "
            f"{fmt_event(game, profile[i].structure, i, events[i])}"
            for i in range(game.n_players)
        ],
    )
    report.section("projection", [fmt_product(game, projection)])
    if args.verify_prop1:
        outcome = verify_prop1(game, profile)
        for part in outcome.parts:
            if part.applicable:
                report.check(part.name, part.holds)
            else:
                report.section(
                    "not applicable", [f"{part.name} (hypothesis not met)"]
                )
    return EXIT_OK if report.ok else EXIT_ASSERTION


QUADRANTS = {
    "common/degenerate": (True, True),
    "common/non-degenerate": (True, False),
    "non-common/degenerate": (False, True),
    "non-common/non-degenerate": (False, False),
}


def cmd_construct(args, report) -> int:
    report.add_input(args.game)
    game = jsonio.load_game(args.game)
    spec = json.loads(args.target)
    strategy_by_label = [
        {s.label: s for s in game.strategies(i)}
        for i in range(game.n_players)
    ]
    components = []
    for i, name in enumerate(game.players):
        labels = spec.get(name, [])
        missing = [l for l in labels if l not in strategy_by_label[i]]
        if missing:
            raise RcsbrError(f"unknown strategies for {name!r}: {missing}")
        components.append(frozenset(strategy_by_label[i][l] for l in labels))
    target = ProductSet(tuple(components))
    common, degenerate = QUADRANTS[args.quadrant]
    built = construct_prop2(game, target, common=common, degenerate=degenerate)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    host_path = out / "host.ts.json"
    ss_path = out / "state_space.ss.json"
    closure_path = out / "closures.json"
    jsonio.save_structure(built.host, host_path)
    jsonio.dump_json(
        jsonio.state_space_to_dict(built.state_space, "host.ts.json"), ss_path
    )
    jsonio.dump_json(
        jsonio.closures_to_dict(built.closures, game), closure_path
    )
    report.section(
        "files",
        [str(host_path), str(ss_path), str(closure_path)],
    )
    report.section(
        "taxonomy",
        [
            f"requested: {args.quadrant}",
            f"actual: {built.taxonomy.quadrant[1]}/{built.taxonomy.quadrant[0]}",
        ],
    )

    # round trip through the emitted files
    ss = jsonio.load_state_space(ss_path, game=game)
    closures = jsonio.parse_closures(ss, jsonio.load_json(closure_path))
    profile = tuple(
        induce_separating_structure(ss.host, cl) for cl in closures
    )
    _events, projection = real_rcsbr_profile(game, profile)
    report.section("round-trip projection", [fmt_product(game, projection)])
    report.check("projection equals target", projection == target)
    return EXIT_OK if report.ok else EXIT_ASSERTION


# -- entry point -----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="rcsbr", description=__doc__)
    parser.add_argument("--json", action="store_true", dest="as_json",
                        help="emit the report as JSON")
    parser.add_argument("--certify", action="store_true",
                        help="include justifying conditional systems")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed echoed into the report (randomized "
                             "property runs live in the test suite)")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="validate a game or type structure")
    p.add_argument("path")
    p.add_argument("--game", help="treat PATH as a type structure over "
                                  "this game")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="compute a solution family")
    p.add_argument(
        "which", choices=["sr", "fsbrs", "mfsbrs", "p-infinity", "fbrs"]
    )
    p.add_argument("game")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("rcsbr", help="epistemic events of a type structure")
    p.add_argument("game")
    p.add_argument("structure")
    p.add_argument("--rcbr", action="store_true",
                   help="use the one-shot belief operator")
    p.set_defaults(func=cmd_rcsbr)

    p = sub.add_parser("real", help="real RCSBR over a state space")
    p.add_argument("game")
    p.add_argument("statespace")
    p.add_argument("--closures", default="minimal",
                   help="'minimal' or a closure file")
    p.add_argument("--classify", action="store_true")
    p.add_argument("--verify-prop1", action="store_true",
                   dest="verify_prop1")
    p.set_defaults(func=cmd_real)

    p = sub.add_parser("construct", help="realize a target projection")
    p.add_argument("game")
    p.add_argument("--target", required=True,
                   help='JSON object: {"a": ["Out"], "b": ["Go"]}')
    p.add_argument("--quadrant", required=True, choices=sorted(QUADRANTS))
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_construct)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    report = Report(["rcsbr"] + argv)
    if args.seed is not None:
        report.section("seed", [str(args.seed)])
    try:
        code = args.func(args, report)
    except RcsbrError as exc:
        report.section("error", [f"{type(exc).__name__}: {exc}"])
        _emit(report, args)
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError) as exc:
        report.section("error", [str(exc)])
        _emit(report, args)
        return EXIT_INVALID
    _emit(report, args)
    return code


def _emit(report, args) -> None:
    text = report.render_json() if args.as_json else report.render_text()
    sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
