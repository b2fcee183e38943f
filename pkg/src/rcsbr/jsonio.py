"""File schemas: games, type structures, state spaces, and closures.

All rationals travel as "p/q" strings; all files are UTF-8 JSON.  The
schemas are documented in the README and exercised by the files under
``fixtures/``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from .beliefs import CPS, Measure
from .errors import StructureFormatError, UnknownType
from .game import DynamicGame, validate_game
from .rational import format_rational, parse_rational


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(data, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- games ------------------------------------------------------------------


def load_game(path) -> DynamicGame:
    return validate_game(load_json(path))


# -- type structures ---------------------------------------------------------


def structure_to_dict(ts) -> dict:
    """Serialize a type structure; inverse of :func:`parse_structure`."""
    game = ts.game
    out = {}
    for i, name in enumerate(game.players):
        beliefs = {}
        for t in ts.types[i]:
            cps = ts.beliefs[(i, t)]
            per_event = {}
            for cond in ts.family(i):
                measure = cps.conditionals[cond.event_ext]
                entries = []
                for atom in sorted(
                    measure.support, key=lambda a: ts.extended_atom_key(i, a)
                ):
                    s_part, t_part = atom
                    entries.append(
                        {
                            "s": [s.label for s in s_part],
                            "t": list(t_part),
                            "p": format_rational(measure.support[atom]),
                        }
                    )
                per_event[cond.event_id] = entries
            beliefs[t] = per_event
        out[name] = {"types": list(ts.types[i]), "beliefs": beliefs}
    return out


def parse_structure(game: DynamicGame, raw: Mapping):
    """Build a type structure from its file form (validated)."""
    from .epistemic import TypeStructure, validate_type_structure

    if not isinstance(raw, Mapping):
        raise StructureFormatError("type structure must be a mapping")
    unknown = set(raw) - set(game.players)
    if unknown:
        raise StructureFormatError(f"unknown players {sorted(unknown)}")
    types = []
    for name in game.players:
        spec = raw.get(name)
        if not isinstance(spec, Mapping) or "types" not in spec:
            raise StructureFormatError(f"player {name!r}: missing 'types'")
        labels = spec["types"]
        if not labels or len(set(labels)) != len(labels):
            raise StructureFormatError(
                f"player {name!r}: types must be non-empty and distinct"
            )
        types.append(tuple(labels))
    types = tuple(types)

    strategy_by_label = [
        {s.label: s for s in game.strategies(j)} for j in range(game.n_players)
    ]

    beliefs = {}
    for i, name in enumerate(game.players):
        others = [j for j in range(game.n_players) if j != i]
        spec = raw[name]
        raw_beliefs = spec.get("beliefs") or {}
        if set(raw_beliefs) != set(types[i]):
            raise StructureFormatError(
                f"player {name!r}: beliefs must cover exactly its types"
            )
        # conditioning events, resolved through their generating tags
        probe = TypeStructure(game, types, {})
        family = probe.family(i)
        tag_to_event = {}
        for cond in family:
            for tag in cond.tags:
                tag_to_event[tag] = cond
        for t in types[i]:
            per_event = {}
            for key, entries in raw_beliefs[t].items():
                cond = tag_to_event.get(key)
                if cond is None:
                    raise StructureFormatError(
                        f"player {name!r}, type {t!r}: unknown conditioning "
                        f"event {key!r}"
                    )
                support = {}
                for entry in entries:
                    try:
                        s_part = tuple(
                            strategy_by_label[j][lbl]
                            for j, lbl in zip(others, entry["s"], strict=True)
                        )
                        t_part = tuple(entry["t"])
                        weight = parse_rational(entry["p"])
                    except (KeyError, TypeError, ValueError) as exc:
                        raise StructureFormatError(
                            f"player {name!r}, type {t!r}: bad belief entry "
                            f"{entry!r} ({exc})"
                        ) from None
                    for j, lbl in zip(others, t_part, strict=False):
                        if lbl not in types[j]:
                            raise UnknownType(
                                f"player {name!r}, type {t!r}: unknown "
                                f"opponent type {lbl!r}"
                            )
                    if len(t_part) != len(others):
                        raise StructureFormatError(
                            f"player {name!r}, type {t!r}: type vector must "
                            f"cover all opponents"
                        )
                    atom = (s_part, t_part)
                    support[atom] = support.get(atom, 0) + weight
                if cond.event_id in per_event:
                    raise StructureFormatError(
                        f"player {name!r}, type {t!r}: conditioning event "
                        f"{cond.event_id!r} specified twice"
                    )
                per_event[cond.event_id] = Measure(support)
            missing = [
                c.event_id for c in family if c.event_id not in per_event
            ]
            if missing:
                raise StructureFormatError(
                    f"player {name!r}, type {t!r}: missing beliefs at "
                    f"{missing}"
                )
            beliefs[(i, t)] = CPS(
                domain=tuple(probe.extended_atoms(i)),
                family=tuple(c.event_ext for c in family),
                conditionals={
                    c.event_ext: per_event[c.event_id] for c in family
                },
            )
    ts = TypeStructure(game, types, beliefs)
    validate_type_structure(game, ts)
    return ts


def load_structure(game: DynamicGame, path):
    return parse_structure(game, load_json(path))


def save_structure(ts, path) -> None:
    dump_json(structure_to_dict(ts), path)


# -- state spaces and closures ------------------------------------------------


def parse_state_space(host, raw: Mapping):
    from .separating import StateSpace

    if not isinstance(raw, Mapping) or "real_types" not in raw:
        raise StructureFormatError("state space must carry 'real_types'")
    real = raw["real_types"]
    game = host.game
    sets = []
    for i, name in enumerate(game.players):
        labels = real.get(name)
        if not labels:
            raise StructureFormatError(
                f"state space needs at least one real type for {name!r}"
            )
        for lbl in labels:
            if lbl not in host.types[i]:
                raise UnknownType(f"{lbl!r} is not a type of {name!r}")
        sets.append(frozenset(labels))
    return StateSpace(host, tuple(sets))


def load_state_space(path, game=None, host=None):
    """Load a state space file; the referenced host structure path is
    resolved relative to the file unless a host is supplied."""
    raw = load_json(path)
    if host is None:
        ref = raw.get("host")
        if not ref:
            raise StructureFormatError("state space does not name its host")
        host_path = Path(path).parent / ref
        if game is None:
            raise StructureFormatError("loading a host requires the game")
        host = load_structure(game, host_path)
    return parse_state_space(host, raw)


def state_space_to_dict(ss, host_ref: str) -> dict:
    game = ss.host.game
    return {
        "host": host_ref,
        "real_types": {
            name: sorted(ss.real_types[i], key=ss.host.types[i].index)
            for i, name in enumerate(game.players)
        },
    }


def parse_closures(ss, raw: Mapping):
    from .separating import Closure

    game = ss.host.game
    out = []
    for i, name in enumerate(game.players):
        spec = raw.get(name)
        if not isinstance(spec, Mapping):
            raise StructureFormatError(f"closure file lacks player {name!r}")
        sets = []
        for j, other in enumerate(game.players):
            labels = spec.get(other) or ()
            for lbl in labels:
                if lbl not in ss.host.types[j]:
                    raise UnknownType(f"{lbl!r} is not a type of {other!r}")
            sets.append(
                tuple(sorted(set(labels), key=ss.host.types[j].index))
            )
        out.append(Closure(i, ss, tuple(sets)))
    return out


def closures_to_dict(closures, game) -> dict:
    return {
        game.players[cl.owner]: {
            name: list(cl.type_sets[j])
            for j, name in enumerate(game.players)
        }
        for cl in closures
    }


# -- conditional probability systems ------------------------------------------


def cps_to_dict(game, i, cps: CPS) -> dict:
    """Serialize a first-order CPS (over opponents' strategy profiles)."""
    from .game import conditioning_family

    family = conditioning_family(game, i)
    by_event = {c.event: c.event_id for c in family}
    conditionals = {}
    for event in cps.family:
        eid = by_event.get(event)
        if eid is None:
            eid = "{" + ",".join(
                "/".join(s.label for s in atom)
                for atom in sorted(event, key=game.atom_key)
            ) + "}"
        conditionals[eid] = {
            "/".join(s.label for s in atom): format_rational(p)
            for atom, p in sorted(
                cps.conditionals[event].support.items(),
                key=lambda kv: game.atom_key(kv[0]),
            )
        }
    return {"family": list(conditionals), "conditionals": conditionals}
