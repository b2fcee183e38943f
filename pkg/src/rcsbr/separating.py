"""State spaces, player-specific closures, and separating structures.

A state space marks, per player, the host types she *really* holds; it
need not be belief-closed.  A closure for player i is a belief-closed
enlargement containing her real types; the extra own-types are her
imaginary ones.  Restricting the host to a closure yields the player's
separating type structure, inside which her real RCSBR event is the
RCSBR event cut down to (strategies x real types).

The characterization: across a profile of separating structures, the
real RCSBR strategy projection always lands in the product of
player-specific misaligned families, tightening to the misaligned
family under commonality, to the product of player-specific full
families under degeneracy, and to the full family under both.  The
converse constructions realize any nonempty member of the matching
family by building certificate-driven hosts; their correctness is
established by engine round-trips, not by trusting the recipe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .beliefs import CPS, Measure
from .concepts import (
    SetFamily,
    enumerate_fsbrs,
    enumerate_mfsbrs,
    is_fsbrs,
    is_mfsbrs,
)
from .epistemic import (
    Event,
    EventProfile,
    TypeStructure,
    csb,
    project_profile,
    rcsbr,
    validate_type_structure,
)
from .errors import (
    EmptyTarget,
    MismatchedStateSpace,
    StructureFormatError,
    TargetNotInFamily,
    UnknownType,
)
from .game import DynamicGame, PlayerId, ProductSet


@dataclass(frozen=True)
class StateSpace:
    """Per player, the nonempty set of host types she actually holds
    (the strategy component is always the full strategy space)."""

    host: TypeStructure
    real_types: tuple  # per player, frozenset of host type labels

    def __post_init__(self):
        for i, real in enumerate(self.real_types):
            if not real:
                raise StructureFormatError(
                    "every player needs at least one real type"
                )
            unknown = set(real) - set(self.host.types[i])
            if unknown:
                raise UnknownType(
                    f"not host types of player "
                    f"{self.host.game.players[i]!r}: {sorted(unknown)}"
                )


@dataclass(frozen=True)
class Closure:
    """A belief-closed package of host types around one player's real
    types; her own extra types are imaginary."""

    owner: PlayerId
    state_space: StateSpace
    type_sets: tuple  # per player, tuple of host type labels (host order)

    @property
    def real(self) -> frozenset:
        return self.state_space.real_types[self.owner]

    @property
    def imaginary(self) -> tuple:
        real = self.real
        return tuple(t for t in self.type_sets[self.owner] if t not in real)

    @property
    def degenerate(self) -> bool:
        return not self.imaginary


@dataclass(frozen=True)
class SeparatingStructure:
    """The type structure induced by one player's closure, with her
    real/imaginary bookkeeping attached."""

    owner: PlayerId
    structure: TypeStructure
    closure: Closure

    @property
    def real(self) -> frozenset:
        return self.closure.real

    @property
    def degenerate(self) -> bool:
        return self.closure.degenerate


@dataclass(frozen=True)
class Taxonomy:
    degenerate: tuple  # per player
    common: bool

    @property
    def all_degenerate(self) -> bool:
        return all(self.degenerate)

    @property
    def quadrant(self) -> tuple:
        return (
            "degenerate" if self.all_degenerate else "non-degenerate",
            "common" if self.common else "non-common",
        )

    @property
    def cell(self) -> str:
        """The solution family characterizing this quadrant."""
        if self.common:
            return "FSBRS" if self.all_degenerate else "MFSBRS"
        return (
            "prod FSBRS_i" if self.all_degenerate else "prod MFSBRS_i"
        )


# -- belief-closedness ---------------------------------------------------------


def _support_types(host: TypeStructure, i: PlayerId, label: str):
    """Opponent types appearing in any conditional's support, as
    (player, type) pairs."""
    others = [j for j in range(host.game.n_players) if j != i]
    cps = host.belief(i, label)
    out = set()
    for event in cps.family:
        for _s_part, t_part in cps.conditionals[event].support:
            out.update(zip(others, t_part))
    return out


def is_belief_closed(host: TypeStructure, ss: StateSpace) -> bool:
    """Whether every real type's beliefs stay, at every conditioning
    event, within the real types of the opponents."""
    return not is_non_belief_closed(host, ss)[0]


def is_non_belief_closed(host: TypeStructure, ss: StateSpace):
    """Negation with a witness (player, conditioning-event id, type):
    the first place a belief escapes the state space."""
    game = host.game
    for i in range(game.n_players):
        others = [j for j in range(game.n_players) if j != i]
        for label in sorted(ss.real_types[i], key=host.types[i].index):
            cps = host.belief(i, label)
            for event in host.family(i):
                measure = cps.conditionals[event.event_ext]
                for _s_part, t_part in measure.support:
                    if any(
                        t not in ss.real_types[j]
                        for j, t in zip(others, t_part)
                    ):
                        return True, (i, event.event_id, label)
    return False, None


def minimal_closure(host: TypeStructure, ss: StateSpace, i: PlayerId) -> Closure:
    """The least closure of the state space for player ``i``: starting
    from her real types, keep adding every type appearing in the
    support of an included type, to the fixpoint."""
    game = host.game
    included = [set() for _ in game.players]
    included[i] = set(ss.real_types[i])
    frontier = [(i, t) for t in sorted(ss.real_types[i])]
    while frontier:
        j, label = frontier.pop()
        for k, other in _support_types(host, j, label):
            if other not in included[k]:
                included[k].add(other)
                frontier.append((k, other))
    type_sets = tuple(
        tuple(t for t in host.types[j] if t in included[j])
        for j in range(game.n_players)
    )
    closure = Closure(i, ss, type_sets)
    validate_closure(host, closure)
    return closure


def validate_closure(host: TypeStructure, closure: Closure) -> None:
    """A closure must contain the owner's real types and induce a
    belief-closed space; user-supplied closures are checked, not
    trusted."""
    ss = closure.state_space
    game = host.game
    for j, labels in enumerate(closure.type_sets):
        unknown = set(labels) - set(host.types[j])
        if unknown:
            raise UnknownType(
                f"not host types of player {game.players[j]!r}: "
                f"{sorted(unknown)}"
            )
        if not labels:
            raise StructureFormatError(
                f"closure drops all types of player {game.players[j]!r}"
            )
    if not closure.real <= set(closure.type_sets[closure.owner]):
        raise StructureFormatError(
            "a closure must contain the owner's real types"
        )
    for j in range(game.n_players):
        others = [k for k in range(game.n_players) if k != j]
        for label in closure.type_sets[j]:
            for k, other in _support_types(host, j, label):
                if other not in closure.type_sets[k]:
                    raise StructureFormatError(
                        f"not belief-closed: type {label!r} of player "
                        f"{game.players[j]!r} believes {other!r} of "
                        f"{game.players[k]!r}, which the closure omits"
                    )


def _restrict_structure(host: TypeStructure, type_sets) -> TypeStructure:
    """The host with type sets cut down to a belief-closed selection;
    beliefs are inherited verbatim (re-domained, same supports)."""
    game = host.game
    probe = TypeStructure(game, type_sets, {})
    beliefs = {}
    for i in range(game.n_players):
        by_strategy_event = {
            ev.strategy_event: ev for ev in probe.family(i)
        }
        for t in type_sets[i]:
            cps = host.belief(i, t)
            conditionals = {}
            for ev in host.family(i):
                measure = cps.conditionals[ev.event_ext]
                target = by_strategy_event[ev.strategy_event]
                conditionals[target.event_ext] = Measure(measure.support)
            beliefs[(i, t)] = CPS(
                tuple(probe.extended_atoms(i)),
                tuple(ev.event_ext for ev in probe.family(i)),
                conditionals,
            )
    ts = TypeStructure(game, type_sets, beliefs)
    validate_type_structure(game, ts)
    return ts


def induce_separating_structure(
    host: TypeStructure, closure: Closure
) -> SeparatingStructure:
    validate_closure(host, closure)
    structure = _restrict_structure(host, closure.type_sets)
    return SeparatingStructure(closure.owner, structure, closure)


def classify(profile: Sequence[SeparatingStructure]) -> Taxonomy:
    """Taxonomy of a profile of separating structures over one state
    space: per-player degeneracy, plus commonality of the closures
    (beliefs agree automatically, being host-inherited)."""
    spaces = {id(st.closure.state_space) for st in profile}
    if len(spaces) > 1 and len(
        {
            (id(st.closure.state_space.host), st.closure.state_space.real_types)
            for st in profile
        }
    ) > 1:
        raise MismatchedStateSpace(
            "separating structures live over different state spaces"
        )
    if [st.owner for st in profile] != list(range(len(profile))):
        raise MismatchedStateSpace("profile must carry one structure per "
                                   "player, in player order")
    degenerate = tuple(st.degenerate for st in profile)
    reference = profile[0].closure.type_sets
    common = all(st.closure.type_sets == reference for st in profile)
    return Taxonomy(degenerate, common)


# -- real epistemic events ------------------------------------------------------


def _cut_to_real(event: Event, real: frozenset) -> Event:
    return frozenset((s, t) for s, t in event if t in real)


def real_csb_i(
    game: DynamicGame, st: SeparatingStructure, m: int
) -> Event:
    """Player's m-round event cut down to her real types, computed
    inside her own separating structure."""
    return _cut_to_real(csb(game, st.structure, m)[st.owner], st.real)


def real_rcsbr_i(game: DynamicGame, st: SeparatingStructure) -> Event:
    return _cut_to_real(rcsbr(game, st.structure)[st.owner], st.real)


def real_rcsbr_profile(
    game: DynamicGame, profile: Sequence[SeparatingStructure]
):
    """Product of the per-player real RCSBR events and its strategy
    projection (empty if any component is empty)."""
    events: EventProfile = tuple(
        real_rcsbr_i(game, st) for st in profile
    )
    return events, project_profile(game, events)


# -- the characterization, forward direction -----------------------------------


@dataclass(frozen=True)
class Prop1Part:
    name: str
    applicable: bool
    holds: bool
    witness: Optional[object]


@dataclass(frozen=True)
class Prop1Report:
    taxonomy: Taxonomy
    events: EventProfile
    projection: ProductSet
    parts: tuple

    @property
    def ok(self) -> bool:
        return all(p.holds for p in self.parts if p.applicable)


def verify_prop1(
    game: DynamicGame,
    profile: Sequence[SeparatingStructure],
    fsbrs: Optional[SetFamily] = None,
    mfsbrs: Optional[SetFamily] = None,
) -> Prop1Report:
    """Check every applicable membership claim for the real RCSBR
    projection; failures are reported as counterexamples (none should
    ever occur)."""
    taxonomy = classify(profile)
    events, projection = real_rcsbr_profile(game, profile)
    if fsbrs is None:
        fsbrs = enumerate_fsbrs(game)
    if mfsbrs is None:
        mfsbrs = enumerate_mfsbrs(game)

    def component_witness(family, i):
        for member in family.members:
            if member.components[i] == projection.components[i]:
                return member
        return None

    parts = []
    witnesses = [component_witness(mfsbrs, i) for i in range(game.n_players)]
    parts.append(
        Prop1Part(
            "projection in prod MFSBRS_i",
            True,
            all(w is not None for w in witnesses),
            tuple(witnesses),
        )
    )
    member = projection in mfsbrs.members
    parts.append(
        Prop1Part(
            "projection in MFSBRS",
            taxonomy.common,
            member,
            projection if member else None,
        )
    )
    fwitnesses = [component_witness(fsbrs, i) for i in range(game.n_players)]
    parts.append(
        Prop1Part(
            "projection in prod FSBRS_i",
            taxonomy.all_degenerate,
            all(w is not None for w in fwitnesses),
            tuple(fwitnesses),
        )
    )
    fmember = projection in fsbrs.members
    parts.append(
        Prop1Part(
            "projection in FSBRS",
            taxonomy.common and taxonomy.all_degenerate,
            fmember,
            projection if fmember else None,
        )
    )
    return Prop1Report(taxonomy, events, projection, tuple(parts))


# -- the characterization, converse direction ----------------------------------


@dataclass(frozen=True)
class Prop2Construction:
    host: TypeStructure
    state_space: StateSpace
    closures: tuple
    profile: tuple
    taxonomy: Taxonomy


def _certificate_structure(
    game: DynamicGame, support: ProductSet, cps_map: Mapping, rename=None
) -> TypeStructure:
    """One type per (player, strategy in the support set); first-order
    beliefs follow the supplied justifying CPSs, second-order beliefs
    send each opponent strategy inside the support to its own type and
    everything else to a designated type."""
    from .epistemic import type_label_for

    def label(j, s):
        base = type_label_for(s)
        return rename(j, base) if rename else base

    members = [game.sort_strategies(c) for c in support.components]
    types = tuple(
        tuple(label(i, s) for s in members[i]) for i in range(game.n_players)
    )
    probe = TypeStructure(game, types, {})
    beliefs = {}
    for i in range(game.n_players):
        others = [j for j in range(game.n_players) if j != i]
        for s in members[i]:
            cps = cps_map[(i, s)]
            conditionals = {}
            for ext in probe.family(i):
                base = cps.conditionals[ext.strategy_event]
                pushed = {}
                for s_part, p in base.support.items():
                    t_part = tuple(
                        label(j, sj)
                        if sj in support.components[j]
                        else types[j][0]
                        for j, sj in zip(others, s_part)
                    )
                    pushed[(s_part, t_part)] = p
                conditionals[ext.event_ext] = Measure(pushed)
            beliefs[(i, label(i, s))] = CPS(
                tuple(probe.extended_atoms(i)),
                tuple(ev.event_ext for ev in probe.family(i)),
                conditionals,
            )
    ts = TypeStructure(game, types, beliefs)
    validate_type_structure(game, ts)
    return ts


def _union_structures(game: DynamicGame, copies: Sequence[TypeStructure]):
    """Disjoint-label union of structures over one game; each copy stays
    belief-closed inside the union."""
    types = tuple(
        tuple(t for ts in copies for t in ts.types[i])
        for i in range(game.n_players)
    )
    probe = TypeStructure(game, types, {})
    beliefs = {}
    for ts in copies:
        for i in range(game.n_players):
            by_strategy_event = {
                ev.strategy_event: ev for ev in probe.family(i)
            }
            for t in ts.types[i]:
                cps = ts.belief(i, t)
                conditionals = {}
                for ev in ts.family(i):
                    target = by_strategy_event[ev.strategy_event]
                    conditionals[target.event_ext] = Measure(
                        cps.conditionals[ev.event_ext].support
                    )
                beliefs[(i, t)] = CPS(
                    tuple(probe.extended_atoms(i)),
                    tuple(ev.event_ext for ev in probe.family(i)),
                    conditionals,
                )
    union = TypeStructure(game, types, beliefs)
    validate_type_structure(game, union)
    return union


def _mfsbrs_certificates(game, target, fsbrs_family):
    """The witnessing FSBRS and a full CPS map covering the witness:
    misaligned certificates for strategies in the target, plain
    fullness certificates for the rest of the witness."""
    ok, cert = is_mfsbrs(game, target, fsbrs_family)
    if not ok:
        return None
    witness = cert.witness
    _, fcert = is_fsbrs(game, witness)
    cps_map = dict(fcert.cps)
    cps_map.update(cert.cps)
    return witness, cps_map


def construct_prop2(
    game: DynamicGame,
    target: ProductSet,
    common: bool,
    degenerate: bool,
    fsbrs: Optional[SetFamily] = None,
    mfsbrs: Optional[SetFamily] = None,
) -> Prop2Construction:
    """Realize the target as the real RCSBR projection of a profile of
    separating structures in the requested taxonomy row/column.

    The target must belong to the family characterizing the requested
    cell.  The construction may come out more aligned than requested
    (e.g. with no imaginary types when the target is itself a full
    strong best-reply set); the actual taxonomy is reported and the
    projection round-trip is what the tests pin down.
    """
    if target.is_empty:
        raise EmptyTarget("construction targets must be nonempty")
    if fsbrs is None:
        fsbrs = enumerate_fsbrs(game)
    if common and degenerate:
        ok, cert = is_fsbrs(game, target)
        if not ok:
            raise TargetNotInFamily("target is not a full strong "
                                    "best-reply set")
        host = _certificate_structure(game, target, cert.cps)
        return _common_package(game, host, target, target)
    if common and not degenerate:
        if mfsbrs is None:
            mfsbrs = enumerate_mfsbrs(game)
        if target not in mfsbrs.members:
            raise TargetNotInFamily("target is not a misaligned full "
                                    "strong best-reply set")
        witness, cps_map = _mfsbrs_certificates(game, target, fsbrs)
        host = _certificate_structure(game, witness, cps_map)
        return _common_package(game, host, witness, target)
    # non-common rows: per-player witnesses, disjoint copies
    per_player = []
    for j in range(game.n_players):
        found = None
        for member in fsbrs.members if degenerate else (
            mfsbrs or enumerate_mfsbrs(game)
        ).members:
            if member.components[j] == target.components[j]:
                found = member
                break
        if found is None:
            raise TargetNotInFamily(
                f"component of player {game.players[j]!r} is not "
                f"player-specific {'FSBRS' if degenerate else 'MFSBRS'}"
            )
        per_player.append(found)
    copies = []
    for j, member in enumerate(per_player):
        suffix = game.players[j]
        rename = lambda _k, base, s=suffix: f"{base}@{s}"
        if degenerate:
            _, cert = is_fsbrs(game, member)
            copies.append(
                _certificate_structure(game, member, cert.cps, rename)
            )
        else:
            witness, cps_map = _mfsbrs_certificates(game, member, fsbrs)
            copies.append(
                _certificate_structure(game, witness, cps_map, rename)
            )
    host = _union_structures(game, copies)
    from .epistemic import type_label_for

    reals = []
    for j in range(game.n_players):
        suffix = game.players[j]
        reals.append(
            frozenset(
                f"{type_label_for(s)}@{suffix}"
                for s in target.components[j]
            )
        )
    ss = StateSpace(host, tuple(reals))
    closures = tuple(
        Closure(
            j,
            ss,
            tuple(tuple(copies[j].types[k]) for k in range(game.n_players)),
        )
        for j in range(game.n_players)
    )
    profile = tuple(
        induce_separating_structure(host, cl) for cl in closures
    )
    return Prop2Construction(host, ss, closures, profile, classify(profile))


def _common_package(game, host, witness, target):
    """State space marking the target strategies' types as real, with
    the full host as everyone's (common) closure."""
    from .epistemic import type_label_for

    reals = tuple(
        frozenset(type_label_for(s) for s in target.components[i])
        for i in range(game.n_players)
    )
    ss = StateSpace(host, reals)
    full_sets = tuple(tuple(host.types[j]) for j in range(game.n_players))
    closures = tuple(
        Closure(i, ss, full_sets) for i in range(game.n_players)
    )
    profile = tuple(
        induce_separating_structure(host, cl) for cl in closures
    )
    return Prop2Construction(host, ss, closures, profile, classify(profile))
