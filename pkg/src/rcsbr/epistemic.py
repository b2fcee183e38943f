"""Finite type structures and the belief/strong-belief operators.

A type structure assigns every type a CPS over opponents' strategy-type
states, conditioning on the game's events crossed with the full
opponent type space.  Events of interest are per-player sets of own
(strategy, type) pairs; profiles of such events feed the operators:

  Bel_{i,h}(E)  types whose conditional at h puts mass one on E;
  SB_i(E)       conditional belief in E at every conditioning event
                consistent with E (empty E yields the empty event);
  Rat_i         pairs whose strategy best-replies to the type's
                first-order (marginal) CPS;
  CSB^m(Rat)    rationality and m-fold strong belief thereof, whose
                fixpoint is the RCSBR event.

The one-shot degeneration replaces strong belief with belief at the
initial history, giving the RCBR event.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Optional

from .beliefs import CPS, Measure, sequential_best_replies, validate_cps
from .concepts import JustificationCertificate, is_fsbrs
from .errors import EmptyTarget, NotAnFsbrs, NotStatic, StructureFormatError
from .game import (
    DynamicGame,
    PlayerId,
    ProductSet,
    is_static,
    opponent_profiles,
)

# an epistemic event of player i is a frozenset of (Strategy, type label)
# pairs; an event profile carries one such event per player
Event = frozenset
EventProfile = tuple


@dataclass(frozen=True)
class ExtendedEvent:
    """A conditioning event on opponents' strategy-type states: a
    strategy event crossed with the whole opponent type space."""

    event_ext: frozenset
    strategy_event: frozenset
    tags: tuple

    @property
    def event_id(self) -> str:
        return self.tags[0]


class TypeStructure:
    """Per-player finite type lists plus a belief function per type.

    Beliefs are CPSs over the opponents' strategy-type atoms; atoms are
    ``(strategy profile, type profile)`` pairs in player order with the
    owner removed.  Immutable after validation.
    """

    def __init__(self, game: DynamicGame, types, beliefs: Mapping):
        self.game = game
        self.types: tuple = tuple(tuple(per) for per in types)
        self.beliefs: Mapping = beliefs  # (player, type label) -> CPS

    def type_index(self, i: PlayerId, label: str) -> int:
        return self.types[i].index(label)

    def extended_atoms(self, i: PlayerId) -> tuple:
        cache = self.__dict__.setdefault("_atoms", {})
        out = cache.get(i)
        if out is None:
            others = [j for j in range(self.game.n_players) if j != i]
            type_pools = [self.types[j] for j in others]
            out = tuple(
                (s_part, t_part)
                for s_part in opponent_profiles(self.game, i)
                for t_part in itertools.product(*type_pools)
            )
            cache[i] = out
        return out

    def extended_atom_key(self, i: PlayerId, atom) -> tuple:
        s_part, t_part = atom
        others = [j for j in range(self.game.n_players) if j != i]
        return (
            self.game.atom_key(s_part),
            tuple(self.types[j].index(t) for j, t in zip(others, t_part)),
        )

    def family(self, i: PlayerId) -> tuple:
        cache = self.__dict__.setdefault("_families", {})
        out = cache.get(i)
        if out is None:
            from .beliefs import _family

            atoms = self.extended_atoms(i)
            out = tuple(
                ExtendedEvent(
                    frozenset(a for a in atoms if a[0] in cond.event),
                    cond.event,
                    cond.tags,
                )
                for cond in _family(self.game, i)
            )
            cache[i] = out
        return out

    def belief(self, i: PlayerId, label: str) -> CPS:
        return self.beliefs[(i, label)]

    def full_event(self, i: PlayerId) -> Event:
        return frozenset(
            (s, t) for s in self.game.strategies(i) for t in self.types[i]
        )


def validate_type_structure(game: DynamicGame, ts: TypeStructure):
    """Check every type's CPS on the extended space; returns a list of
    warnings (duplicate-belief types are flagged, not rejected)."""
    if ts.game is not game:
        raise StructureFormatError("structure is attached to another game")
    warnings = []
    for i in range(game.n_players):
        if not ts.types[i]:
            raise StructureFormatError(
                f"player {game.players[i]!r} has no types"
            )
        atoms = set(ts.extended_atoms(i))
        family = {ev.event_ext for ev in ts.family(i)}
        for t in ts.types[i]:
            cps = ts.beliefs.get((i, t))
            if cps is None:
                raise StructureFormatError(
                    f"type {t!r} of player {game.players[i]!r} has no belief"
                )
            if set(cps.domain) != atoms or set(cps.family) != family:
                raise StructureFormatError(
                    f"type {t!r} of player {game.players[i]!r}: belief is "
                    "not a CPS over the opponents' strategy-type space"
                )
            try:
                validate_cps(cps)
            except Exception as exc:
                raise type(exc)(
                    f"player {game.players[i]!r}, type {t!r}: {exc}"
                ) from exc
        for t, u in itertools.combinations(ts.types[i], 2):
            if _same_beliefs(ts, i, t, u):
                warnings.append(
                    f"player {game.players[i]!r}: types {t!r} and {u!r} "
                    "hold identical beliefs (redundant structure)"
                )
    return warnings


def _same_beliefs(ts, i, t, u) -> bool:
    ct, cu = ts.beliefs[(i, t)], ts.beliefs[(i, u)]
    return all(
        ct.conditionals[ev].support == cu.conditionals[ev].support
        for ev in ct.family
    )


def first_order_cps(ts: TypeStructure, i: PlayerId, label: str) -> CPS:
    """The marginal CPS over opponents' strategy profiles."""
    from .beliefs import _family

    cps = ts.belief(i, label)
    conditionals = {}
    events = []
    for cond in _family(ts.game, i):
        ext = next(ev for ev in ts.family(i) if ev.strategy_event == cond.event)
        measure = cps.conditionals[ext.event_ext]
        marginal: dict = {}
        for (s_part, _t_part), p in measure.support.items():
            marginal[s_part] = marginal.get(s_part, 0) + p
        conditionals[cond.event] = Measure(marginal)
        events.append(cond.event)
    return CPS(
        tuple(opponent_profiles(ts.game, i)), tuple(events), conditionals
    )


def opponent_event(ts: TypeStructure, i: PlayerId, profile: EventProfile):
    """Rearrange a profile of per-player events into the set of
    opponents' extended atoms it induces for player ``i``."""
    others = [j for j in range(ts.game.n_players) if j != i]
    return frozenset(
        (s_part, t_part)
        for (s_part, t_part) in ts.extended_atoms(i)
        if all(
            (s, t) in profile[j] for j, s, t in zip(others, s_part, t_part)
        )
    )


def bel(ts: TypeStructure, i: PlayerId, h, target) -> Event:
    """The conditional belief operator at ``h`` ("root" or an own
    information-set id)."""
    game = ts.game
    info = game.resolve_infoset(h)
    tag = "root" if info is None else info.infoset_id
    event = next(ev for ev in ts.family(i) if tag in ev.tags)
    target = frozenset(target)
    qualified = [
        t
        for t in ts.types[i]
        if ts.belief(i, t).conditionals[event.event_ext].mass(target) == 1
    ]
    return frozenset(
        (s, t) for s in game.strategies(i) for t in qualified
    )


def sb(ts: TypeStructure, i: PlayerId, target) -> Event:
    """The strong belief operator; SB of the empty event is empty."""
    target = frozenset(target)
    if not target:
        return frozenset()
    qualified = set(ts.types[i])
    for event in ts.family(i):
        if target & event.event_ext:
            qualified &= {
                t
                for t in ts.types[i]
                if ts.belief(i, t).conditionals[event.event_ext].mass(target)
                == 1
            }
    return frozenset(
        (s, t) for s in ts.game.strategies(i) for t in qualified
    )


def rat(game: DynamicGame, ts: TypeStructure) -> EventProfile:
    """Per player, the (strategy, type) pairs where the strategy is a
    sequential best reply to the type's first-order CPS."""
    out = []
    for i in range(game.n_players):
        pairs = set()
        for t in ts.types[i]:
            best = sequential_best_replies(game, i, first_order_cps(ts, i, t))
            pairs.update((s, t) for s in best)
        out.append(frozenset(pairs))
    return tuple(out)


def _step(ts: TypeStructure, current: EventProfile, operator) -> EventProfile:
    return tuple(
        current[i] & operator(ts, i, opponent_event(ts, i, current))
        for i in range(ts.game.n_players)
    )


def csb_sequence(game: DynamicGame, ts: TypeStructure) -> list:
    """The decreasing sequence CSB^0(Rat) = Rat, CSB^1(Rat), ... up to
    and including its fixpoint."""
    current = rat(game, ts)
    sequence = [current]
    while True:
        after = _step(ts, current, sb)
        if after == current:
            return sequence
        sequence.append(after)
        current = after


def csb(game: DynamicGame, ts: TypeStructure, m: int) -> EventProfile:
    sequence = csb_sequence(game, ts)
    return sequence[min(m, len(sequence) - 1)]


def rcsbr(game: DynamicGame, ts: TypeStructure) -> EventProfile:
    return csb_sequence(game, ts)[-1]


def rcbr_sequence(game: DynamicGame, ts: TypeStructure) -> list:
    """Static-game analogue built on the correct-belief operator."""
    if not is_static(game):
        raise NotStatic("RCBR is the one-shot degeneration; the game is not "
                        "one-shot")
    current = rat(game, ts)
    sequence = [current]
    while True:
        after = _step(
            ts, current, lambda s, i, ev: bel(s, i, "root", ev)
        )
        if after == current:
            return sequence
        sequence.append(after)
        current = after


def rcbr(game: DynamicGame, ts: TypeStructure) -> EventProfile:
    return rcbr_sequence(game, ts)[-1]


def project_profile(game: DynamicGame, profile: EventProfile) -> ProductSet:
    """Strategy projection of a profile of events, as a product set."""
    return ProductSet(
        tuple(frozenset(s for s, _t in event) for event in profile)
    )


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of the standard-structure characterization check: the
    RCSBR strategy projection must be a full strong best-reply set."""

    projection: ProductSet
    is_member: bool
    certificate: Optional[JustificationCertificate]


def check_theorem_bf(game: DynamicGame, ts: TypeStructure) -> TheoremReport:
    projection = project_profile(game, rcsbr(game, ts))
    ok, certificate = is_fsbrs(game, projection)
    return TheoremReport(projection, ok, certificate)


def type_label_for(strategy) -> str:
    return f"t_{strategy.label}"


def construct_structure_for_fsbrs(
    game: DynamicGame,
    target: ProductSet,
    certificate: Optional[JustificationCertificate] = None,
) -> TypeStructure:
    """One type per (player, strategy in the set), believing opponents
    play and think according to the justifying CPSs; the round-trip
    property (RCSBR projects back onto the set) is checked by tests,
    not assumed."""
    if target.is_empty:
        raise EmptyTarget("cannot build a structure for the empty set")
    if certificate is None:
        ok, certificate = is_fsbrs(game, target)
        if not ok:
            raise NotAnFsbrs("the target set is not a full strong "
                             "best-reply set")
    members = [game.sort_strategies(c) for c in target.components]
    types = tuple(
        tuple(type_label_for(s) for s in members[i])
        for i in range(game.n_players)
    )
    ts = TypeStructure(game, types, {})
    beliefs = {}
    for i in range(game.n_players):
        others = [j for j in range(game.n_players) if j != i]
        for s in members[i]:
            cps = certificate.cps[(i, s)]
            conditionals = {}
            for ext in ts.family(i):
                base = cps.conditionals[ext.strategy_event]
                pushed = {}
                for s_part, p in base.support.items():
                    t_part = tuple(
                        type_label_for(sj)
                        if sj in target.components[j]
                        else types[j][0]
                        for j, sj in zip(others, s_part)
                    )
                    pushed[(s_part, t_part)] = p
                conditionals[ext.event_ext] = Measure(pushed)
            beliefs[(i, type_label_for(s))] = CPS(
                tuple(ts.extended_atoms(i)),
                tuple(ev.event_ext for ev in ts.family(i)),
                conditionals,
            )
    ts = TypeStructure(game, types, beliefs)
    validate_type_structure(game, ts)
    return ts
