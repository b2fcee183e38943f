"""Set-valued solution concepts.

Strong rationalizability iterates justified survival under strong
belief in the surviving set.  A full strong best-reply set (FSBRS) asks
every member strategy for a justifying CPS that strongly believes the
opponents' part of the set and whose *whole* best-reply set stays
inside the player's part (fullness).  A misaligned FSBRS (MFSBRS)
borrows the justifying CPSs of some FSBRS but requires their best-reply
sets to stay inside the smaller, possibly disagreeing, components.

Families are enumerated by brute force over product subsets, which is
exactly what the definitions quantify over; the per-player bound of six
strategies keeps the candidate count sane, and callers can pass
explicit candidates beyond it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from . import lp
from .beliefs import CPS, _payoff_table, find_justifying_cps
from .errors import NotStatic
from .game import DynamicGame, PlayerId, ProductSet, is_static, opponent_profiles

ENUMERATION_BOUND = 6  # per-player strategy-count cap for brute force


@dataclass(frozen=True)
class SetFamily:
    """A deduplicated, canonically ordered family of product sets (or of
    one player's strategy subsets, for the player-specific kinds)."""

    kind: str
    members: tuple


@dataclass(frozen=True)
class JustificationCertificate:
    """Per (player, strategy): the CPS that justifies the strategy
    within the certified set."""

    cps: Mapping


@dataclass(frozen=True)
class MisalignmentCertificate:
    """The witnessing FSBRS together with the justifying CPSs whose
    best-reply sets stay inside the misaligned components."""

    witness: ProductSet
    cps: Mapping


def product_key(game: DynamicGame, ps: ProductSet):
    """Canonical sort key: empty last, then per-player index tuples."""
    return (
        ps.is_empty,
        tuple(
            tuple(sorted(game.strategy_index[s] for s in comp))
            for comp in ps.components
        ),
    )


def subset_key(game: DynamicGame, subset: frozenset):
    return (not subset, tuple(sorted(game.strategy_index[s] for s in subset)))


def _product_candidates(game: DynamicGame, candidates):
    if candidates is not None:
        return list(candidates)
    for i in range(game.n_players):
        if len(game.strategies(i)) > ENUMERATION_BOUND:
            raise ValueError(
                f"player {game.players[i]!r} has more than "
                f"{ENUMERATION_BOUND} strategies; pass explicit candidates"
            )
    pools = []
    for i in range(game.n_players):
        strategies = game.strategies(i)
        pools.append(
            [
                frozenset(c)
                for size in range(1, len(strategies) + 1)
                for c in itertools.combinations(strategies, size)
            ]
        )
    out = [ProductSet(tuple(frozenset() for _ in game.players))]
    out.extend(ProductSet(combo) for combo in itertools.product(*pools))
    return out


# -- strong rationalizability -------------------------------------------------


def strong_rationalizability(game: DynamicGame):
    """The decreasing sequence SR^0 >= SR^1 >= ... and its fixpoint.

    Step m+1 keeps a strategy iff some CPS makes it a sequential best
    reply while strongly believing the opponents' surviving set.
    """
    current = ProductSet(
        tuple(frozenset(game.strategies(i)) for i in range(game.n_players))
    )
    sequence = [current]
    while True:
        survivors = []
        for i in range(game.n_players):
            kept = frozenset(
                s
                for s in game.strategies(i)
                if s in current.components[i]
                and find_justifying_cps(game, i, s, believe=current)
                is not None
            )
            survivors.append(kept)
        after = ProductSet(tuple(survivors))
        if after == current:
            return sequence, current
        sequence.append(after)
        current = after


# -- full strong best-reply sets ----------------------------------------------


def is_fsbrs(game: DynamicGame, candidate: ProductSet):
    """FSBRS test; on success returns a per-strategy certificate."""
    if candidate.is_empty:
        return True, JustificationCertificate({})
    certificates = {}
    for i in range(game.n_players):
        for s in game.sort_strategies(candidate.components[i]):
            cps = find_justifying_cps(
                game, i, s, believe=candidate, fullness=candidate.components[i]
            )
            if cps is None:
                return False, None
            certificates[(i, s)] = cps
    return True, JustificationCertificate(certificates)


def enumerate_fsbrs(game: DynamicGame, candidates=None) -> SetFamily:
    members = [
        ps for ps in _product_candidates(game, candidates) if is_fsbrs(game, ps)[0]
    ]
    members = sorted(set(members), key=lambda ps: product_key(game, ps))
    return SetFamily("FSBRS", tuple(members))


def player_specific_fsbrs(
    game: DynamicGame, i: PlayerId, family: Optional[SetFamily] = None
) -> SetFamily:
    if family is None:
        family = enumerate_fsbrs(game)
    projections = {ps.components[i] for ps in family.members}
    return SetFamily(
        "FSBRS_i",
        tuple(sorted(projections, key=lambda c: subset_key(game, c))),
    )


# -- misaligned full strong best-reply sets -----------------------------------


def is_mfsbrs(
    game: DynamicGame,
    candidate: ProductSet,
    family: Optional[SetFamily] = None,
):
    """MFSBRS test: some FSBRS must contain every component strategy
    and justify it, within itself, by a CPS whose best replies all stay
    inside the candidate's component."""
    if family is None:
        family = enumerate_fsbrs(game)
    if candidate.is_empty:
        empty = ProductSet(tuple(frozenset() for _ in game.players))
        return True, MisalignmentCertificate(empty, {})
    for witness in family.members:
        certificates = {}
        good = True
        for i in range(game.n_players):
            if not candidate.components[i] <= witness.components[i]:
                good = False
                break
            for s in game.sort_strategies(candidate.components[i]):
                cps = find_justifying_cps(
                    game, i, s, believe=witness,
                    fullness=candidate.components[i],
                )
                if cps is None:
                    good = False
                    break
                certificates[(i, s)] = cps
            if not good:
                break
        if good:
            return True, MisalignmentCertificate(witness, certificates)
    return False, None


def enumerate_mfsbrs(game: DynamicGame, candidates=None) -> SetFamily:
    family = enumerate_fsbrs(game, candidates)
    members = [
        ps
        for ps in _product_candidates(game, candidates)
        if is_mfsbrs(game, ps, family)[0]
    ]
    members = sorted(set(members), key=lambda ps: product_key(game, ps))
    return SetFamily("MFSBRS", tuple(members))


def player_specific_mfsbrs(
    game: DynamicGame, i: PlayerId, family: Optional[SetFamily] = None
) -> SetFamily:
    if family is None:
        family = enumerate_mfsbrs(game)
    projections = {ps.components[i] for ps in family.members}
    return SetFamily(
        "MFSBRS_i",
        tuple(sorted(projections, key=lambda c: subset_key(game, c))),
    )


# -- static-game degenerations -------------------------------------------------


def _require_static(game: DynamicGame) -> None:
    if not is_static(game):
        raise NotStatic("this operation is defined for one-shot games only")


def correlated_rationalizability(game: DynamicGame):
    """Iterated elimination of strategies that best-reply to no joint
    belief over the remaining opponent profiles; returns the elimination
    sequence and the fixpoint P-infinity."""
    _require_static(game)
    current = ProductSet(
        tuple(frozenset(game.strategies(i)) for i in range(game.n_players))
    )
    sequence = [current]
    while True:
        survivors = []
        for i in range(game.n_players):
            others = [j for j in range(game.n_players) if j != i]
            atoms = [
                atom
                for atom in opponent_profiles(game, i)
                if all(
                    s in current.components[j] for j, s in zip(others, atom)
                )
            ]
            kept = frozenset(
                s
                for s in game.strategies(i)
                if s in current.components[i]
                and _best_reply_to_some_belief(game, i, s, atoms)
            )
            survivors.append(kept)
        after = ProductSet(tuple(survivors))
        if after == current:
            return sequence, current
        sequence.append(after)
        current = after


def _best_reply_to_some_belief(game, i, s, atoms) -> bool:
    """Exact feasibility of a belief over ``atoms`` making ``s`` weakly
    best against every own strategy."""
    if not atoms:
        return False
    table = _payoff_table(game, i)
    n = len(atoms)
    a_eq = [[1] * n]
    b_eq = [1]
    a_ub, b_ub = [], []
    for alt in game.strategies(i):
        if alt == s:
            continue
        row = [table[(alt, atom)] - table[(s, atom)] for atom in atoms]
        if all(v <= 0 for v in row):
            continue
        if all(v > 0 for v in row):
            return False
        a_ub.append(row)
        b_ub.append(0)
    return lp.feasible(a_ub, b_ub, a_eq, b_eq, n=n) is not None


def is_fbrs(game: DynamicGame, candidate: ProductSet):
    """Full best-reply set test for one-shot games: the FSBRS test with
    strong belief degenerated to belief at the initial history."""
    _require_static(game)
    return is_fsbrs(game, candidate)


def enumerate_fbrs(game: DynamicGame, candidates=None) -> SetFamily:
    _require_static(game)
    family = enumerate_fsbrs(game, candidates)
    return SetFamily("FBRS", family.members)
