"""Conditional probability systems and sequential best replies.

Beliefs over a finite domain are exact-rational probability measures.  A
conditional probability system (CPS) carries one conditional per event
of an ordered family and must satisfy:

  A1  each conditional assigns mass one to its own conditioning event;
  A2  each conditional is a probability measure;
  A3  (chain rule) nu(A|C) = nu(A|B) * nu(B|C) whenever A <= B <= C
      with B and C in the family.

The existence search :func:`find_justifying_cps` runs over full-support
lexicographic systems: an ordered partition of the domain into support
levels pins down which level feeds each conditional, so sequential
rationality becomes a system of linear inequalities over level weights,
decided exactly by :mod:`rcsbr.lp`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from . import lp
from .errors import (
    ChainRuleViolation,
    NotNormalized,
    SelfMassNotOne,
    UnknownConditioningEvent,
)
from .game import (
    DynamicGame,
    PlayerId,
    ProductSet,
    Strategy,
    conditioning_family,
    full_profile,
    opponent_profiles,
    payoff,
    strategies_allowing,
)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Measure:
    """Finite measure given by its support; zero entries are dropped."""

    support: Mapping

    def __init__(self, support: Mapping):
        cleaned = {a: Fraction(p) for a, p in support.items() if p != 0}
        object.__setattr__(self, "support", cleaned)

    def mass(self, event: Iterable) -> Fraction:
        event = set(event)
        return sum(
            (p for a, p in self.support.items() if a in event), start=ZERO
        )

    @property
    def total(self) -> Fraction:
        return sum(self.support.values(), start=ZERO)

    @staticmethod
    def dirac(atom) -> "Measure":
        return Measure({atom: ONE})

    @staticmethod
    def uniform(atoms: Sequence) -> "Measure":
        atoms = list(atoms)
        share = Fraction(1, len(atoms))
        return Measure({a: share for a in atoms})


@dataclass(frozen=True)
class CPS:
    """A family of conditional measures over a finite domain."""

    domain: tuple
    family: tuple  # frozensets of atoms, in canonical order
    conditionals: Mapping  # event -> Measure

    def conditional(self, event: frozenset) -> Measure:
        try:
            return self.conditionals[event]
        except KeyError:
            raise UnknownConditioningEvent(
                f"event with {len(event)} atoms is not in the family"
            ) from None


@dataclass(frozen=True)
class LPS:
    """Ordered list of measures with disjoint supports covering the
    domain (a full-support lexicographic system)."""

    levels: tuple


def validate_cps(cps: CPS) -> None:
    """Check A1-A3, raising the first violated axiom with witnesses."""
    domain = set(cps.domain)
    if not cps.family:
        raise ValueError("conditioning family is empty")
    if frozenset(domain) not in cps.family:
        raise ValueError("conditioning family must contain the full domain")
    for event in cps.family:
        measure = cps.conditional(event)
        if (
            any(p < 0 for p in measure.support.values())
            or not set(measure.support) <= domain
            or measure.total != 1
        ):
            raise NotNormalized(
                f"conditional on {_event_name(event)} is not a probability "
                "measure"
            )
        if measure.mass(event) != 1:
            raise SelfMassNotOne(
                f"conditional on {_event_name(event)} puts mass outside the "
                "event"
            )
    for small, large in itertools.permutations(cps.family, 2):
        if not small < large:
            continue
        inner = cps.conditional(small)
        outer = cps.conditional(large)
        scale = outer.mass(small)
        for atom in sorted(small, key=repr):
            lhs = outer.mass({atom})
            rhs = inner.mass({atom}) * scale
            if lhs != rhs:
                raise ChainRuleViolation(
                    f"chain rule fails at A={{{atom!r}}} <= "
                    f"B={_event_name(small)} <= C={_event_name(large)}: "
                    f"{lhs} != {inner.mass({atom})} * {scale}",
                    a=frozenset({atom}),
                    b=small,
                    c=large,
                )


def _event_name(event: frozenset) -> str:
    return "{" + ", ".join(sorted(map(repr, event))) + "}"


def validate_lps(lps: LPS, domain: Sequence) -> None:
    seen: set = set()
    for level in lps.levels:
        if not level.support or level.total != 1:
            raise NotNormalized("every level must be a probability measure")
        if seen & set(level.support):
            raise ValueError("level supports are not pairwise disjoint")
        seen |= set(level.support)
    if seen != set(domain):
        raise ValueError("level supports must cover the domain")


def lps_to_cps(lps: LPS, family: Sequence, domain: Sequence) -> CPS:
    """Conditional on each event: the renormalized restriction to the
    event of the first level giving it positive mass.  The chain rule
    holds automatically under this first-positive-level rule."""
    validate_lps(lps, domain)
    conditionals = {}
    ordered = []
    for event in family:
        event = frozenset(event)
        if not event:
            raise ValueError("conditioning events must be non-empty")
        for level in lps.levels:
            hit = {a: p for a, p in level.support.items() if a in event}
            if hit:
                total = sum(hit.values(), start=ZERO)
                conditionals[event] = Measure(
                    {a: p / total for a, p in hit.items()}
                )
                break
        ordered.append(event)
    return CPS(tuple(domain), tuple(ordered), conditionals)


def conditionally_believes(cps: CPS, event: frozenset, target) -> bool:
    """Whether the conditional on ``event`` assigns mass one to
    ``target``."""
    event = frozenset(event)
    if event not in cps.family:
        raise UnknownConditioningEvent(
            "conditioning event is not in the family"
        )
    return cps.conditional(event).mass(target) == 1


def strongly_believes(cps: CPS, target) -> bool:
    """Mass one on ``target`` at every conditioning event that
    intersects it (vacuously true for an empty target)."""
    target = set(target)
    return all(
        cps.conditional(event).mass(target) == 1
        for event in cps.family
        if event & target
    )


def expected_payoff(
    game: DynamicGame,
    i: PlayerId,
    s_i: Strategy,
    conditioning: Iterable,
    measure: Measure,
) -> Fraction:
    """Expected payoff of ``s_i`` against a measure over opponents'
    profiles supported within the conditioning event."""
    conditioning = set(conditioning)
    if not set(measure.support) <= conditioning:
        raise ValueError("measure is not supported within the event")
    table = _payoff_table(game, i)
    return sum(
        (table[(s_i, atom)] * p for atom, p in measure.support.items()),
        start=ZERO,
    )


# -- cached per-game tables ---------------------------------------------------


def _payoff_table(game: DynamicGame, i: PlayerId) -> dict:
    cache = game.__dict__.setdefault("_payoff_tables", {})
    table = cache.get(i)
    if table is None:
        table = {
            (s, atom): payoff(game, full_profile(game, i, s, atom))[i]
            for s in game.strategies(i)
            for atom in opponent_profiles(game, i)
        }
        cache[i] = table
    return table


def _family(game: DynamicGame, i: PlayerId):
    cache = game.__dict__.setdefault("_condition_families", {})
    fam = cache.get(i)
    if fam is None:
        fam = tuple(conditioning_family(game, i))
        cache[i] = fam
    return fam


def _decision_points(game: DynamicGame, i: PlayerId):
    """Per own information set: (infoset, its conditioning event, the
    strategies S_i(h)), in declaration order."""
    cache = game.__dict__.setdefault("_decision_points", {})
    points = cache.get(i)
    if points is None:
        by_tag = {tag: c.event for c in _family(game, i) for tag in c.tags}
        points = tuple(
            (
                info,
                by_tag[info.infoset_id],
                tuple(
                    sorted(
                        strategies_allowing(game, i, info),
                        key=lambda s: game.strategy_index[s],
                    )
                ),
            )
            for info in game.infosets[i]
        )
        cache[i] = points
    return points


def sequential_best_replies(game: DynamicGame, i: PlayerId, cps: CPS) -> set:
    """The strategies that maximize conditional expected payoff at every
    own information set they allow."""
    fam = _family(game, i)
    if set(cps.family) != {c.event for c in fam}:
        raise ValueError(
            "the CPS family must match the game's conditioning family"
        )
    table = _payoff_table(game, i)
    values: dict = {}

    def value(s, event):
        key = (s, event)
        if key not in values:
            measure = cps.conditional(event)
            values[key] = sum(
                (table[(s, atom)] * p for atom, p in measure.support.items()),
                start=ZERO,
            )
        return values[key]

    best = set()
    for s in game.strategies(i):
        good = True
        for info, event, rivals in _decision_points(game, i):
            if not any(game.allows(s, nid) for nid in info.nodes):
                continue
            mine = value(s, event)
            if any(value(alt, event) > mine for alt in rivals):
                good = False
                break
        if good:
            best.add(s)
    return best


# -- justification search -----------------------------------------------------


def ordered_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Assignments of n items to 1..n ordered blocks, every block
    non-empty; canonical order (block count, then lexicographic)."""
    for k in range(1, n + 1):
        for assignment in itertools.product(range(k), repeat=n):
            if len(set(assignment)) == k:
                yield assignment


def iter_justifying_cps(
    game: DynamicGame,
    i: PlayerId,
    s_star: Strategy,
    believe: Optional[ProductSet] = None,
    fullness: Optional[Iterable] = None,
) -> Iterator[CPS]:
    """All certificates found by the ordered-partition search, in
    canonical order.

    Each yielded CPS makes ``s_star`` a sequential best reply, strongly
    believes the opponents' part of ``believe`` (if given), and leaves
    no best reply outside ``fullness`` (if given).
    """
    atoms = list(opponent_profiles(game, i))
    fam = _family(game, i)
    events = [c.event for c in fam]
    table = _payoff_table(game, i)
    others = [j for j in range(game.n_players) if j != i]

    if believe is None:
        believed = frozenset()
    else:
        believed = frozenset(
            a
            for a in atoms
            if all(s in believe.components[j] for j, s in zip(others, a))
        )

    if fullness is not None:
        fullness = frozenset(fullness)
        if s_star not in fullness:
            return
        excluded = [
            s
            for s in game.strategies(i)
            if s not in fullness and s != s_star
        ]
    else:
        excluded = []

    points = _decision_points(game, i)
    star_points = [
        (event, [alt for alt in rivals if alt != s_star])
        for info, event, rivals in points
        if any(game.allows(s_star, nid) for nid in info.nodes)
    ]
    witness_lists = []
    for s_x in excluded:
        options = [
            (event, alt)
            for info, event, rivals in points
            if any(game.allows(s_x, nid) for nid in info.nodes)
            for alt in rivals
            if alt != s_x
        ]
        witness_lists.append(options)

    n = len(atoms)
    index = {a: k for k, a in enumerate(atoms)}

    for assignment in ordered_partitions(n):
        k = max(assignment) + 1
        levels = [
            [a for a in atoms if assignment[index[a]] == r] for r in range(k)
        ]

        def first_hit(event):
            for level in levels:
                block = [a for a in level if a in event]
                if block:
                    return block
            raise AssertionError("conditioning events are non-empty")

        # strong belief is structural: the first level feeding a
        # binding event must sit inside the believed set
        if believed and any(
            not set(first_hit(event)) <= believed
            for event in events
            if event & believed
        ):
            continue

        supports = {event: first_hit(event) for event in events}

        # weak rows: s_star at least as good as each rival, per event
        weak_rows = []
        infeasible = False
        for event, rivals in star_points:
            block = supports[event]
            for alt in rivals:
                diffs = [table[(s_star, a)] - table[(alt, a)] for a in block]
                if all(d >= 0 for d in diffs):
                    continue  # holds for any positive weights
                if all(d < 0 for d in diffs):
                    infeasible = True
                    break
                weak_rows.append((block, alt))
            if infeasible:
                break
        if infeasible:
            continue

        for combo in itertools.product(*witness_lists):
            strict_rows = []
            doomed = False
            for s_x, (event, alt) in zip(excluded, combo):
                block = supports[event]
                diffs = [table[(alt, a)] - table[(s_x, a)] for a in block]
                if all(d > 0 for d in diffs):
                    continue  # strictly better with any positive weights
                if all(d <= 0 for d in diffs):
                    doomed = True
                    break
                strict_rows.append((block, s_x, alt))
            if doomed:
                continue

            weights = _solve_partition(
                atoms, index, levels, table, s_star, weak_rows, strict_rows
            )
            if weights is None:
                continue
            measures = [
                Measure({a: weights[index[a]] for a in level})
                for level in levels
            ]
            yield lps_to_cps(LPS(tuple(measures)), events, tuple(atoms))
            break  # one certificate per partition


def _solve_partition(atoms, index, levels, table, s_star, weak_rows, strict_rows):
    """Exact feasibility for one support partition: positive weights,
    one unit of mass per level, and the collected payoff inequalities.
    Strictness rides on an auxiliary slack maximized and required
    positive."""
    n = len(atoms)
    if not weak_rows and not strict_rows:
        weights = [ZERO] * n
        for level in levels:
            share = Fraction(1, len(level))
            for a in level:
                weights[index[a]] = share
        return weights

    n_vars = n + 1  # level weights plus the strictness slack
    a_eq, b_eq = [], []
    for level in levels:
        row = [ZERO] * n_vars
        for a in level:
            row[index[a]] = ONE
        a_eq.append(row)
        b_eq.append(ONE)
    a_ub, b_ub = [], []
    for k in range(n):  # w_k >= eps
        row = [ZERO] * n_vars
        row[k] = -ONE
        row[n] = ONE
        a_ub.append(row)
        b_ub.append(ZERO)
    cap = [ZERO] * n_vars
    cap[n] = ONE
    a_ub.append(cap)
    b_ub.append(ONE)
    for block, alt in weak_rows:
        row = [ZERO] * n_vars
        for a in block:
            row[index[a]] = table[(alt, a)] - table[(s_star, a)]
        a_ub.append(row)
        b_ub.append(ZERO)
    for block, s_x, alt in strict_rows:
        row = [ZERO] * n_vars
        for a in block:
            row[index[a]] = table[(s_x, a)] - table[(alt, a)]
        row[n] = ONE
        a_ub.append(row)
        b_ub.append(ZERO)

    goal = [ZERO] * n_vars
    goal[n] = ONE
    outcome = lp.maximize(goal, a_ub, b_ub, a_eq, b_eq)
    if outcome is None or outcome[0] <= 0:
        return None
    return outcome[1][:n]


def find_justifying_cps(
    game: DynamicGame,
    i: PlayerId,
    s_star: Strategy,
    believe: Optional[ProductSet] = None,
    fullness: Optional[Iterable] = None,
) -> Optional[CPS]:
    """First justifying CPS in canonical enumeration order, or ``None``
    when no full-support lexicographic system justifies ``s_star``;
    absence is an answer, not an error."""
    for cps in iter_justifying_cps(game, i, s_star, believe, fullness):
        return cps
    return None
