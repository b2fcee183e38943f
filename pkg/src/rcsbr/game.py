"""Finite dynamic games with perfect recall.

A game is a rooted tree of histories.  Every step of a history is a
profile of actions, one per player listed as moving at the parent node;
players not listed are treated as holding a single implicit "pass"
action, which never shows up in strategies or labels.  A player is
*active* at a node when she has at least two actions there, and her
information sets partition exactly the nodes where she is active.

Strategies come in two flavours: *standard* strategies assign an action
to every own information set, while (reduced) strategies are maximal
behavioural-equivalence classes and assign actions only to the own
information sets they themselves allow.  Solution concepts work with
reduced strategies throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Optional, Sequence

from .errors import (
    BadPayoffArity,
    DanglingChild,
    EmptyActionSet,
    GameFormatError,
    InfoSetActionMismatch,
    NotATree,
    PerfectRecallViolation,
    UnknownInfoSet,
)
from .rational import parse_rational

ROOT = "root"  # label for the initial history in conditioning families

PlayerId = int


@dataclass(frozen=True)
class DecisionNode:
    node_id: str
    movers: tuple[PlayerId, ...]
    actions: tuple[tuple[str, ...], ...]  # aligned with movers
    children: Mapping[tuple[str, ...], str]


@dataclass(frozen=True)
class TerminalNode:
    node_id: str
    payoffs: tuple[Fraction, ...]


@dataclass(frozen=True)
class Infoset:
    player: PlayerId
    infoset_id: str
    nodes: tuple[str, ...]


@dataclass(frozen=True)
class StandardStrategy:
    """Total map from own information sets to actions."""

    owner: PlayerId
    choice: tuple[tuple[str, str], ...]  # (infoset id, action), declaration order

    def action_at(self, infoset_id: str) -> str:
        for iid, action in self.choice:
            if iid == infoset_id:
                return action
        raise KeyError(infoset_id)


@dataclass(frozen=True)
class Strategy:
    """Reduced strategy: one behavioural-equivalence class of standard
    strategies, defined exactly on the own information sets it allows."""

    owner: PlayerId
    plan: tuple[tuple[str, str], ...]  # (infoset id, action), declaration order
    label: str

    def action_at(self, infoset_id: str) -> Optional[str]:
        for iid, action in self.plan:
            if iid == infoset_id:
                return action
        return None

    def __repr__(self):
        return f"Strategy({self.label!r})"


StrategyProfile = tuple  # one Strategy per player, in player order


@dataclass(frozen=True)
class ConditioningEvent:
    """A set of opponent strategy profiles, tagged with the information
    sets that generate it."""

    event: frozenset
    tags: tuple[str, ...]

    @property
    def event_id(self) -> str:
        return self.tags[0]


@dataclass(frozen=True)
class ProductSet:
    """Per-player strategy subsets.  Any empty component collapses the
    whole product to the empty set, so equal subsets of the profile
    space compare equal."""

    components: tuple[frozenset, ...]

    def __init__(self, components):
        components = tuple(frozenset(c) for c in components)
        if any(not c for c in components):
            components = tuple(frozenset() for _ in components)
        object.__setattr__(self, "components", components)

    @property
    def is_empty(self) -> bool:
        return any(not c for c in self.components)

    def component(self, i: PlayerId) -> frozenset:
        return self.components[i]

    def contains(self, other: "ProductSet") -> bool:
        return all(
            o <= c for o, c in zip(other.components, self.components)
        )


class DynamicGame:
    """A validated extensive form.  Immutable after construction; all
    derived tables are cached and safe for concurrent reads."""

    def __init__(self, players, root, nodes, infosets):
        self.players: tuple[str, ...] = players
        self.root: str = root
        self.nodes: Mapping[str, DecisionNode | TerminalNode] = nodes
        # per player, information sets in declaration order
        self.infosets: tuple[tuple[Infoset, ...], ...] = infosets

    @property
    def n_players(self) -> int:
        return len(self.players)

    def player_index(self, name: str) -> PlayerId:
        try:
            return self.players.index(name)
        except ValueError:
            raise GameFormatError(f"unknown player {name!r}") from None

    @cached_property
    def parent(self) -> dict:
        out = {}
        for node in self.nodes.values():
            if isinstance(node, DecisionNode):
                for profile, child in node.children.items():
                    out[child] = (node.node_id, profile)
        return out

    @cached_property
    def path(self) -> dict:
        """node id -> tuple of (ancestor id, action profile) steps."""
        out = {self.root: ()}
        stack = [self.root]
        while stack:
            nid = stack.pop()
            node = self.nodes[nid]
            if isinstance(node, DecisionNode):
                for profile in sorted(node.children):
                    child = node.children[profile]
                    out[child] = out[nid] + ((nid, profile),)
                    stack.append(child)
        return out

    @cached_property
    def infoset_of(self) -> dict:
        """(player, node id) -> Infoset, for active players."""
        out = {}
        for per_player in self.infosets:
            for info in per_player:
                for nid in info.nodes:
                    out[(info.player, nid)] = info
        return out

    def is_active(self, i: PlayerId, node: DecisionNode) -> bool:
        return i in node.movers and len(node.actions[node.movers.index(i)]) >= 2

    def action_of(self, node: DecisionNode, profile: tuple[str, ...], i: PlayerId):
        if i in node.movers:
            return profile[node.movers.index(i)]
        return None

    # -- strategies ---------------------------------------------------

    def standard_strategies(self, i: PlayerId) -> tuple[StandardStrategy, ...]:
        return self._standard[i]

    @cached_property
    def _standard(self) -> tuple[tuple[StandardStrategy, ...], ...]:
        out = []
        for i in range(self.n_players):
            infos = self.infosets[i]
            pools = []
            for info in infos:
                node = self.nodes[info.nodes[0]]
                pools.append(node.actions[node.movers.index(i)])
            combos = itertools.product(*pools) if infos else [()]
            out.append(
                tuple(
                    StandardStrategy(
                        i, tuple(zip((f.infoset_id for f in infos), combo))
                    )
                    for combo in combos
                )
            )
        return tuple(out)

    def strategies(self, i: PlayerId) -> tuple[Strategy, ...]:
        return self._reduced[i]

    @cached_property
    def _reduced(self) -> tuple[tuple[Strategy, ...], ...]:
        out = []
        for i in range(self.n_players):
            seen = {}
            for std in self._standard[i]:
                allowed = self._own_allowed_standard(std)
                plan = tuple(
                    (iid, action)
                    for iid, action in std.choice
                    if iid in allowed
                )
                if plan not in seen:
                    label = "-".join(action for _, action in plan) or "·"
                    seen[plan] = Strategy(i, plan, label)
            out.append(tuple(seen.values()))
        return tuple(out)

    def _own_allowed_standard(self, std: StandardStrategy) -> set:
        """Own information-set ids reachable when the owner follows the
        given choices (opponent moves never preclude)."""
        i = std.owner
        allowed = set()
        for info in self.infosets[i]:
            for nid in info.nodes:
                if self._i_consistent(i, nid, dict(std.choice)):
                    allowed.add(info.infoset_id)
                    break
        return allowed

    def _i_consistent(self, i: PlayerId, nid: str, choice: dict) -> bool:
        for anc, profile in self.path[nid]:
            node = self.nodes[anc]
            if self.is_active(i, node):
                planned = choice.get(self.infoset_of[(i, anc)].infoset_id)
                if planned is None or planned != self.action_of(node, profile, i):
                    return False
        return True

    def allows(self, strategy: Strategy, nid: str) -> bool:
        """Whether the owner's choices keep the history reachable."""
        return self._i_consistent(strategy.owner, nid, dict(strategy.plan))

    @cached_property
    def strategy_index(self) -> dict:
        out = {}
        for i in range(self.n_players):
            for k, s in enumerate(self.strategies(i)):
                out[s] = k
        return out

    def sort_strategies(self, strategies) -> list:
        return sorted(strategies, key=lambda s: (s.owner, self.strategy_index[s]))

    def atom_key(self, atom: tuple) -> tuple:
        return tuple(self.strategy_index[s] for s in atom)

    # -- information-set queries --------------------------------------

    def resolve_infoset(self, h):
        """Resolve ``"root"``/``None``, an :class:`Infoset`, a
        ``(player, id)`` pair, or a bare id string (if unambiguous)."""
        if h is None or h == ROOT:
            return None
        if isinstance(h, Infoset):
            if self.infoset_of.get((h.player, h.nodes[0])) is h:
                return h
            h = (h.player, h.infoset_id)
        if isinstance(h, tuple) and len(h) == 2:
            player, iid = h
            if isinstance(player, str):
                player = self.player_index(player)
            for info in self.infosets[player]:
                if info.infoset_id == iid:
                    return info
            raise UnknownInfoSet(f"player {self.players[player]!r} has no "
                                 f"information set {iid!r}")
        if isinstance(h, str):
            hits = [
                info
                for per_player in self.infosets
                for info in per_player
                if info.infoset_id == h
            ]
            if not hits:
                raise UnknownInfoSet(f"no information set {h!r}")
            if len(hits) > 1:
                raise UnknownInfoSet(f"information set id {h!r} is ambiguous")
            return hits[0]
        raise UnknownInfoSet(f"cannot resolve information set {h!r}")

    @cached_property
    def _allowing(self) -> dict:
        """(infoset owner, infoset id) -> per-player tuple of strategy sets."""
        table = {}
        for per_player in self.infosets:
            for info in per_player:
                per = []
                for j in range(self.n_players):
                    per.append(
                        frozenset(
                            s
                            for s in self.strategies(j)
                            if any(self.allows(s, nid) for nid in info.nodes)
                        )
                    )
                table[(info.player, info.infoset_id)] = tuple(per)
        return table


# ---------------------------------------------------------------------------
# module-level operations


def validate_game(raw: Mapping) -> DynamicGame:
    """Validate a raw game description and return a :class:`DynamicGame`.

    The description format is documented in the README; see also the
    files under ``fixtures/``.
    """
    if not isinstance(raw, Mapping):
        raise GameFormatError("game description must be a mapping")
    players = raw.get("players")
    if (
        not isinstance(players, Sequence)
        or isinstance(players, (str, bytes))
        or len(players) < 2
        or len(set(players)) != len(players)
        or not all(isinstance(p, str) for p in players)
    ):
        raise GameFormatError("'players' must list at least two distinct names")
    players = tuple(players)
    n = len(players)

    raw_nodes = raw.get("nodes")
    if not isinstance(raw_nodes, Mapping) or not raw_nodes:
        raise GameFormatError("'nodes' must be a non-empty mapping")
    root = raw.get("root")
    if root not in raw_nodes:
        raise NotATree(f"root {root!r} is not a node")

    nodes: dict[str, DecisionNode | TerminalNode] = {}
    for nid, spec in raw_nodes.items():
        if not isinstance(spec, Mapping):
            raise GameFormatError(f"node {nid!r} must be a mapping")
        has_payoffs = "payoffs" in spec
        has_moves = "actions" in spec or "children" in spec
        if has_payoffs == has_moves:
            raise GameFormatError(
                f"node {nid!r} must have either 'payoffs' or "
                "'actions'+'children'"
            )
        if has_payoffs:
            payoffs = spec["payoffs"]
            if not isinstance(payoffs, Sequence) or len(payoffs) != n:
                raise BadPayoffArity(
                    f"node {nid!r} needs exactly {n} payoffs"
                )
            try:
                vector = tuple(parse_rational(v) for v in payoffs)
            except ValueError as exc:
                raise GameFormatError(f"node {nid!r}: {exc}") from None
            nodes[nid] = TerminalNode(nid, vector)
            continue
        actions = spec.get("actions")
        children = spec.get("children")
        if not isinstance(actions, Mapping) or not actions:
            raise EmptyActionSet(f"node {nid!r} lists no actions")
        movers = []
        pools = []
        for name in players:  # player order, not file order
            if name not in actions:
                continue
            pool = actions[name]
            if not isinstance(pool, Sequence) or not pool:
                raise EmptyActionSet(f"node {nid!r}: empty actions for {name!r}")
            if len(set(pool)) != len(pool):
                raise GameFormatError(
                    f"node {nid!r}: duplicate actions for {name!r}"
                )
            movers.append(players.index(name))
            pools.append(tuple(pool))
        unknown = set(actions) - set(players)
        if unknown:
            raise GameFormatError(
                f"node {nid!r}: unknown players {sorted(unknown)}"
            )
        if not isinstance(children, Mapping):
            raise GameFormatError(f"node {nid!r}: 'children' must be a mapping")
        child_map = {}
        for key, target in children.items():
            profile = tuple(key.split(","))
            if len(profile) != len(movers) or any(
                a not in pool for a, pool in zip(profile, pools)
            ):
                raise GameFormatError(
                    f"node {nid!r}: child key {key!r} does not match the "
                    "declared actions"
                )
            if profile in child_map:
                raise GameFormatError(f"node {nid!r}: duplicate child {key!r}")
            child_map[profile] = target
        for profile in itertools.product(*pools):
            if profile not in child_map:
                raise DanglingChild(
                    f"node {nid!r}: no child for profile {','.join(profile)!r}"
                )
        nodes[nid] = DecisionNode(nid, tuple(movers), tuple(pools), child_map)

    # arborescence checks
    seen_parent: dict[str, str] = {}
    for nid, node in nodes.items():
        if isinstance(node, DecisionNode):
            for profile, child in node.children.items():
                if child not in nodes:
                    raise DanglingChild(
                        f"node {nid!r}: child {child!r} does not exist"
                    )
                if child in seen_parent or child == root:
                    raise NotATree(f"node {child!r} has more than one parent "
                                   "or is the root")
                seen_parent[child] = nid
    reachable = {root}
    stack = [root]
    while stack:
        node = nodes[stack.pop()]
        if isinstance(node, DecisionNode):
            for child in node.children.values():
                if child not in reachable:
                    reachable.add(child)
                    stack.append(child)
    unreachable = set(nodes) - reachable
    if unreachable:
        raise NotATree(f"unreachable nodes: {sorted(unreachable)}")

    # information sets
    raw_infosets = raw.get("infosets", {})
    if not isinstance(raw_infosets, Mapping):
        raise GameFormatError("'infosets' must be a mapping")
    unknown = set(raw_infosets) - set(players)
    if unknown:
        raise GameFormatError(f"infosets for unknown players {sorted(unknown)}")
    infosets: list[tuple[Infoset, ...]] = []
    for i, name in enumerate(players):
        per_player = []
        covered: dict[str, str] = {}
        for iid, members in (raw_infosets.get(name) or {}).items():
            if not isinstance(members, Sequence) or not members:
                raise GameFormatError(f"information set {iid!r} is empty")
            reference = None
            for nid in members:
                node = nodes.get(nid)
                if not isinstance(node, DecisionNode):
                    raise GameFormatError(
                        f"information set {iid!r}: {nid!r} is not a "
                        "decision node"
                    )
                if i not in node.movers or len(
                    node.actions[node.movers.index(i)]
                ) < 2:
                    raise InfoSetActionMismatch(
                        f"information set {iid!r}: player {name!r} is not "
                        f"active at node {nid!r}"
                    )
                pool = node.actions[node.movers.index(i)]
                if reference is None:
                    reference = pool
                elif pool != reference:
                    raise InfoSetActionMismatch(
                        f"information set {iid!r}: action lists differ "
                        f"across its nodes"
                    )
                if nid in covered:
                    raise GameFormatError(
                        f"node {nid!r} appears in two information sets of "
                        f"player {name!r}"
                    )
                covered[nid] = iid
            per_player.append(Infoset(i, iid, tuple(members)))
        for nid, node in nodes.items():
            if isinstance(node, DecisionNode) and i in node.movers:
                if len(node.actions[node.movers.index(i)]) >= 2 and nid not in covered:
                    raise GameFormatError(
                        f"active node {nid!r} of player {name!r} belongs to "
                        "no information set"
                    )
        infosets.append(tuple(per_player))

    game = DynamicGame(players, root, nodes, tuple(infosets))

    # perfect recall: equal own records within every cell
    for i in range(n):
        for info in game.infosets[i]:
            records = []
            for nid in info.nodes:
                record = []
                for anc, profile in game.path[nid]:
                    node = nodes[anc]
                    if game.is_active(i, node):
                        record.append(
                            (
                                game.infoset_of[(i, anc)].infoset_id,
                                game.action_of(node, profile, i),
                            )
                        )
                records.append(tuple(record))
            if len(set(records)) > 1:
                raise PerfectRecallViolation(
                    f"information set {info.infoset_id!r} of player "
                    f"{players[i]!r} mixes histories with different "
                    "own-move records"
                )
    return game


def enumerate_standard_strategies(game: DynamicGame, i: PlayerId):
    """All total maps from player ``i``'s information sets to actions,
    in a deterministic product order."""
    return list(game.standard_strategies(i))


def reduce_strategies(game: DynamicGame, i: PlayerId):
    """Behavioural-equivalence classes of player ``i``'s standard
    strategies, labelled by the actions taken at own reachable sets."""
    return list(game.strategies(i))


def strategies_allowing(game: DynamicGame, i: PlayerId, h):
    """The set S_i(h) of player ``i``'s strategies that allow ``h``
    (``"root"`` yields all of S_i)."""
    info = game.resolve_infoset(h)
    if info is None:
        return set(game.strategies(i))
    return set(game._allowing[(info.player, info.infoset_id)][i])


def reachable_infosets(game: DynamicGame, strategy: Strategy, player=None):
    """The information sets (of any player, or of ``player`` only) not
    precluded by the given strategy's own choices."""
    out = set()
    for per_player in game.infosets:
        for info in per_player:
            if player is not None and info.player != player:
                continue
            if any(game.allows(strategy, nid) for nid in info.nodes):
                out.add(info)
    return out


def opponent_profiles(game: DynamicGame, i: PlayerId):
    """S_{-i}: tuples of opponents' strategies in player order."""
    pools = [game.strategies(j) for j in range(game.n_players) if j != i]
    return [tuple(combo) for combo in itertools.product(*pools)]


def conditioning_family(game: DynamicGame, i: PlayerId):
    """The ordered family of conditioning events {S_{-i}(h)}, with the
    root event first and content duplicates merged into one tagged
    event."""
    events: list[frozenset] = []
    tags: list[list[str]] = []

    def add(event, tag):
        for k, existing in enumerate(events):
            if existing == event:
                tags[k].append(tag)
                return
        events.append(event)
        tags.append([tag])

    add(frozenset(opponent_profiles(game, i)), ROOT)
    others = [j for j in range(game.n_players) if j != i]
    for info in game.infosets[i]:
        pools = [
            sorted(
                strategies_allowing(game, j, info),
                key=lambda s: game.strategy_index[s],
            )
            for j in others
        ]
        event = frozenset(tuple(c) for c in itertools.product(*pools))
        add(event, info.infoset_id)
    return [
        ConditioningEvent(event, tuple(tag)) for event, tag in zip(events, tags)
    ]


def full_profile(game: DynamicGame, i: PlayerId, s_i: Strategy, atom: tuple):
    """Insert player ``i``'s strategy into an opponent profile."""
    profile = list(atom)
    profile.insert(i, s_i)
    return tuple(profile)


def payoff(game: DynamicGame, profile: Sequence[Strategy]):
    """Payoff vector at the unique terminal history induced by a
    profile of reduced strategies."""
    if len(profile) != game.n_players or any(
        s.owner != i for i, s in enumerate(profile)
    ):
        raise GameFormatError("profile must carry one strategy per player")
    nid = game.root
    while True:
        node = game.nodes[nid]
        if isinstance(node, TerminalNode):
            return node.payoffs
        chosen = []
        for k, j in enumerate(node.movers):
            if len(node.actions[k]) >= 2:
                info = game.infoset_of[(j, nid)]
                action = profile[j].action_at(info.infoset_id)
                if action is None:
                    raise GameFormatError(
                        f"strategy {profile[j].label!r} has no choice at "
                        f"{info.infoset_id!r}"
                    )
            else:
                action = node.actions[k][0]
            chosen.append(action)
        nid = node.children[tuple(chosen)]


def standard_payoff(game: DynamicGame, profile: Sequence[StandardStrategy]):
    """Payoff under standard strategies (used to cross-check reduction)."""
    nid = game.root
    while True:
        node = game.nodes[nid]
        if isinstance(node, TerminalNode):
            return node.payoffs
        chosen = []
        for k, j in enumerate(node.movers):
            if len(node.actions[k]) >= 2:
                info = game.infoset_of[(j, nid)]
                chosen.append(profile[j].action_at(info.infoset_id))
            else:
                chosen.append(node.actions[k][0])
        nid = node.children[tuple(chosen)]


def is_static(game: DynamicGame) -> bool:
    """One-shot test: every child of the root is terminal."""
    node = game.nodes[game.root]
    if isinstance(node, TerminalNode):
        return False
    return all(
        isinstance(game.nodes[c], TerminalNode) for c in node.children.values()
    )
