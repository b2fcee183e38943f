"""Exception types raised by validators and solvers."""


class RcsbrError(Exception):
    """Base class for all errors raised by this package."""


class GameFormatError(RcsbrError):
    """Malformed game description (schema-level problem)."""


class NotATree(RcsbrError):
    """Node graph is not an arborescence rooted at the declared root."""


class DanglingChild(RcsbrError):
    """A child reference points outside the node table, or an action
    profile has no child."""


class EmptyActionSet(RcsbrError):
    """A decision node lists a player with no actions, or lists no
    actions at all."""


class BadPayoffArity(RcsbrError):
    """A terminal payoff vector does not have one entry per player."""


class InfoSetActionMismatch(RcsbrError):
    """Histories grouped into one information set do not offer the owner
    the same action list."""


class PerfectRecallViolation(RcsbrError):
    """Two histories in one information set induce different records of
    the owner's own past information sets and actions."""


class UnknownInfoSet(RcsbrError):
    """An information-set identifier does not exist in the game."""


class CpsViolation(RcsbrError):
    """Base class for conditional-probability-system axiom failures."""


class SelfMassNotOne(CpsViolation):
    """Axiom A1 failure: a conditional does not assign mass one to its
    own conditioning event."""


class NotNormalized(CpsViolation):
    """Axiom A2 failure: a conditional is not a probability measure."""


class ChainRuleViolation(CpsViolation):
    """Axiom A3 failure, with the witnessing triple A <= B <= C."""

    def __init__(self, message, a=None, b=None, c=None):
        super().__init__(message)
        self.a = a
        self.b = b
        self.c = c


class UnknownConditioningEvent(RcsbrError):
    """A conditioning event is not part of the system's family."""


class StructureFormatError(RcsbrError):
    """Malformed type-structure, state-space, or closure description."""


class UnknownType(RcsbrError):
    """A type label does not exist in the host structure."""


class NotStatic(RcsbrError):
    """An operation restricted to one-shot games was called on a game
    with more than one stage."""


class NotAnFsbrs(RcsbrError):
    """The given product set fails the full strong best-reply set test."""


class MismatchedStateSpace(RcsbrError):
    """Separating structures in a profile do not share host and state
    space."""


class TargetNotInFamily(RcsbrError):
    """A construction target does not belong to the solution family
    matching the requested taxonomy cell."""


class EmptyTarget(RcsbrError):
    """A construction target has an empty component."""
