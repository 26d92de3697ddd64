"""Branching schemes and the rule applied at successful right branches."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .heuristics import Heuristic


class Scheme(enum.Enum):
    DWAY = "dway"
    TWO_WAY = "2way"
    RESTRICTED = "r2way"
    ADAPTIVE = "adaptive"


class Rule(enum.Enum):
    SDIFF = "sdiff"
    CADV = "cadv"
    CONJ = "and"
    DISJ = "or"


@dataclass(frozen=True)
class BranchingPolicy:
    scheme: Scheme
    rule: Optional[Rule] = None
    e: float = 0.0
    secondary: Optional[Heuristic] = None

    def __post_init__(self):
        if self.scheme is Scheme.ADAPTIVE:
            if self.rule is None:
                raise ValueError("adaptive branching needs a rule")
            if self.e < 0 or math.isnan(self.e):
                raise ValueError("threshold e must be non-negative")
            if self.rule is not Rule.SDIFF:
                if self.secondary is None:
                    raise ValueError(f"rule {self.rule.value} needs a secondary advisor")
                if not self.secondary.higher_is_better:
                    raise ValueError("the secondary advisor must be a greater-is-better heuristic")
        elif self.rule is not None or self.secondary is not None:
            raise ValueError(f"scheme {self.scheme.value} takes no adaptive parameters")

    @classmethod
    def dway(cls) -> "BranchingPolicy":
        return cls(Scheme.DWAY)

    @classmethod
    def two_way(cls) -> "BranchingPolicy":
        return cls(Scheme.TWO_WAY)

    @classmethod
    def restricted(cls) -> "BranchingPolicy":
        return cls(Scheme.RESTRICTED)

    @classmethod
    def sdiff(cls, e: float) -> "BranchingPolicy":
        return cls(Scheme.ADAPTIVE, Rule.SDIFF, e)

    @classmethod
    def cadv(cls, secondary: Heuristic = Heuristic.WDEG) -> "BranchingPolicy":
        return cls(Scheme.ADAPTIVE, Rule.CADV, 0.0, secondary)

    @classmethod
    def conj(cls, e: float, secondary: Heuristic = Heuristic.WDEG) -> "BranchingPolicy":
        return cls(Scheme.ADAPTIVE, Rule.CONJ, e, secondary)

    @classmethod
    def disj(cls, e: float, secondary: Heuristic = Heuristic.WDEG) -> "BranchingPolicy":
        return cls(Scheme.ADAPTIVE, Rule.DISJ, e, secondary)

    @property
    def uses_e(self) -> bool:
        return self.rule in (Rule.SDIFF, Rule.CONJ, Rule.DISJ)

    @property
    def uses_secondary(self) -> bool:
        return self.rule in (Rule.CADV, Rule.CONJ, Rule.DISJ)


@dataclass(frozen=True)
class RightBranchContext:
    """State of a successful right branch on ``current`` where the VOH suggests ``suggested``.

    Scores are raw values: primary under the active VOH, secondary under the
    advisor (greater is better), each as ``(score(current), score(suggested))``.
    """

    current: int
    suggested: int
    primary_scores: tuple[float, float]
    secondary_scores: Optional[tuple[float, float]] = None


def score_gap(a: float, b: float) -> float:
    """|a - b| with the infinity sentinel: inf vs finite is inf, inf vs inf is 0."""
    if a == b:
        return 0.0
    return abs(a - b)


def decide_right_branch(policy: BranchingPolicy, ctx: RightBranchContext) -> int:
    """Variable to branch on next: ``ctx.current`` or ``ctx.suggested``."""
    x, y = ctx.current, ctx.suggested
    if x == y or policy.scheme is Scheme.RESTRICTED:
        return x
    if policy.scheme is Scheme.TWO_WAY:
        return y
    if policy.scheme is not Scheme.ADAPTIVE:
        raise ValueError(f"scheme {policy.scheme.value} has no right branches")

    rule = policy.rule
    if rule is Rule.SDIFF:
        follow = score_gap(*ctx.primary_scores) > policy.e
    elif rule is Rule.CADV:
        sx, sy = ctx.secondary_scores
        follow = sy > sx
    else:
        sx, sy = ctx.secondary_scores
        by_gap = score_gap(*ctx.primary_scores) > policy.e
        by_advisor = sy > sx
        follow = (by_gap and by_advisor) if rule is Rule.CONJ else (by_gap or by_advisor)
    return y if follow else x
