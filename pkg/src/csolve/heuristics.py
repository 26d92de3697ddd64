"""Variable ordering heuristics and the conflict-weight ledgers behind them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .model import Problem
from .propagation import PropagationResult, SearchState

INF = math.inf


class Heuristic(enum.Enum):
    LEX = "lex"
    DOM = "dom"
    DOM_DDEG = "dom/ddeg"
    DOM_WDEG = "dom/wdeg"
    DOM_ALLDEL = "dom/alldel"
    # advisor forms, greater score is better
    WDEG = "wdeg"
    DOM_ADVISOR = "dom-advisor"

    @property
    def higher_is_better(self) -> bool:
        return self in (Heuristic.WDEG, Heuristic.DOM_ADVISOR)


@dataclass(frozen=True)
class ScoreValue:
    value: float
    higher_is_better: bool = False

    def better_than(self, other: "ScoreValue") -> bool:
        if self.higher_is_better != other.higher_is_better:
            raise ValueError("cannot compare scores of different orientation")
        if self.higher_is_better:
            return self.value > other.value
        return self.value < other.value


@dataclass
class WeightStore:
    """Per-constraint wdeg (DWO) and alldel (deletion) weights, both starting at 1."""

    wdeg: list[int]
    alldel: list[int]
    dwo_total: int = 0
    deletion_event_total: int = 0

    @classmethod
    def for_problem(cls, problem: Problem) -> "WeightStore":
        m = len(problem.constraints)
        return cls([1] * m, [1] * m)

    def conserved(self) -> bool:
        m = len(self.wdeg)
        return (
            sum(self.wdeg) - m == self.dwo_total
            and sum(self.alldel) - m == self.deletion_event_total
            and all(w >= 1 for w in self.wdeg)
            and all(w >= 1 for w in self.alldel)
        )


def apply_conflict_events(weights: WeightStore, result: PropagationResult) -> None:
    # one alldel increment per revise call that deleted something, not per value
    for ev in result.deletions:
        weights.alldel[ev.constraint] += 1
    weights.deletion_event_total += len(result.deletions)
    if result.wipeout is not None:
        weights.wdeg[result.wipeout[0]] += 1
        weights.dwo_total += 1


def weighted_degree(state: SearchState, w: Optional[list[int]], x: int) -> int:
    """Sum of ``w`` over constraints on x with another unassigned variable.

    ``w=None`` counts each such constraint once, i.e. the dynamic degree.
    """
    problem = state.problem
    assigned = state.assigned
    total = 0
    for cid in problem.constraints_of[x]:
        for y in problem.constraints[cid].scope:
            if y != x and assigned[y] is None:
                total += 1 if w is None else w[cid]
                break
    return total


def raw_score(h: Heuristic, state: SearchState, weights: WeightStore, x: int) -> float:
    if h is Heuristic.LEX:
        return float(x)
    size = len(state.domains[x])
    if h is Heuristic.DOM:
        return float(size)
    if h is Heuristic.DOM_ADVISOR:
        return float(-size)
    if h is Heuristic.WDEG:
        return float(weighted_degree(state, weights.wdeg, x))
    if h is Heuristic.DOM_DDEG:
        denom = weighted_degree(state, None, x)
    elif h is Heuristic.DOM_WDEG:
        denom = weighted_degree(state, weights.wdeg, x)
    else:
        denom = weighted_degree(state, weights.alldel, x)
    return size / denom if denom else INF


def score(h: Heuristic, state: SearchState, weights: WeightStore, x: int) -> ScoreValue:
    if state.assigned[x] is not None:
        raise ValueError(f"variable {x} is assigned")
    return ScoreValue(raw_score(h, state, weights, x), h.higher_is_better)


def pick_best(scores: Mapping[int, float], higher_is_better: bool, prefer: Optional[int] = None) -> int:
    """Best-scoring key; ties go to ``prefer`` when it is among the tied, else the lowest key."""
    if not scores:
        raise ValueError("no candidates")
    best = max(scores.values()) if higher_is_better else min(scores.values())
    if prefer is not None and scores.get(prefer) == best:
        return prefer
    return min(k for k, s in scores.items() if s == best)


def select_variable(
    h: Heuristic,
    state: SearchState,
    weights: WeightStore,
    prefer: Optional[int] = None,
) -> int:
    free = state.unassigned()
    if not free:
        raise ValueError("every variable is assigned")
    if h is Heuristic.LEX:
        return free[0]
    return pick_best({x: raw_score(h, state, weights, x) for x in free}, h.higher_is_better, prefer)


def rank_distance(state: SearchState, weights: WeightStore, x: int, y: int) -> int:
    """Distance between x and y in the dom/wdeg ordering of unassigned variables."""
    if x == y:
        return 0
    order = sorted(state.unassigned(), key=lambda v: (raw_score(Heuristic.DOM_WDEG, state, weights, v), v))
    rank = {v: i for i, v in enumerate(order)}
    return abs(rank[x] - rank[y])
