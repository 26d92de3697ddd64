"""MAC search under d-way, 2-way, restricted 2-way and adaptive branching."""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .branching import BranchingPolicy, RightBranchContext, Scheme, decide_right_branch
from .heuristics import (
    Heuristic,
    WeightStore,
    apply_conflict_events,
    rank_distance,
    raw_score,
    select_variable,
)
from .model import Problem, constraint_check
from .propagation import SearchState, establish_root_consistency, propagate

TIME_CHECK_INTERVAL = 1024


class Mode(enum.Enum):
    FIRST = "first"
    ALL = "all"
    COUNT = "count"


class Verdict(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"
    NODE_LIMIT = "NODELIMIT"


class DecisionKind(enum.Enum):
    ASSIGN = "assign"
    REMOVE = "remove"


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    var: int
    value: int
    depth: int


@dataclass(frozen=True)
class SearchConfig:
    voh: Heuristic = Heuristic.DOM_WDEG
    policy: BranchingPolicy = field(default_factory=BranchingPolicy.two_way)
    mode: Mode = Mode.FIRST
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None  # seconds
    seed: int = 0  # reserved; ties are broken deterministically
    trace: bool = False
    check_invariants: bool = False


@dataclass
class SearchReport:
    verdict: Verdict
    solutions: list[tuple[int, ...]]
    solution_count: int
    nodes: int
    vc: int
    vc_blocked: int
    dis_samples: list[int]
    dwo_count: int
    deletion_event_count: int
    wall_time: float
    decision_trace: Optional[list[Decision]]
    weights: WeightStore = field(repr=False)

    @property
    def dis_mean(self) -> Optional[float]:
        if not self.dis_samples:
            return None
        return sum(self.dis_samples) / len(self.dis_samples)


class _Stop(Exception):
    def __init__(self, verdict: Verdict):
        self.verdict = verdict


class _Engine:
    def __init__(self, problem: Problem, config: SearchConfig):
        self.problem = problem
        self.config = config
        self.voh = config.voh
        self.policy = config.policy
        self.weights = WeightStore.for_problem(problem)
        self.nodes = 0
        self.vc = 0
        self.vc_blocked = 0
        self.dis: list[int] = []
        self.solutions: list[tuple[int, ...]] = []
        self.count = 0
        self.trace: Optional[list[Decision]] = [] if config.trace else None
        self.started = time.perf_counter()
        self.deadline = None if config.time_limit is None else self.started + config.time_limit
        self.state: SearchState

    # bookkeeping ---------------------------------------------------------

    def _propagated(self, seeds) -> bool:
        result = propagate(self.state, seeds)
        apply_conflict_events(self.weights, result)
        if self.config.check_invariants:
            assert self.weights.conserved()
        return result.consistent

    def _node(self, kind: DecisionKind, x: int, a: int, depth: int) -> None:
        limit = self.config.node_limit
        if limit is not None and self.nodes >= limit:
            raise _Stop(Verdict.NODE_LIMIT)
        self.nodes += 1
        if self.deadline is not None and self.nodes % TIME_CHECK_INTERVAL == 0:
            if time.perf_counter() >= self.deadline:
                raise _Stop(Verdict.TIMEOUT)
        if self.trace is not None:
            self.trace.append(Decision(kind, x, a, depth))

    def _solution(self) -> bool:
        """Record the complete assignment; True when search should stop."""
        sol = tuple(self.state.assigned)
        self.count += 1
        if self.config.mode is not Mode.COUNT:
            self.solutions.append(sol)
        return self.config.mode is Mode.FIRST

    def _assign(self, x: int, a: int, depth: int) -> bool:
        self._node(DecisionKind.ASSIGN, x, a, depth)
        self.state.assign(x, a)
        return self._propagated((x,))

    # drivers -------------------------------------------------------------

    def run(self) -> SearchReport:
        self.state, root = establish_root_consistency(self.problem)
        apply_conflict_events(self.weights, root)
        verdict = Verdict.UNSAT
        if root.consistent:
            try:
                if self.policy.scheme is Scheme.DWAY:
                    self._dway()
                else:
                    self._binary()
                verdict = Verdict.SAT if self.count else Verdict.UNSAT
            except _Stop as stop:
                verdict = stop.verdict
        return SearchReport(
            verdict=verdict,
            solutions=self.solutions,
            solution_count=self.count,
            nodes=self.nodes,
            vc=self.vc,
            vc_blocked=self.vc_blocked,
            dis_samples=self.dis,
            dwo_count=self.weights.dwo_total,
            deletion_event_count=self.weights.deletion_event_total,
            wall_time=time.perf_counter() - self.started,
            decision_trace=self.trace,
            weights=self.weights,
        )

    def _dway(self) -> None:
        state = self.state
        n = self.problem.n
        # frame: [x, values, next index, level mark, child mark]
        stack: list[list] = []
        descend = True
        while True:
            if descend:
                if state.n_assigned == n:
                    if self._solution():
                        return
                else:
                    x = select_variable(self.voh, state, self.weights)
                    stack.append([x, state.live_values(x), 0, state.push_level(), None])
            descend = False
            if not stack:
                return
            frame = stack[-1]
            x, values, i, mark, child = frame
            if child is not None:
                state.undo_to(child)
                # a refuted value is dropped without propagating its removal
                state.remove(x, values[i - 1])
                frame[4] = None
            while i < len(values):
                a = values[i]
                i += 1
                frame[2] = i
                child = state.push_level()
                if self._assign(x, a, len(stack) - 1):
                    frame[4] = child
                    descend = True
                    break
                state.undo_to(child)
                state.remove(x, a)
            if descend:
                continue
            stack.pop()
            state.undo_to(mark)

    def _binary(self) -> None:
        state = self.state
        policy = self.policy
        n = self.problem.n
        # frames: ("L", x, a, mark) awaits its right branch; ("R", mark) has no alternative
        stack: list[tuple] = []
        forced: Optional[int] = None
        while True:
            if state.n_assigned == n:
                if self._solution():
                    return
                ok = False
            else:
                x = forced if forced is not None else select_variable(self.voh, state, self.weights)
                a = state.first_value(x)
                mark = state.push_level()
                stack.append(("L", x, a, mark))
                ok = self._assign(x, a, len(stack) - 1)
                forced = None
            if ok:
                continue

            while stack:
                frame = stack.pop()
                state.undo_to(frame[-1])
                if frame[0] == "R":
                    continue
                _, x, a, _ = frame
                if len(state.domains[x]) == 1:
                    # x != a would empty D(x) outright: no right branch exists
                    continue
                mark = state.push_level()
                stack.append(("R", mark))
                self._node(DecisionKind.REMOVE, x, a, len(stack) - 1)
                state.remove(x, a)
                if self._propagated((x,)):
                    forced = self._after_right_branch(x)
                    break
                stack.pop()
                state.undo_to(mark)
            else:
                return

    def _after_right_branch(self, x: int) -> int:
        state, weights, voh = self.state, self.weights, self.voh
        y = select_variable(voh, state, weights, prefer=x)
        if y == x:
            return x
        policy = self.policy
        secondary = None
        if policy.uses_secondary:
            h2 = policy.secondary
            secondary = (raw_score(h2, state, weights, x), raw_score(h2, state, weights, y))
        ctx = RightBranchContext(
            x, y, (raw_score(voh, state, weights, x), raw_score(voh, state, weights, y)), secondary
        )
        z = decide_right_branch(policy, ctx)
        if z == x:
            self.vc_blocked += 1
        else:
            self.vc += 1
            self.dis.append(rank_distance(state, weights, x, z))
        return z


def solve(problem: Problem, config: SearchConfig = SearchConfig()) -> SearchReport:
    """Root GAC followed by depth-first MAC search as configured."""
    return _Engine(problem, config).run()


# ---------------------------------------------------------------------------
# brute-force oracle

DEFAULT_CAP = 10**7


def brute_force_solutions(problem: Problem, cap: int = DEFAULT_CAP) -> Iterator[tuple[int, ...]]:
    """Every full assignment passing every constraint, in lexicographic order.

    Enumeration is plain generate-and-test in variable-id order; a constraint
    is checked as soon as the last variable of its scope has a value.
    """
    space = math.prod(len(v.initial_domain) for v in problem.variables)
    if space > cap:
        raise ValueError(f"assignment space {space} exceeds the cap {cap}")
    n = problem.n
    due: list[list] = [[] for _ in range(n)]
    for c in problem.constraints:
        due[max(c.scope)].append(c)
    domains = [v.initial_domain for v in problem.variables]
    values = [0] * n

    def extend(i):
        if i == n:
            yield tuple(values)
            return
        for a in domains[i]:
            values[i] = a
            if all(constraint_check(c, [values[x] for x in c.scope]) for c in due[i]):
                yield from extend(i + 1)

    if n == 0:
        yield ()
        return
    yield from extend(0)


def brute_force_count(problem: Problem, cap: int = DEFAULT_CAP) -> int:
    return sum(1 for _ in brute_force_solutions(problem, cap))


def exhaustive_count(problem: Problem) -> int:
    """Literal enumeration of the full cross product; only for tiny instances."""
    domains = [v.initial_domain for v in problem.variables]
    return sum(1 for t in itertools.product(*domains) if problem.is_solution(t))
