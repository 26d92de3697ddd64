"""Generalized arc consistency over trailed domains.

Revision is queue-based (GAC-3 on (constraint, variable) pairs, FIFO). The
propagator never touches constraint weights: it reports wipeout and deletion
events and the caller decides what to do with them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from .model import Constraint, Kind, Problem


class TrailError(RuntimeError):
    """A level token was used out of LIFO order."""


class SearchState:
    """Current domains, assignment flags and the undo trail."""

    def __init__(self, problem: Problem):
        self.problem = problem
        self.initial = [v.initial_domain for v in problem.variables]
        self.domains: list[set[int]] = [set(d) for d in self.initial]
        self.assigned: list[Optional[int]] = [None] * problem.n
        self.n_assigned = 0
        self.trail: list[tuple[int, int]] = []
        self.assign_trail: list[int] = []
        self.level_marks: list[tuple[int, int]] = []

    def size(self, x: int) -> int:
        return len(self.domains[x])

    def live_values(self, x: int) -> list[int]:
        dom = self.domains[x]
        return [v for v in self.initial[x] if v in dom]

    def first_value(self, x: int) -> int:
        dom = self.domains[x]
        for v in self.initial[x]:
            if v in dom:
                return v
        raise ValueError(f"domain of variable {x} is empty")

    def is_assigned(self, x: int) -> bool:
        return self.assigned[x] is not None

    def unassigned(self) -> list[int]:
        return [x for x, a in enumerate(self.assigned) if a is None]

    def remove(self, x: int, value: int) -> None:
        self.domains[x].remove(value)
        self.trail.append((x, value))

    def assign(self, x: int, value: int) -> None:
        """Reduce D(x) to ``{value}`` and flag x as assigned; all changes are trailed."""
        if self.assigned[x] is not None:
            raise ValueError(f"variable {x} is already assigned")
        dom = self.domains[x]
        if value not in dom:
            raise ValueError(f"value {value} is not live in D({x})")
        for v in [v for v in dom if v != value]:
            dom.remove(v)
            self.trail.append((x, v))
        self.assigned[x] = value
        self.n_assigned += 1
        self.assign_trail.append(x)

    def push_level(self) -> int:
        self.level_marks.append((len(self.trail), len(self.assign_trail)))
        return len(self.level_marks) - 1

    def undo_to(self, token: int) -> None:
        """Restore the state as it was when ``token`` was pushed; the mark is consumed."""
        if not 0 <= token < len(self.level_marks):
            raise TrailError(f"level token {token} is not live (depth {len(self.level_marks)})")
        trail_pos, assign_pos = self.level_marks[token]
        del self.level_marks[token:]
        trail, domains = self.trail, self.domains
        while len(trail) > trail_pos:
            x, v = trail.pop()
            domains[x].add(v)
        while len(self.assign_trail) > assign_pos:
            self.assigned[self.assign_trail.pop()] = None
            self.n_assigned -= 1

    def snapshot(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(d) for d in self.domains)


class ReviseOutcome(NamedTuple):
    deleted: int
    wipeout: bool


class DeletionEvent(NamedTuple):
    constraint: int
    variable: int
    count: int


@dataclass
class PropagationResult:
    wipeout: Optional[tuple[int, int]] = None  # (constraint id, variable id)
    deletions: list[DeletionEvent] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.wipeout is None


def _unsupported(state: SearchState, c: Constraint, x: int) -> list[int]:
    """Live values of x with no supporting tuple of live values in c."""
    dom = state.domains[x]
    domains = state.domains
    kind = c.kind
    scope = c.scope

    partners = c.partners
    if partners is not None:
        pos = 0 if scope[0] == x else 1
        od = domains[scope[1 - pos]]
        listed = partners[pos]
        if kind is Kind.ALLOW:
            empty = frozenset()
            return [a for a in dom if listed.get(a, empty).isdisjoint(od)]
        n_od = len(od)
        if n_od > c.widest[pos]:
            return []
        out = []
        for a in dom:
            banned = listed.get(a)
            if banned is not None and len(banned) >= n_od and od <= banned:
                out.append(a)
        return out

    if not kind.is_table:
        other = scope[1] if scope[0] == x else scope[0]
        od = domains[other]
        if kind is Kind.NEQ:
            if len(od) == 1:
                (b,) = od
                return [b] if b in dom else []
            return []
        if kind is Kind.EQ:
            return [a for a in dom if a not in od]
        k = c.param
        if kind is Kind.ABSDIFFNE:
            if len(od) > 2:
                return []
            return [a for a in dom if all(abs(a - b) == k for b in od)]
        lo, hi = min(od), max(od)
        return [a for a in dom if not (hi > a + k or lo < a - k)]

    pos = scope.index(x)
    if kind is Kind.ALLOW:
        supported = set()
        others = [(i, domains[y]) for i, y in enumerate(scope) if i != pos]
        for t in c.tuples:
            a = t[pos]
            if a in dom and a not in supported and all(t[i] in d for i, d in others):
                supported.add(a)
                if len(supported) == len(dom):
                    return []
        return [a for a in dom if a not in supported]

    # forbid: a is unsupported iff every live combination of the other
    # variables is listed alongside it (tuples are distinct)
    combos = 1
    others = []
    for i, y in enumerate(scope):
        if i != pos:
            combos *= len(domains[y])
            others.append((i, domains[y]))
    if combos > len(c.tuples):
        return []
    hits: dict[int, int] = {}
    for t in c.tuples:
        a = t[pos]
        if a in dom and all(t[i] in d for i, d in others):
            hits[a] = hits.get(a, 0) + 1
    return [a for a, h in hits.items() if h == combos]


def revise(state: SearchState, c: Constraint, x: int) -> ReviseOutcome:
    """Remove every value of x lacking support in c. Removals are trailed."""
    dead = _unsupported(state, c, x)
    if not dead:
        return ReviseOutcome(0, False)
    dom = state.domains[x]
    trail = state.trail
    for a in dead:
        dom.remove(a)
        trail.append((x, a))
    return ReviseOutcome(len(dead), not dom)


def _fixpoint(state: SearchState, queue: deque, queued: set) -> PropagationResult:
    problem = state.problem
    constraints = problem.constraints
    constraints_of = problem.constraints_of
    domains, trail = state.domains, state.trail
    result = PropagationResult()
    while queue:
        item = queue.popleft()
        queued.discard(item)
        cid, x = item
        c = constraints[cid]
        skip = c.forbid_bound
        if skip is not None:
            other, bound = skip[x]
            if len(domains[other]) > bound:
                continue
        # revise() inlined: this loop is the solver's hot path
        dead = _unsupported(state, c, x)
        if not dead:
            continue
        dom = domains[x]
        for a in dead:
            dom.remove(a)
            trail.append((x, a))
        result.deletions.append(DeletionEvent(cid, x, len(dead)))
        if not dom:
            result.wipeout = (cid, x)
            return result
        for cid2 in constraints_of[x]:
            if cid2 == cid:
                continue
            for y in constraints[cid2].scope:
                if y != x and (cid2, y) not in queued:
                    queued.add((cid2, y))
                    queue.append((cid2, y))
    return result


def propagate(state: SearchState, seeds: Iterable[int]) -> PropagationResult:
    """Run GAC to a fixpoint (or the first wipeout) after the domains of ``seeds`` changed.

    The queue is seeded in constraint-id order with every pair (c, y) whose
    support may have been lost: y in scope(c), unless y is the only seed in c.
    """
    seeds = set(seeds)
    problem = state.problem
    cids = sorted({cid for x in seeds for cid in problem.constraints_of[x]})
    queue: deque = deque()
    queued: set = set()
    for cid in cids:
        scope = problem.constraints[cid].scope
        touched = [y for y in scope if y in seeds]
        for y in scope:
            if len(touched) == 1 and touched[0] == y:
                continue
            queued.add((cid, y))
            queue.append((cid, y))
    return _fixpoint(state, queue, queued)


def establish_root_consistency(problem: Problem) -> tuple[SearchState, PropagationResult]:
    """Fresh state made GAC over every (constraint, variable) pair."""
    state = SearchState(problem)
    queue: deque = deque()
    queued: set = set()
    for c in problem.constraints:
        for y in c.scope:
            queued.add((c.id, y))
            queue.append((c.id, y))
    return state, _fixpoint(state, queue, queued)
