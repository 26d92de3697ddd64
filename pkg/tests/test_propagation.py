import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_problems
from csolve.model import Constraint, Kind, constraint_check, generate_nqueens, make_problem
from csolve.propagation import (
    SearchState,
    TrailError,
    establish_root_consistency,
    propagate,
    revise,
)
from csolve.search import brute_force_solutions


def state_with(problem, **domains):
    s = SearchState(problem)
    for name, values in domains.items():
        x = problem.var_id(name)
        for v in list(s.domains[x]):
            if v not in values:
                s.remove(x, v)
    return s


def supported_by_scan(state, c, x):
    """Reference support test: enumerate every live tuple of the scope."""
    pos = c.scope.index(x)
    live = [sorted(state.domains[y]) for y in c.scope]
    keep = set()
    for t in itertools.product(*live):
        if constraint_check(c, t):
            keep.add(t[pos])
    return keep


# trail ---------------------------------------------------------------------


def test_undo_restores_removed_value(neq_pair):
    s = SearchState(neq_pair)
    tok = s.push_level()
    s.remove(0, 1)
    assert 1 not in s.domains[0]
    s.undo_to(tok)
    assert 1 in s.domains[0]


def test_undo_without_changes_is_identity(neq_pair):
    s = SearchState(neq_pair)
    before = s.snapshot()
    s.undo_to(s.push_level())
    assert s.snapshot() == before and s.trail == []


def test_undo_to_outer_level_reverts_inner_levels(neq_pair):
    s = SearchState(neq_pair)
    a = s.push_level()
    s.remove(0, 1)
    s.push_level()
    s.assign(1, 2)
    s.undo_to(a)
    assert s.snapshot() == (frozenset({1, 2}), frozenset({1, 2}))
    assert s.assigned == [None, None] and s.n_assigned == 0
    assert s.level_marks == []


def test_stale_token_rejected(neq_pair):
    s = SearchState(neq_pair)
    a = s.push_level()
    b = s.push_level()
    s.undo_to(a)
    with pytest.raises(TrailError):
        s.undo_to(b)


def test_assign_rejects_dead_value(neq_pair):
    s = SearchState(neq_pair)
    s.remove(0, 1)
    with pytest.raises(ValueError):
        s.assign(0, 1)


@given(small_problems(), st.data())
@settings(max_examples=120, deadline=None)
def test_random_operations_fully_undone(problem, data):
    s = SearchState(problem)
    initial = s.snapshot()
    root = s.push_level()
    for _ in range(data.draw(st.integers(0, 25))):
        op = data.draw(st.sampled_from(["push", "remove", "assign", "propagate", "undo"]))
        if op == "push":
            s.push_level()
        elif op == "undo":
            if len(s.level_marks) > 1:
                s.undo_to(data.draw(st.integers(1, len(s.level_marks) - 1)))
        elif op == "propagate":
            if not propagate(s, range(problem.n)).consistent:
                break  # a wiped-out state is only fit for undoing
        else:
            x = data.draw(st.integers(0, problem.n - 1))
            if s.is_assigned(x) or len(s.domains[x]) < 2:
                continue
            v = data.draw(st.sampled_from(sorted(s.domains[x])))
            if op == "remove":
                s.remove(x, v)
            else:
                s.assign(x, v)
    s.undo_to(root)
    assert s.snapshot() == initial
    assert s.trail == [] and s.n_assigned == 0 and s.assigned == [None] * problem.n


@given(small_problems(), st.data())
@settings(max_examples=120, deadline=None)
def test_undo_exactly_restores_marked_state(problem, data):
    s = SearchState(problem)
    x = data.draw(st.integers(0, problem.n - 1))
    if len(s.domains[x]) > 1:
        s.remove(x, s.first_value(x))
    before = s.snapshot()
    tok = s.push_level()
    propagate(s, range(problem.n))
    y = data.draw(st.integers(0, problem.n - 1))
    if s.domains[y] and not s.is_assigned(y):
        s.assign(y, s.first_value(y))
        propagate(s, [y])
    s.undo_to(tok)
    assert s.snapshot() == before and s.n_assigned == 0


# revise ------------------------------------------------------------------


def test_revise_neq_deletes_value():
    p = make_problem({"x": [1], "y": [1, 2]}, [("neq", ("x", "y"))])
    s = SearchState(p)
    out = revise(s, p.constraints[0], 1)
    assert out.deleted == 1 and not out.wipeout and s.domains[1] == {2}


def test_revise_neq_wipeout():
    p = make_problem({"x": [1], "y": [1]}, [("neq", ("x", "y"))])
    s = SearchState(p)
    out = revise(s, p.constraints[0], 1)
    assert out.deleted == 1 and out.wipeout and s.domains[1] == set()


def test_revise_allow_both_supported():
    p = make_problem({"x": [0, 2], "y": [1, 3]}, [("allow", ("x", "y"), [(0, 1), (2, 3)])])
    s = SearchState(p)
    assert revise(s, p.constraints[0], 0).deleted == 0


def test_revise_allow_deletes_unsupported():
    p = make_problem({"x": [0, 2], "y": [1]}, [("allow", ("x", "y"), [(0, 1)])])
    s = SearchState(p)
    out = revise(s, p.constraints[0], 0)
    assert out.deleted == 1 and s.domains[0] == {0}


def test_revise_is_trailed():
    p = make_problem({"x": [0, 2], "y": [1]}, [("allow", ("x", "y"), [(0, 1)])])
    s = SearchState(p)
    tok = s.push_level()
    revise(s, p.constraints[0], 0)
    s.undo_to(tok)
    assert s.domains[0] == {0, 2}


@given(small_problems(), st.data())
@settings(max_examples=300, deadline=None)
def test_revise_matches_tuple_enumeration(problem, data):
    if not problem.constraints:
        return
    s = SearchState(problem)
    for x in range(problem.n):
        dead = data.draw(st.sets(st.sampled_from(sorted(s.domains[x]))))
        for v in dead:
            if len(s.domains[x]) > 1:
                s.remove(x, v)
    c = data.draw(st.sampled_from(problem.constraints))
    x = data.draw(st.sampled_from(c.scope))
    expected = supported_by_scan(s, c, x)
    before = set(s.domains[x])
    out = revise(s, c, x)
    assert s.domains[x] == expected
    assert out.deleted == len(before - expected)
    assert out.wipeout == (not expected)


def test_nary_forbid_counts_live_combinations():
    c = Constraint(0, "c", (0, 1, 2), Kind.FORBID, None, ((0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)))
    p = make_problem({"a": [0, 1], "b": [0, 1], "c": [0, 1]}, [])
    p = type(p)(p.name, p.variables, (c,))
    s = SearchState(p)
    assert revise(s, c, 0).deleted == 1 and s.domains[0] == {1}


# propagate -----------------------------------------------------------------


def test_chain_wipeout_attributed_to_second_constraint():
    p = make_problem(
        {"x": [1], "y": [1, 2], "z": [2]},
        [("neq", ("x", "y")), ("neq", ("y", "z"))],
    )
    s = SearchState(p)
    res = propagate(s, [0])
    assert [(e.constraint, e.variable) for e in res.deletions] == [(0, 1), (1, 2)]
    assert s.domains[1] == {2}
    assert res.wipeout == (1, 2) and not res.consistent
    assert s.domains[2] == set()


def test_consistent_state_has_no_deletions():
    s, root = establish_root_consistency(generate_nqueens(5))
    assert root.consistent
    for x in range(5):
        res = propagate(s, [x])
        assert res.consistent and res.deletions == []


def test_single_unconstrained_variable():
    p = make_problem({"x": [1, 2, 3]}, [])
    s = SearchState(p)
    res = propagate(s, [0])
    assert res.consistent and res.deletions == []


def test_root_wipeout():
    p = make_problem({"x": [1], "y": [1]}, [("neq", ("x", "y"))])
    _, res = establish_root_consistency(p)
    assert res.wipeout is not None and res.wipeout[0] == 0


def test_queens_root_untouched():
    s, res = establish_root_consistency(generate_nqueens(4))
    assert res.consistent
    assert all(len(d) == 4 for d in s.domains)


def test_unconstrained_root_untouched():
    p = make_problem({"x": [1, 2], "y": [3, 4, 5]}, [])
    s, res = establish_root_consistency(p)
    assert res.consistent and s.snapshot() == (frozenset({1, 2}), frozenset({3, 4, 5}))


def _solutions_within(problem, state):
    return [
        t for t in brute_force_solutions(problem, cap=10**5)
        if all(t[x] in state.domains[x] for x in range(problem.n))
    ]


@given(small_problems(), st.data())
@settings(max_examples=150, deadline=None)
def test_propagation_is_sound_and_reaches_fixpoint(problem, data):
    s, root = establish_root_consistency(problem)
    if not root.consistent:
        assert list(brute_force_solutions(problem)) == []
        return
    assert _solutions_within(problem, s) == list(brute_force_solutions(problem))
    x = data.draw(st.integers(0, problem.n - 1))
    v = data.draw(st.sampled_from(sorted(s.domains[x])))
    s.assign(x, v)
    before = _solutions_within(problem, s)
    res = propagate(s, [x])
    if res.consistent:
        assert _solutions_within(problem, s) == before
        assert all(s.domains)
        again = propagate(s, range(problem.n))
        assert again.deletions == []
        # GAC: every live value of every scope variable has a support
        for c in problem.constraints:
            for y in c.scope:
                assert supported_by_scan(s, c, y) == s.domains[y]
    else:
        assert before == []
        cid, y = res.wipeout
        assert s.domains[y] == set()
        last = res.deletions[-1]
        assert (last.constraint, last.variable) == (cid, y)
        assert y in problem.constraints[cid].scope
