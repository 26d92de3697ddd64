import itertools

import pytest
from hypothesis import strategies as st

from csolve.model import Constraint, Kind, Problem, VariableDecl

# criterion id -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k.split(".")[0]), k)):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {detail}")


@st.composite
def small_problems(draw, max_vars=5, max_dom=4, max_cons=6, max_arity=3):
    """Random mixed problems over every constraint kind, small enough for brute force."""
    n = draw(st.integers(1, max_vars))
    variables = []
    for i in range(n):
        lo = draw(st.integers(-2, 2))
        size = draw(st.integers(1, max_dom))
        variables.append(VariableDecl(i, f"v{i}", tuple(range(lo, lo + size))))
    constraints = []
    for cid in range(draw(st.integers(0, max_cons))):
        kind = draw(st.sampled_from(list(Kind)))
        if kind.is_table:
            k = draw(st.integers(1, min(max_arity, n)))
        elif n >= 2:
            k = 2
        else:
            continue
        scope = tuple(draw(st.permutations(range(n)))[:k])
        param, tuples = None, ()
        if kind.is_table:
            space = list(itertools.product(*(variables[x].initial_domain for x in scope)))
            tuples = tuple(draw(st.lists(st.sampled_from(space), unique=True, max_size=len(space))))
        elif kind.has_param:
            param = draw(st.integers(0, 3))
        constraints.append(Constraint(len(constraints), f"c{len(constraints)}", scope, kind, param, tuples))
    return Problem("hyp", tuple(variables), tuple(constraints))


@pytest.fixture
def neq_pair():
    from csolve.model import make_problem

    return make_problem({"x": [1, 2], "y": [1, 2]}, [("neq", ("x", "y"))], name="pair")
