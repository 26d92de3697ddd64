import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csolve.branching import BranchingPolicy, RightBranchContext, Rule, Scheme, decide_right_branch, score_gap
from csolve.heuristics import Heuristic

X, Y = 3, 7


def ctx(primary, secondary=None):
    return RightBranchContext(X, Y, primary, secondary)


@pytest.mark.parametrize(
    "policy, context, expected",
    [
        (BranchingPolicy.sdiff(0.1), ctx((0.5, 0.35)), Y),
        (BranchingPolicy.sdiff(0.2), ctx((0.5, 0.35)), X),
        (BranchingPolicy.cadv(), ctx((0.5, 0.35), (9, 12)), Y),
        (BranchingPolicy.cadv(), ctx((0.5, 0.35), (9, 9)), X),
        (BranchingPolicy.conj(0.1), ctx((0.5, 0.35), (9, 9)), X),
        (BranchingPolicy.disj(0.1), ctx((0.5, 0.35), (9, 9)), Y),
        (BranchingPolicy.restricted(), ctx((9.0, 0.1)), X),
        (BranchingPolicy.two_way(), ctx((0.5, 0.5)), Y),
    ],
)
def test_decision_examples(policy, context, expected):
    assert decide_right_branch(policy, context) == expected


def test_sdiff_is_strict():
    assert decide_right_branch(BranchingPolicy.sdiff(0.25), ctx((0.75, 0.5))) == X


def test_infinity_sentinel_arithmetic():
    assert score_gap(math.inf, 0.4) == math.inf
    assert score_gap(0.4, math.inf) == math.inf
    assert score_gap(math.inf, math.inf) == 0
    assert decide_right_branch(BranchingPolicy.sdiff(1e9), ctx((math.inf, 0.4))) == Y
    assert decide_right_branch(BranchingPolicy.sdiff(0), ctx((math.inf, math.inf))) == X
    # only an infinite threshold refuses an infinite gap
    assert decide_right_branch(BranchingPolicy.sdiff(math.inf), ctx((math.inf, 0.4))) == X


def test_same_variable_is_kept():
    c = RightBranchContext(X, X, (1.0, 1.0), (2, 2))
    for policy in (BranchingPolicy.two_way(), BranchingPolicy.sdiff(0), BranchingPolicy.disj(0)):
        assert decide_right_branch(policy, c) == X


def test_dway_has_no_right_branch():
    with pytest.raises(ValueError):
        decide_right_branch(BranchingPolicy.dway(), ctx((1.0, 0.5)))


@pytest.mark.parametrize(
    "make",
    [
        lambda: BranchingPolicy(Scheme.ADAPTIVE),
        lambda: BranchingPolicy.sdiff(-0.1),
        lambda: BranchingPolicy.sdiff(math.nan),
        lambda: BranchingPolicy(Scheme.ADAPTIVE, Rule.CADV),
        lambda: BranchingPolicy.cadv(Heuristic.DOM_WDEG),
        lambda: BranchingPolicy(Scheme.DWAY, Rule.SDIFF),
        lambda: BranchingPolicy(Scheme.TWO_WAY, secondary=Heuristic.WDEG),
    ],
)
def test_invalid_policies(make):
    with pytest.raises(ValueError):
        make()


def test_policy_flags():
    assert BranchingPolicy.sdiff(0.1).uses_e and not BranchingPolicy.sdiff(0.1).uses_secondary
    assert BranchingPolicy.cadv().uses_secondary and not BranchingPolicy.cadv().uses_e
    assert BranchingPolicy.conj(0.1).uses_e and BranchingPolicy.disj(0.1).uses_secondary
    assert not BranchingPolicy.two_way().uses_e


scores = st.one_of(st.floats(0, 100, allow_nan=False), st.just(math.inf))
thresholds = st.floats(0, 10, allow_nan=False)


@given(scores, scores, st.integers(0, 20), st.integers(0, 20), thresholds)
def test_conjunction_implies_disjunction(sx, sy, wx, wy, e):
    c = ctx((sx, sy), (wx, wy))
    if decide_right_branch(BranchingPolicy.conj(e), c) == Y:
        assert decide_right_branch(BranchingPolicy.disj(e), c) == Y
    if decide_right_branch(BranchingPolicy.disj(e), c) == X:
        assert decide_right_branch(BranchingPolicy.conj(e), c) == X


@given(scores, scores)
def test_threshold_endpoints(sx, sy):
    # y is only ever suggested when strictly better, so its score differs from x's
    if sx == sy:
        return
    c = ctx((sx, sy))
    assert decide_right_branch(BranchingPolicy.sdiff(0), c) == Y
    assert decide_right_branch(BranchingPolicy.sdiff(math.inf), c) == X


@given(scores, scores, st.integers(0, 20), st.integers(0, 20), thresholds)
def test_decision_is_pure(sx, sy, wx, wy, e):
    c = ctx((sx, sy), (wx, wy))
    for policy in (BranchingPolicy.sdiff(e), BranchingPolicy.cadv(), BranchingPolicy.conj(e), BranchingPolicy.disj(e)):
        assert decide_right_branch(policy, c) == decide_right_branch(policy, c)
