"""MAC constraint solver with d-way, 2-way, restricted 2-way and adaptive branching."""

from .branching import BranchingPolicy, RightBranchContext, Rule, Scheme, decide_right_branch
from .heuristics import Heuristic, WeightStore, rank_distance, score, select_variable
from .model import (
    Constraint,
    InstanceError,
    Kind,
    Problem,
    VariableDecl,
    constraint_check,
    generate_nqueens,
    generate_rb,
    generate_tables,
    load_instance,
    parse_instance,
    render_instance,
)
from .search import Mode, SearchConfig, SearchReport, Verdict, brute_force_count, solve
from .stats import paired_t_test, spearman_trend

__all__ = [
    "BranchingPolicy", "Constraint", "Heuristic", "InstanceError", "Kind", "Mode", "Problem",
    "RightBranchContext", "Rule", "Scheme", "SearchConfig", "SearchReport", "VariableDecl",
    "Verdict", "WeightStore", "brute_force_count", "constraint_check", "decide_right_branch",
    "generate_nqueens", "generate_rb", "generate_tables", "load_instance", "paired_t_test",
    "parse_instance", "rank_distance", "render_instance", "score", "select_variable", "solve",
    "spearman_trend",
]
