"""Interactive search over category hierarchies.

Find a hidden target node in a rooted DAG by asking yes/no reachability
questions, choosing each question to (approximately) minimize the expected
number of questions under a target distribution.
"""

from .distributions import (
    DistributionSpec,
    OnlineLearner,
    generate,
    normalize,
    parse_cost_file,
    parse_weight_file,
    round_weights,
    zero_synthetic_root,
)
from .dtree import (
    DecisionTree,
    build_decision_tree,
    expected_cost,
    expected_cost_sensitive,
    optimal_expected_cost,
    to_dot,
)
from .errors import HierSearchError
from .evaluation import EvalReport, batch_evaluate, css_curve, replay_strategy, runtime_probe
from .hierarchy import (
    CandidateView,
    Hierarchy,
    HierarchyStats,
    apply_answer as apply_view_answer,
    ensure_single_root,
    load_hierarchy,
    reachable_set,
    reachable_set_weight,
)
from .policies import (
    POLICY_KINDS,
    Question,
    SearchState,
    Transcript,
    adjust_weight,
    apply_answer,
    make_oracle,
    new_search,
    next_question,
    resolve,
    run_search,
    set_weight_dfs,
    subtree_aggregates,
)
from .service import SessionService

__version__ = "0.1.0"

__all__ = [
    "CandidateView",
    "DecisionTree",
    "DistributionSpec",
    "EvalReport",
    "Hierarchy",
    "HierarchyStats",
    "HierSearchError",
    "OnlineLearner",
    "POLICY_KINDS",
    "Question",
    "SearchState",
    "SessionService",
    "Transcript",
    "adjust_weight",
    "apply_answer",
    "apply_view_answer",
    "batch_evaluate",
    "build_decision_tree",
    "css_curve",
    "ensure_single_root",
    "expected_cost",
    "expected_cost_sensitive",
    "generate",
    "load_hierarchy",
    "make_oracle",
    "new_search",
    "next_question",
    "normalize",
    "optimal_expected_cost",
    "parse_cost_file",
    "parse_weight_file",
    "reachable_set",
    "reachable_set_weight",
    "replay_strategy",
    "resolve",
    "round_weights",
    "run_search",
    "set_weight_dfs",
    "subtree_aggregates",
    "to_dot",
    "zero_synthetic_root",
]
