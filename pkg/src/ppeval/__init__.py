"""Exact evaluation and bounded search for probabilistic plans over succinct domains."""

from .circuit import CircuitBuilder, Gate, TransitionCircuit, eval_circuit, successor_table, validate_circuit
from .core import (
    CircuitBackend,
    FlatBackend,
    Outcome,
    PlanningDomain,
    PsoBackend,
    PsoCase,
    PsoOperator,
    is_goal,
    make_flat_domain,
    parse_rational,
    successor_distribution,
    transition_prob,
    validate_domain,
)
from .errors import (
    DomainError,
    DslError,
    EnumerationCapError,
    PlanValidationError,
    PPEvalError,
    SolverCapError,
    SpaceBoundError,
)
from .evaluation import (
    DIVERGENT,
    EvaluationResult,
    Interpretation,
    eval_acyclic,
    eval_looping,
    eval_partial,
    eval_total_order,
    eval_truncated,
    evaluate,
    expected_action_count,
    format_value,
    meets_threshold,
    simulate,
)
from .plans import (
    AcyclicPlan,
    LoopingPlan,
    PartialOrderPlan,
    TotalOrderPlan,
    as_looping,
    chain_acyclic,
    chain_partial,
    linear_extensions,
    validate_plan,
)
from .search import SearchBudget, SearchOutcome, exists_acyclic, exists_looping, exists_total_order, optimal_value_bound

__version__ = "0.1.0"

__all__ = [
    "CircuitBuilder", "Gate", "TransitionCircuit", "eval_circuit", "successor_table",
    "validate_circuit", "CircuitBackend", "FlatBackend", "Outcome", "PlanningDomain", "PsoBackend",
    "PsoCase", "PsoOperator", "is_goal", "make_flat_domain", "parse_rational",
    "successor_distribution", "transition_prob", "validate_domain", "DomainError", "DslError",
    "EnumerationCapError", "PlanValidationError", "PPEvalError", "SolverCapError",
    "SpaceBoundError", "DIVERGENT", "EvaluationResult", "Interpretation", "eval_acyclic",
    "eval_looping", "eval_partial", "eval_total_order", "eval_truncated", "evaluate",
    "expected_action_count", "format_value", "meets_threshold", "simulate", "AcyclicPlan",
    "LoopingPlan", "PartialOrderPlan", "TotalOrderPlan", "as_looping", "chain_acyclic",
    "chain_partial", "linear_extensions", "validate_plan", "SearchBudget", "SearchOutcome",
    "exists_acyclic", "exists_looping", "exists_total_order", "optimal_value_bound",
]
