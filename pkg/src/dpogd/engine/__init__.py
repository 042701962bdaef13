from .trace import UpdateKind, NodeState, RunTrace, guard_finite, DIVERGENCE_FACTOR
from .counters import OperationCounter, gradient_cost, consensus_cost, prox_cost, solve_cost
from .dpogd import (
    initial_iterates,
    run_time_indexed,
    consensus_products,
    run_iteration_indexed,
    run_dpogd,
)

__all__: list[str] = [
    "UpdateKind",
    "NodeState",
    "RunTrace",
    "guard_finite",
    "DIVERGENCE_FACTOR",
    "OperationCounter",
    "gradient_cost",
    "consensus_cost",
    "prox_cost",
    "solve_cost",
    "initial_iterates",
    "run_time_indexed",
    "consensus_products",
    "run_iteration_indexed",
    "run_dpogd",
]
