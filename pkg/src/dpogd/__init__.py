from dpogd.core import ConsensusSchedule, RunContext, build_schedule
from dpogd.engine import RunTrace, run_dpogd
from dpogd.exceptions import DPOGDException
from dpogd.graph import CompleteMixing, ExplicitMixing, PermutationMixing, contraction_constants
from dpogd.metrics import dynamic_regret, consensus_diagnostics
from dpogd.problem import ProblemSpec, ProblemStream, solve_oracle_trace

__all__: list[str] = [
    "ConsensusSchedule",
    "RunContext",
    "build_schedule",
    "RunTrace",
    "run_dpogd",
    "DPOGDException",
    "CompleteMixing",
    "ExplicitMixing",
    "PermutationMixing",
    "contraction_constants",
    "dynamic_regret",
    "consensus_diagnostics",
    "ProblemSpec",
    "ProblemStream",
    "solve_oracle_trace",
]
