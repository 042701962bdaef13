from .mixing import (
    STOCHASTIC_TOL,
    MixingMatrix,
    PermutationBasis,
    ValidationReport,
    permutation_basis,
    effective_eta,
    complete_matrix,
    mixing_matrix,
    validate,
    consensus_product,
    MixingSequence,
    CompleteMixing,
    PermutationMixing,
    ExplicitMixing,
)
from .contraction import ContractionConstants, contraction_constants
from .connectivity import (
    DisseminationMode,
    support_graph,
    check_b_connectivity,
    estimate_connectivity_window,
    dissemination_delay,
)

__all__: list[str] = [
    "STOCHASTIC_TOL",
    "MixingMatrix",
    "PermutationBasis",
    "ValidationReport",
    "permutation_basis",
    "effective_eta",
    "complete_matrix",
    "mixing_matrix",
    "validate",
    "consensus_product",
    "MixingSequence",
    "CompleteMixing",
    "PermutationMixing",
    "ExplicitMixing",
    "ContractionConstants",
    "contraction_constants",
    "DisseminationMode",
    "support_graph",
    "check_b_connectivity",
    "estimate_connectivity_window",
    "dissemination_delay",
]
