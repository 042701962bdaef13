from .target import TargetState, init_target, evolve_target, target_trace
from .slots import (
    ProblemSpec,
    SlotData,
    SmoothnessConstants,
    sample_slot,
    local_gradient,
    local_gradients,
    average_gradient,
    local_losses,
    smooth_loss,
    objective,
    smoothness_constants,
)
from .stream import SlotStream, StaticStream, ProblemStream, stream_constants
from .oracle import (
    ORACLE_TOL,
    OracleRecord,
    OracleTrace,
    fixed_point_residual,
    oracle_optimum,
    solve_oracle_trace,
    path_length,
    subsampled_path_length,
)

__all__: list[str] = [
    "TargetState",
    "init_target",
    "evolve_target",
    "target_trace",
    "ProblemSpec",
    "SlotData",
    "SmoothnessConstants",
    "sample_slot",
    "local_gradient",
    "local_gradients",
    "average_gradient",
    "local_losses",
    "smooth_loss",
    "objective",
    "smoothness_constants",
    "SlotStream",
    "StaticStream",
    "ProblemStream",
    "stream_constants",
    "ORACLE_TOL",
    "OracleRecord",
    "OracleTrace",
    "fixed_point_residual",
    "oracle_optimum",
    "solve_oracle_trace",
    "path_length",
    "subsampled_path_length",
]
