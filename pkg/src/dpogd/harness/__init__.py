from .config import (
    AlgorithmName,
    NetworkSection,
    ScheduleSection,
    AlgorithmSection,
    RunSection,
    SweepSection,
    ExperimentConfig,
    parse_config,
    load_config,
)
from .runner import (
    ALGORITHM_RUNNERS,
    AlgorithmResult,
    SeedResult,
    ExperimentResult,
    ConfigCheck,
    certify_contraction,
    run_seed,
    run_experiment,
    run_sweep,
    sweep_cells,
    validate_config,
)
from .report import render_report, write_report
from .plots import PlotStyle, load_series, emit_plot

__all__: list[str] = [
    "AlgorithmName",
    "NetworkSection",
    "ScheduleSection",
    "AlgorithmSection",
    "RunSection",
    "SweepSection",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "ALGORITHM_RUNNERS",
    "AlgorithmResult",
    "SeedResult",
    "ExperimentResult",
    "ConfigCheck",
    "certify_contraction",
    "run_seed",
    "run_experiment",
    "run_sweep",
    "sweep_cells",
    "validate_config",
    "render_report",
    "write_report",
    "PlotStyle",
    "load_series",
    "emit_plot",
]
