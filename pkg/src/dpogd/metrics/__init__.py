from .regret import RegretLedger, dynamic_regret
from .diagnostics import (
    DIAGNOSTIC_COLUMNS,
    DiagnosticsRecord,
    DiagnosticsSummary,
    consensus_diagnostics,
    diagnostics_frame,
    summarize_diagnostics,
)
from .overlay import theoretical_overlay, loglog_slope, path_residual, log_grid

__all__: list[str] = [
    "RegretLedger",
    "dynamic_regret",
    "DIAGNOSTIC_COLUMNS",
    "DiagnosticsRecord",
    "DiagnosticsSummary",
    "consensus_diagnostics",
    "diagnostics_frame",
    "summarize_diagnostics",
    "theoretical_overlay",
    "loglog_slope",
    "path_residual",
    "log_grid",
]
