from .exceptions import (
    ExitCode,
    DPOGDException,
    ScheduleInfeasibleError,
    OutOfRangeError,
    InvalidNetworkError,
    InvalidIotaError,
    ContractionUnderflowError,
    DimensionMismatchError,
    InsufficientHorizonError,
    MisalignedTraceError,
    SeriesError,
    ConfigurationError,
    DivergenceError,
    OracleFailureError,
)
from .exception_handlers import base_exception_handlers, resolve_exit_code


__all__: list[str] = [
    "ExitCode",
    "DPOGDException",
    "ScheduleInfeasibleError",
    "OutOfRangeError",
    "InvalidNetworkError",
    "InvalidIotaError",
    "ContractionUnderflowError",
    "DimensionMismatchError",
    "InsufficientHorizonError",
    "MisalignedTraceError",
    "SeriesError",
    "ConfigurationError",
    "DivergenceError",
    "OracleFailureError",
    "base_exception_handlers",
    "resolve_exit_code",
]
