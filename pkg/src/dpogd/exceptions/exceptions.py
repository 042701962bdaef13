from enum import IntEnum


class ExitCode(IntEnum):
    """Process exit codes reported by the command line harness."""

    SUCCESS = 0
    RUNTIME_ERROR = 1
    CONFIG_ERROR = 2
    DIVERGENCE = 3
    ORACLE_FAILURE = 4


class DPOGDException(Exception):
    """
    Base exception for simulation errors.

    Carries an exit code and a detailed message so that the command line
    harness can report the failure and terminate with the right status.
    """

    exit_code: ExitCode = ExitCode.RUNTIME_ERROR

    def __init__(self, details: str, exit_code: ExitCode | None = None) -> None:
        """
        Initialize the exception with details and an optional exit code.

        Args:
            details: A human-readable description of the error.
            exit_code: Overrides the class default exit code (default: None).

        Attributes:
            details (str): Detailed error message.
            exit_code (ExitCode): The process exit code for this error.
        """
        self.details = details
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(f"{self.exit_code.name}: {details}")


class ScheduleInfeasibleError(DPOGDException):
    """The horizon cannot hold a single iteration, or schedule parameters are invalid."""


class OutOfRangeError(DPOGDException):
    """A slot index lies before the first sample time."""


class InvalidNetworkError(DPOGDException):
    """Node count or window arguments do not describe a valid network."""


class InvalidIotaError(DPOGDException):
    """The number of mixed permutations is outside [1, N - 1]."""


class ContractionUnderflowError(DPOGDException):
    """The contraction constant omega underflows or degenerates to 1."""


class DimensionMismatchError(DPOGDException):
    """Array shapes do not agree."""


class InsufficientHorizonError(DPOGDException):
    """The supplied slots end before information dissemination completes."""


class MisalignedTraceError(DPOGDException):
    """Run trace and oracle trace do not cover the same slots."""


class SeriesError(DPOGDException):
    """A numeric series is too short or holds non-positive values."""


class ConfigurationError(DPOGDException):
    """Experiment configuration is invalid or incomplete."""

    exit_code = ExitCode.CONFIG_ERROR


class DivergenceError(DPOGDException):
    """An iterate became non-finite or exceeded the divergence guard."""

    exit_code = ExitCode.DIVERGENCE

    def __init__(self, details: str, slot: int | None = None) -> None:
        """
        Initialize the divergence error.

        Args:
            details: A human-readable description of the error.
            slot: The slot index at which divergence was detected (default: None).
        """
        self.slot = slot
        if slot is not None:
            details = f"{details} (slot {slot})"
        super().__init__(details)


class OracleFailureError(DPOGDException):
    """The reference solver did not reach the requested tolerance."""

    exit_code = ExitCode.ORACLE_FAILURE
