import functools
from typing import Callable

from logzero import logger
from pydantic import ValidationError

from dpogd.exceptions.exceptions import (
    DPOGDException,
    ExitCode,
    ConfigurationError,
    DivergenceError,
    OracleFailureError,
)


class ExceptionsHandlers:
    """
    Handler class mapping simulation and validation errors to exit codes.

    Every classmethod logs the failure and returns the exit code the command
    line harness terminates with.
    """

    @classmethod
    def _base_exception_handler(cls, exc: DPOGDException) -> ExitCode:
        """
        Handle any simulation error by logging its details.

        Args:
            exc: The DPOGDException instance.

        Returns:
            ExitCode: The exit code carried by the exception.
        """
        logger.error(f"Run failed: {exc.details}")
        return exc.exit_code

    @classmethod
    def _config_exception_handler(cls, exc: ConfigurationError) -> ExitCode:
        """
        Handle configuration errors.

        Args:
            exc: The ConfigurationError instance.

        Returns:
            ExitCode: CONFIG_ERROR.
        """
        logger.error(f"Invalid configuration: {exc.details}")
        return ExitCode.CONFIG_ERROR

    @classmethod
    def _divergence_exception_handler(cls, exc: DivergenceError) -> ExitCode:
        """
        Handle divergence of an algorithm run.

        Args:
            exc: The DivergenceError instance, possibly carrying the slot index.

        Returns:
            ExitCode: DIVERGENCE.
        """
        logger.error(f"Divergence detected: {exc.details}")
        return ExitCode.DIVERGENCE

    @classmethod
    def _oracle_exception_handler(cls, exc: OracleFailureError) -> ExitCode:
        """
        Handle failure of the reference solver.

        Args:
            exc: The OracleFailureError instance.

        Returns:
            ExitCode: ORACLE_FAILURE.
        """
        logger.error(f"Oracle failure: {exc.details}")
        return ExitCode.ORACLE_FAILURE

    @classmethod
    def _pydantic_exception_handler(cls, exc: ValidationError) -> ExitCode:
        """
        Handle ValidationError from Pydantic.

        Extracts the first error from the ValidationError and logs a detailed message.

        Args:
            exc: The ValidationError instance containing validation errors.

        Returns:
            ExitCode: CONFIG_ERROR.
        """
        exception = exc.errors()[0]
        details = f"{exception['msg']}. Location: {exception['loc']}. Input: {exception['input']}"
        logger.error(f"Invalid configuration: {details}")
        return ExitCode.CONFIG_ERROR


base_exception_handlers: dict[type[Exception], Callable[[Exception], ExitCode]] = {
    method.__func__.__annotations__["exc"]: functools.partial(
        method.__func__, ExceptionsHandlers
    )
    for method in ExceptionsHandlers.__dict__.values()
    if isinstance(method, classmethod)
}
"""
Default exception handlers for the command line harness.

Maps exception types (DPOGDException and its subclasses, ValidationError) to
handler functions from the ExceptionsHandlers class, wrapped with
functools.partial to bind the class.
"""


def resolve_exit_code(exc: Exception) -> ExitCode | None:
    """
    Find the most specific handler for an exception and run it.

    Args:
        exc: The raised exception.

    Returns:
        ExitCode | None: The exit code, or None when no handler matches.
    """
    for exc_type in type(exc).__mro__:
        if handler := base_exception_handlers.get(exc_type):
            return handler(exc)
    return None
