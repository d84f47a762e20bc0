"""Custom exceptions for the pre-log verification toolkit.

This module defines a hierarchy of custom exceptions so that callers (and the
CLI in particular) can tell bad input apart from a numerically falsified
claim.
"""

import traceback
from datetime import datetime, timezone
from typing import Any, Dict, Optional


class PrelogError(Exception):
    """Base exception class for all toolkit errors.

    All custom exceptions in this package inherit from this class.
    """

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        original_exception: Optional[Exception] = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}
        self.original_exception = original_exception
        self.timestamp = datetime.now(timezone.utc).isoformat()

        # Capture stack trace
        self.stack_trace = traceback.format_exc() if original_exception else None

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for JSON serialization."""
        return {
            "error_type": self.__class__.__name__,
            "error_code": self.error_code,
            "message": self.message,
            "details": self.details,
            "timestamp": self.timestamp,
            "stack_trace": self.stack_trace,
        }

    def __str__(self) -> str:
        return f"{self.error_code}: {self.message}"


class ConfigurationError(PrelogError):
    """Raised when there are configuration-related errors."""

    def __init__(self, message: str, config_key: Optional[str] = None, **kwargs):
        super().__init__(message, **kwargs)
        if config_key:
            self.details["config_key"] = config_key


class ValidationError(PrelogError):
    """Raised when input validation fails."""

    def __init__(
        self,
        message: str,
        field_name: Optional[str] = None,
        field_value: Any = None,
        validation_rule: Optional[str] = None,
        **kwargs,
    ):
        super().__init__(message, **kwargs)
        if field_name:
            self.details["field_name"] = field_name
        if field_value is not None:
            self.details["field_value"] = str(field_value)[:100]  # Truncate
        if validation_rule:
            self.details["validation_rule"] = validation_rule


class InvalidDimsError(ValidationError):
    """Raised when (T, R, L, Q) lie outside an operation's domain."""

    def __init__(self, message: str, dims: Any = None, **kwargs):
        super().__init__(message, **kwargs)
        if dims is not None:
            self.details["dims"] = str(dims)


class DimensionError(ValidationError):
    """Raised when an array shape does not match the declared dims."""

    def __init__(
        self,
        message: str,
        expected_shape: Optional[tuple] = None,
        actual_shape: Optional[tuple] = None,
        **kwargs,
    ):
        super().__init__(message, **kwargs)
        if expected_shape is not None:
            self.details["expected_shape"] = list(expected_shape)
        if actual_shape is not None:
            self.details["actual_shape"] = list(actual_shape)


class OutOfScopeError(ValidationError):
    """Raised when a bound is requested outside the range it is proven for."""


class VerificationError(PrelogError):
    """Raised when a constructive claim fails numerical verification."""

    def __init__(self, message: str, claim: Optional[str] = None, **kwargs):
        super().__init__(message, **kwargs)
        if claim:
            self.details["claim"] = claim


class IndexConstructionError(VerificationError):
    """Raised when the cyclic pilot-set fill cannot continue."""


class AuxiliarySetsError(VerificationError):
    """Raised when no partition G_1, ..., G_T with the required properties exists."""


class ConstructionError(VerificationError):
    """Raised when the nonsingularity witness fails after all retries."""

    def __init__(self, message: str, attempts: Optional[int] = None, **kwargs):
        super().__init__(message, **kwargs)
        if attempts is not None:
            self.details["attempts"] = attempts


class EstimatorError(PrelogError):
    """Raised when a Monte Carlo estimator refuses its input."""

    def __init__(self, message: str, estimator: Optional[str] = None, **kwargs):
        super().__init__(message, **kwargs)
        if estimator:
            self.details["estimator"] = estimator


class FileOperationError(PrelogError):
    """Raised when report files cannot be written."""

    def __init__(
        self,
        message: str,
        file_path: Optional[str] = None,
        operation: Optional[str] = None,
        **kwargs,
    ):
        super().__init__(message, **kwargs)
        if file_path:
            self.details["file_path"] = file_path
        if operation:
            self.details["operation"] = operation


# Exception utilities
class ErrorHandler:
    """Utility class for handling, logging and classifying errors."""

    USAGE_EXIT_CODE = 2
    FAILURE_EXIT_CODE = 1

    @staticmethod
    def handle_exception(
        exception: Exception, logger=None, reraise: bool = True
    ) -> Optional[PrelogError]:
        """Handle an exception and optionally convert it to a custom exception.

        Args:
            exception: The original exception
            logger: Logger instance for logging
            reraise: Whether to reraise the exception

        Returns:
            Custom exception if not reraising, None otherwise
        """
        if isinstance(exception, PrelogError):
            custom_exception = exception
        else:
            custom_exception = ErrorHandler._convert_exception(exception)

        if logger:
            logger.error(f"Exception handled: {custom_exception}")

        if reraise:
            raise custom_exception from exception

        return custom_exception

    @staticmethod
    def exit_code(exception: Exception) -> int:
        """Map an exception to the process exit code used by the CLI."""
        if isinstance(
            exception, (ValidationError, EstimatorError, ConfigurationError)
        ):
            return ErrorHandler.USAGE_EXIT_CODE
        return ErrorHandler.FAILURE_EXIT_CODE

    @staticmethod
    def _convert_exception(exception: Exception) -> PrelogError:
        """Convert standard exceptions to custom exceptions."""
        error_message = str(exception)

        if isinstance(exception, ValueError):
            return ValidationError(message=error_message, original_exception=exception)
        elif isinstance(exception, PermissionError):
            return FileOperationError(
                message=error_message,
                operation="permission_denied",
                original_exception=exception,
            )
        elif isinstance(exception, OSError):
            return FileOperationError(
                message=error_message, operation="write", original_exception=exception
            )
        elif isinstance(exception, FloatingPointError):
            return VerificationError(
                message=error_message, original_exception=exception
            )
        else:
            # Generic wrapper for unknown exceptions
            return PrelogError(
                message=f"Unexpected error: {error_message}",
                original_exception=exception,
            )
