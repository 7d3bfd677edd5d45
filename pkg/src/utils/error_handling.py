"""Error handling utilities shared by the samplers, models and CLI.

The exception types live in `src.utils.errors`.
"""

import logging
from collections.abc import Generator
from contextlib import contextmanager
from pathlib import Path

from src.utils.errors import DirectoryCreationError, FileOperationError, SphCovError
from src.utils.logger import warn
from src.utils.types import ErrorContextValue

logger = logging.getLogger(__name__)

__all__ = [
    "error_context",
    "RejectionCounter",
    "ensure_directory_exists",
    "safe_file_write",
    "safe_file_read",
]


@contextmanager
def error_context(operation: str, **context: ErrorContextValue) -> Generator[None, None, None]:
    """Attach operation context to any failure raised inside the block.

    Args:
        operation: Description of the operation being performed
        **context: Additional context information (stage, iteration, chain id)

    Raises:
        SphCovError: package errors keep their type and gain the context;
            anything else is wrapped.
    """
    try:
        logger.debug(f"Starting operation: {operation}")
        yield
        logger.debug(f"Completed operation: {operation}")
    except SphCovError as e:
        for key, value in context.items():
            e.context.setdefault(key, value)
        e.context.setdefault("operation", operation)
        raise
    except Exception as e:
        error_msg = f"Operation '{operation}' failed: {e}"
        logger.error(error_msg, extra={"sphcov_context": context}, exc_info=True)
        raise SphCovError(error_msg, context) from e


class RejectionCounter:
    """Counts proposals rejected for numerical reasons during a run."""

    def __init__(self, operation_name: str) -> None:
        self.operation_name = operation_name
        self.reasons: dict[str, int] = {}
        self.total_count = 0

    def add(self, reason: str) -> None:
        """Record one rejection."""
        self.reasons[reason] = self.reasons.get(reason, 0) + 1
        self.total_count += 1
        logger.debug(f"[{self.operation_name}] rejected: {reason}")

    def has_rejections(self) -> bool:
        return self.total_count > 0

    def get_summary(self) -> str:
        if not self.reasons:
            return f"[{self.operation_name}] no numerical rejections"
        parts = ", ".join(f"{reason}={count}" for reason, count in sorted(self.reasons.items()))
        return f"[{self.operation_name}] {self.total_count} numerical rejections ({parts})"

    def log_summary(self) -> None:
        summary = self.get_summary()
        if self.has_rejections():
            logger.warning(summary)
            warn(summary)
        else:
            logger.info(summary)


def ensure_directory_exists(directory: Path, create: bool = True) -> bool:
    """Ensure a directory exists, optionally creating it.

    Raises:
        DirectoryCreationError: If directory creation fails
    """
    if directory.exists():
        return True

    if not create:
        return False

    try:
        directory.mkdir(parents=True, exist_ok=True)
        logger.debug(f"Created directory: {directory}")
        return True
    except OSError as e:
        raise DirectoryCreationError(f"Failed to create directory '{directory}': {e}") from e


def safe_file_write(file_path: Path, content: str, encoding: str = "utf-8", create_dirs: bool = True) -> bool:
    """Write text to a file, creating parent directories as needed.

    Raises:
        FileOperationError: If file writing fails
    """
    try:
        if create_dirs:
            ensure_directory_exists(file_path.parent)
        # newline="" keeps "\n" line endings
        with file_path.open("w", encoding=encoding, newline="") as handle:
            handle.write(content)
        logger.debug(f"Successfully wrote file: {file_path}")
        return True
    except OSError as e:
        raise FileOperationError(f"Failed to write file '{file_path}': {e}") from e


def safe_file_read(file_path: Path, encoding: str = "utf-8") -> str:
    """Read a text file.

    Raises:
        FileOperationError: If the file is missing or unreadable
    """
    try:
        return file_path.read_text(encoding=encoding)
    except OSError as e:
        raise FileOperationError(f"Failed to read file '{file_path}': {e}") from e
