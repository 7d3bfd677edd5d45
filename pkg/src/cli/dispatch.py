"""Config resolution and exit-code dispatch for CLI commands."""

import logging
from collections.abc import Callable
from typing import Protocol

from rich.markup import escape

from src.cli.options import CommandOptions
from src.model.dto.experiment import ExperimentConfig
from src.utils.config import load_config, load_experiment_document, merge_layers
from src.utils.errors import (
    ChainDivergedError,
    DirectoryCreationError,
    FileOperationError,
    InvalidConfigError,
    RaggedDataError,
    SphCovError,
    TooFewSamplesError,
)
from src.utils.logger import error
from src.utils.types import MutableConfigMapping

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION_FAILED = 2
EXIT_INPUT_ERROR = 3
EXIT_DIVERGED = 4

# First match wins, so subclasses must precede their bases.
EXIT_CODES: tuple[tuple[type[SphCovError], int], ...] = (
    (InvalidConfigError, EXIT_INPUT_ERROR),
    (RaggedDataError, EXIT_INPUT_ERROR),
    (FileOperationError, EXIT_INPUT_ERROR),
    (DirectoryCreationError, EXIT_INPUT_ERROR),
    (TooFewSamplesError, EXIT_INPUT_ERROR),
    (ChainDivergedError, EXIT_DIVERGED),
)


class DefaultsLoader(Protocol):
    """Callable returning user-level config defaults."""

    def __call__(self) -> MutableConfigMapping:
        """Load defaults."""


def resolve_config(options: CommandOptions, defaults: DefaultsLoader | None = None) -> ExperimentConfig:
    """Layer user defaults, the experiment document and command flags, in that order."""
    document = load_experiment_document(options.config_path) if options.config_path is not None else {}
    merged = merge_layers((defaults or load_config)(), document, options.overrides())
    logger.debug(f"Resolved config keys: {sorted(merged)}")
    return ExperimentConfig.from_mapping(merged)


def exit_code_for(exc: SphCovError) -> int:
    for error_type, code in EXIT_CODES:
        if isinstance(exc, error_type):
            return code
    return EXIT_FAILURE


def run_with_exit_codes(command: Callable[[], int], action: str) -> int:
    """Run a command body, reporting package errors and mapping them to exit codes."""
    try:
        return command()
    except SphCovError as exc:
        code = exit_code_for(exc)
        error(f"Failed to {action}: {escape(str(exc))}")
        logger.debug(f"{action} failed with exit code {code}", exc_info=True)
        return code
