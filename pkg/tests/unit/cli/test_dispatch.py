import json
from unittest.mock import patch

import pytest

from src.cli.dispatch import (
    EXIT_DIVERGED,
    EXIT_FAILURE,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    exit_code_for,
    resolve_config,
    run_with_exit_codes,
)
from src.cli.options import CommandOptions
from src.utils.errors import (
    ChainDivergedError,
    FileOperationError,
    InvalidConfigError,
    NotPositiveDefiniteError,
    RaggedDataError,
    TooFewSamplesError,
)


def test_flags_override_the_document_which_overrides_defaults(tmp_path):
    document = tmp_path / "run.json"
    document.write_text(json.dumps({"seed": 11, "iterations": 600, "thin": 4}))
    options = CommandOptions(config_path=document, seed=12)
    config = resolve_config(options, defaults=lambda: {"seed": 1, "chains": 2, "thin": 2})
    assert config.seed == 12
    assert config.iterations == 600
    assert config.burn_in == 200
    assert config.thin == 4
    assert config.chains == 2


def test_unknown_document_keys_are_rejected(tmp_path):
    document = tmp_path / "run.json"
    document.write_text(json.dumps({"iterationz": 10}))
    with pytest.raises(InvalidConfigError):
        resolve_config(CommandOptions(config_path=document), defaults=dict)


@pytest.mark.parametrize(
    ("error", "code"),
    [
        (InvalidConfigError("bad"), EXIT_INPUT_ERROR),
        (RaggedDataError("ragged"), EXIT_INPUT_ERROR),
        (FileOperationError("missing"), EXIT_INPUT_ERROR),
        (TooFewSamplesError("few"), EXIT_INPUT_ERROR),
        (ChainDivergedError("stuck"), EXIT_DIVERGED),
        (NotPositiveDefiniteError("singular"), EXIT_FAILURE),
    ],
)
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_run_reports_failures(capsys):
    def failing() -> int:
        raise ChainDivergedError("acceptance collapsed", {"rate": 0.0})

    assert run_with_exit_codes(failing, "fit model") == EXIT_DIVERGED
    assert "Failed to fit model: acceptance collapsed" in capsys.readouterr().out
    assert run_with_exit_codes(lambda: EXIT_OK, "fit model") == EXIT_OK


@patch("src.cli.dispatch.error")
def test_failures_go_through_the_error_logger(mock_error):
    def failing() -> int:
        raise InvalidConfigError("band must be positive")

    assert run_with_exit_codes(failing, "resolve config") == EXIT_INPUT_ERROR
    mock_error.assert_called_once()
    assert mock_error.call_args.args[0].startswith("Failed to resolve config: band must be positive")
