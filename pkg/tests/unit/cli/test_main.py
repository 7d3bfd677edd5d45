from pathlib import Path
from unittest.mock import patch

import pandas as pd
import pytest
from typer.testing import CliRunner

from src.api import ChainReport, KsReport
from src.cli.dispatch import EXIT_DIVERGED, EXIT_INPUT_ERROR, EXIT_VALIDATION_FAILED
from src.cli.main import app
from src.utils.errors import ChainDivergedError, RaggedDataError


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def no_user_defaults():
    with patch("src.cli.dispatch.load_config", return_value={}) as mock_load:
        yield mock_load


def ks_report(statistics):
    table = pd.DataFrame(
        {
            "entry": [f"s{k}_1" for k in range(len(statistics))],
            "statistic": statistics,
            "pvalue": [0.5] * len(statistics),
            "passed": [s <= 0.05 for s in statistics],
        }
    )
    return KsReport(table, 0.05)


@patch("src.cli.main.__version__", "1.0.0")
def test_version_command(runner):
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert "sphcov v1.0.0" in result.stdout


@patch("src.cli.main.generate_periodic_dataset")
def test_gen_periodic_passes_shape_flags(mock_generate, runner, tmp_path):
    mock_generate.return_value = [tmp_path / "data.csv"]
    result = runner.invoke(app, ["gen-periodic", "-d", "2", "-m", "10", "-n", "20", "--seed", "3", "-o", str(tmp_path)])
    assert result.exit_code == 0
    config, out = mock_generate.call_args.args
    assert (config.dim, config.trials, config.times, config.seed) == (2, 10, 20, 3)
    assert out == tmp_path


@patch("src.cli.main.validate_iw")
def test_validate_iw_exit_codes(mock_validate, runner, tmp_path):
    mock_validate.return_value = ks_report([0.01, 0.02])
    assert runner.invoke(app, ["validate-iw", "-o", str(tmp_path)]).exit_code == 0

    mock_validate.return_value = ks_report([0.01, 0.2])
    result = runner.invoke(app, ["validate-iw", "-o", str(tmp_path)])
    assert result.exit_code == EXIT_VALIDATION_FAILED
    assert "s1_1" in result.stdout


@patch("src.cli.main.fit_static")
def test_fit_static_forwards_the_prior(mock_fit, runner, tmp_path):
    mock_fit.return_value = [ChainReport(0, {"rows": 0.7}, 1.0, 200)]
    result = runner.invoke(app, ["fit-static", "--prior", "sqdir", "--iters", "90", "-o", str(tmp_path)])
    assert result.exit_code == 0
    config, out, data = mock_fit.call_args.args
    assert str(config.prior) == "sqdir"
    assert config.burn_in == 30
    assert data is None


def test_invalid_flag_value_is_an_input_error(runner, tmp_path):
    result = runner.invoke(app, ["fit-static", "--prior", "lkj", "-o", str(tmp_path)])
    assert result.exit_code == EXIT_INPUT_ERROR
    assert "Failed to fit static model" in result.stdout


@patch("src.cli.main.fit_dynamic")
def test_fit_dynamic_flags(mock_fit, runner, tmp_path):
    mock_fit.return_value = []
    data = tmp_path / "data.csv"
    result = runner.invoke(app, ["fit-dynamic", str(data), "-w", "2", "--fix-mean", "--truth", "t.csv"])
    assert result.exit_code == 0
    config, data_path, out, truth = mock_fit.call_args.args
    assert config.band == 2
    assert config.sample_mean is False
    assert config.sample_variance is True
    assert (data_path, out, truth) == (data, Path("dynamic"), Path("t.csv"))


@patch("src.cli.main.fit_dynamic")
def test_fit_dynamic_error_exit_codes(mock_fit, runner, tmp_path):
    mock_fit.side_effect = RaggedDataError("Trial data does not fill a complete M x N x D grid")
    assert runner.invoke(app, ["fit-dynamic", str(tmp_path / "d.csv")]).exit_code == EXIT_INPUT_ERROR

    mock_fit.side_effect = ChainDivergedError("Cholesky rows acceptance collapsed")
    assert runner.invoke(app, ["fit-dynamic", str(tmp_path / "d.csv")]).exit_code == EXIT_DIVERGED


@patch("src.cli.main.summarize_archive")
def test_summarize(mock_summarize, runner, tmp_path):
    mock_summarize.return_value = [tmp_path / "summary_mean.csv"]
    result = runner.invoke(app, ["summarize", str(tmp_path)])
    assert result.exit_code == 0
    mock_summarize.assert_called_once_with(tmp_path, None)


@patch("src.cli.main.compare_archives")
def test_compare(mock_compare, runner, tmp_path):
    mock_compare.return_value = tmp_path / "compare.csv"
    result = runner.invoke(app, ["compare", "a", "b", "-o", str(tmp_path / "compare.csv")])
    assert result.exit_code == 0
    mock_compare.assert_called_once_with(Path("a"), Path("b"), tmp_path / "compare.csv")
