import json
from unittest.mock import patch

import pytest
import toml

from src.utils.config import load_config, load_experiment_document, merge_layers
from src.utils.errors import FileOperationError, InvalidConfigError


@pytest.fixture
def mock_config_data():
    return {"seed": 7, "chains": 2}


def test_load_config_from_cwd(tmp_path, mock_config_data):
    (tmp_path / ".sphcov.toml").write_text(toml.dumps(mock_config_data))

    with patch("pathlib.Path.cwd", return_value=tmp_path), patch("pathlib.Path.home", return_value=tmp_path / "nohome"):
        config = load_config()
        assert config == mock_config_data


def test_load_config_from_config_dir(tmp_path, mock_config_data):
    config_dir = tmp_path / ".config" / "sphcov"
    config_dir.mkdir(parents=True)
    (config_dir / "config.toml").write_text(toml.dumps(mock_config_data))

    with patch("pathlib.Path.home", return_value=tmp_path), patch("pathlib.Path.cwd", return_value=tmp_path / "nocwd"):
        config = load_config()
        assert config == mock_config_data


def test_load_config_cwd_file_wins(tmp_path):
    config_dir = tmp_path / ".config" / "sphcov"
    config_dir.mkdir(parents=True)
    (config_dir / "config.toml").write_text(toml.dumps({"seed": 1, "thin": 5}))
    (tmp_path / ".sphcov.toml").write_text(toml.dumps({"seed": 2}))

    with patch("pathlib.Path.cwd", return_value=tmp_path), patch("pathlib.Path.home", return_value=tmp_path):
        config = load_config()
        assert config == {"seed": 2, "thin": 5}


def test_load_config_no_files():
    with patch("pathlib.Path.exists", return_value=False):
        config = load_config()
        assert config == {}


def test_load_experiment_document_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"iterations": 300, "prior": "sqdir"}))
    assert load_experiment_document(path) == {"iterations": 300, "prior": "sqdir"}


def test_load_experiment_document_toml(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('iterations = 300\nalpha = [0.1, 10.0]\n')
    assert load_experiment_document(path) == {"iterations": 300, "alpha": [0.1, 10.0]}


def test_load_experiment_document_rejects_garbage(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{not json")
    with pytest.raises(InvalidConfigError):
        load_experiment_document(path)


def test_load_experiment_document_rejects_non_mapping(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("[1, 2]")
    with pytest.raises(InvalidConfigError):
        load_experiment_document(path)


def test_load_experiment_document_missing_file(tmp_path):
    with pytest.raises(FileOperationError):
        load_experiment_document(tmp_path / "absent.json")


def test_merge_layers_later_wins_and_none_never_overrides():
    merged = merge_layers({"seed": 1, "thin": 2}, {"seed": 3, "thin": None}, {"chains": 4})
    assert merged == {"seed": 3, "thin": 2, "chains": 4}
