import json
from pathlib import Path
from typing import cast

import toml

from src.utils.errors import FileOperationError, InvalidConfigError
from src.utils.types import ConfigValue, MutableConfigMapping


def load_config() -> MutableConfigMapping:
    """Merge user-level TOML defaults; the working-directory file wins."""
    config: MutableConfigMapping = {}
    paths = [
        Path.home() / ".config/sphcov/config.toml",
        Path.cwd() / ".sphcov.toml",
    ]
    for path in paths:
        if path.exists():
            config.update(cast(dict[str, ConfigValue], toml.load(path)))
    return config


def load_experiment_document(path: Path) -> MutableConfigMapping:
    """Load a flat key-value experiment document (JSON, or TOML by suffix)."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FileOperationError(f"Failed to read config '{path}': {e}") from e

    try:
        if path.suffix == ".toml":
            document = toml.loads(text)
        else:
            document = json.loads(text)
    except (json.JSONDecodeError, toml.TomlDecodeError) as e:
        raise InvalidConfigError(f"Config '{path}' is not parseable: {e}", {"path": str(path)}) from e

    if not isinstance(document, dict):
        raise InvalidConfigError("Config document must be a key-value mapping", {"path": str(path)})
    return cast(MutableConfigMapping, document)


def merge_layers(*layers: MutableConfigMapping) -> MutableConfigMapping:
    """Later layers override earlier ones; None values never override."""
    merged: MutableConfigMapping = {}
    for layer in layers:
        merged.update({key: value for key, value in layer.items() if value is not None})
    return merged
