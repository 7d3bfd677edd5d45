"""Typed CLI option models."""

from dataclasses import dataclass, fields
from pathlib import Path

from src.utils.types import MutableConfigMapping

# Flag name -> ExperimentConfig field, for flags whose names differ from the field.
FIELD_NAMES = {
    "iters": "iterations",
    "burnin": "burn_in",
}


@dataclass(frozen=True)
class CommandOptions:
    """Raw command flags; None means the flag was not given."""

    config_path: Path | None = None
    seed: int | None = None
    iters: int | None = None
    burnin: int | None = None
    thin: int | None = None
    chains: int | None = None
    workers: int | None = None
    band: int | None = None
    prior: str | None = None
    stop_rule: str | None = None
    fix_mean: bool = False
    fix_variance: bool = False
    dim: int | None = None
    trials: int | None = None
    times: int | None = None
    sparse: bool = False

    def overrides(self) -> MutableConfigMapping:
        """Config keys set on the command line, named as ExperimentConfig fields."""
        values: MutableConfigMapping = {}
        for option in fields(self):
            if option.name in ("config_path", "fix_mean", "fix_variance", "sparse"):
                continue
            value = getattr(self, option.name)
            if value is not None:
                values[FIELD_NAMES.get(option.name, option.name)] = value
        # Switches only ever turn a behavior on; leaving one off defers to the config file.
        if self.fix_mean:
            values["sample_mean"] = False
        if self.fix_variance:
            values["sample_variance"] = False
        if self.sparse:
            values["sparse"] = True
        return values

