"""Iteration schedule and divergence monitoring shared by the static and dynamic chains."""

from collections import deque
from dataclasses import dataclass

import numpy as np

from src.model.dto.experiment import ExperimentConfig, StopRule
from src.samplers.sphhmc import SphHmcConfig
from src.utils.errors import ChainDivergedError, InvalidConfigError


@dataclass(frozen=True)
class ChainSchedule:
    iterations: int = 3000
    burn_in: int = 1000
    thin: int = 10
    adapt_iterations: int = 300
    target_accept: float = 0.7
    step_size: float = 0.1
    t_max: int = 100
    stop_rule: StopRule = StopRule.TWO_ORTHANTS
    fixed_steps: int = 10
    hmc_steps: int = 10
    divergence_window: int = 200
    divergence_floor: float = 0.01

    def __post_init__(self) -> None:
        if not self.iterations > self.burn_in >= 0 or self.thin < 1:
            raise InvalidConfigError(
                "Need iterations > burn-in >= 0 and thin >= 1",
                {"iterations": self.iterations, "burn_in": self.burn_in, "thin": self.thin},
            )
        if self.adapt_iterations < 0:
            raise InvalidConfigError("Adaptation length must be non-negative")

    @classmethod
    def from_config(cls, config: ExperimentConfig) -> "ChainSchedule":
        return cls(
            iterations=config.iterations,
            burn_in=config.burn_in,
            thin=config.thin,
            adapt_iterations=min(config.adapt_iterations, config.burn_in),
            target_accept=config.target_accept,
            step_size=config.step_size,
            t_max=config.t_max,
            stop_rule=config.stop_rule,
            fixed_steps=config.fixed_steps,
            hmc_steps=config.hmc_steps,
            divergence_window=config.divergence_window,
            divergence_floor=config.divergence_floor,
        )

    @property
    def retained(self) -> int:
        return len(range(self.burn_in, self.iterations, self.thin))

    def is_adapting(self, iteration: int) -> bool:
        return iteration < self.adapt_iterations

    def keeps(self, iteration: int) -> bool:
        return iteration >= self.burn_in and (iteration - self.burn_in) % self.thin == 0

    def sphhmc(self, h: float) -> SphHmcConfig:
        return SphHmcConfig(h=h, t_max=self.t_max, stop_rule=self.stop_rule, fixed_steps=self.fixed_steps)


class DivergenceMonitor:
    """Raises once the mean acceptance over a full window falls below the floor.

    Only post-adaptation iterations are recorded.
    """

    def __init__(self, name: str, window: int, floor: float) -> None:
        self.name = name
        self.floor = floor
        self._accepts: deque[float] = deque(maxlen=max(window, 1))

    def record(self, accept_prob: float, iteration: int) -> None:
        self._accepts.append(accept_prob)
        if len(self._accepts) == self._accepts.maxlen:
            rate = float(np.mean(self._accepts))
            if rate < self.floor:
                raise ChainDivergedError(
                    f"{self.name} acceptance collapsed",
                    {"sampler": self.name, "iteration": iteration, "rate": rate, "window": len(self._accepts)},
                )
