"""Experiment configuration shared by the CLI, the API facade and the models."""

from dataclasses import asdict, dataclass, field, fields
from enum import StrEnum
from typing import cast

from src.utils.errors import InvalidConfigError
from src.utils.types import ConfigMapping, ConfigValue

MAX_SEED = 2**64 - 1


class PriorKind(StrEnum):
    """Row priors available to the static model."""

    IW = "iw"
    SQDIR = "sqdir"
    VMF = "vmf"
    BINGHAM = "bingham"


class StopRule(StrEnum):
    """How a spherical HMC trajectory decides to stop."""

    TWO_ORTHANTS = "two-orthants"
    STOCHASTIC = "stochastic"
    FIXED = "fixed"


class TauJacobian(StrEnum):
    """Whether the inverse-Wishart log-sd prior keeps the polar radial Jacobian."""

    POLAR = "polar"
    OMITTED = "omitted"


class GpBlock(StrEnum):
    """The three GP-distributed blocks of the dynamic model."""

    MEAN = "mean"
    LOG_SD = "log-sd"
    CHOL = "chol"


@dataclass(frozen=True)
class ExperimentConfig:
    """Every tunable of every subcommand, flat so it round-trips through JSON."""

    seed: int = 2024
    chains: int = 1
    workers: int = 1
    iterations: int = 3000
    burn_in: int = 1000
    thin: int = 10
    adapt_fraction: float = 0.1
    target_accept: float = 0.7
    step_size: float = 0.1
    t_max: int = 100
    stop_rule: StopRule = StopRule.TWO_ORTHANTS
    fixed_steps: int = 10
    hmc_steps: int = 10
    divergence_window: int = 200
    divergence_floor: float = 0.01

    prior: PriorKind = PriorKind.IW
    tau_jacobian: TauJacobian = TauJacobian.POLAR
    alpha: list[float] = field(default_factory=lambda: [1.0, 1.0])
    kappa: float = 10.0
    zeta: float = 10.0
    tau_prior_sd: float = 0.1
    nu: float | None = None
    psi_scale: float = 1.0

    dim: int = 3
    n_obs: int = 20
    ks_threshold: float = 0.05

    band: int | None = None
    sample_mean: bool = True
    sample_variance: bool = True
    smoothness: float = 2.0
    nugget: float = 1e-5
    hyper_a: list[float] = field(default_factory=lambda: [1.0, 1.0, 1.0])
    hyper_b: list[float] = field(default_factory=lambda: [0.1, 1e-3, 0.2])
    hyper_m: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    hyper_v: list[float] = field(default_factory=lambda: [1.0, 0.5, 1.0])

    trials: int = 10
    times: int = 20
    t_start: float = 0.0
    t_end: float | None = None
    sparse: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfigError("Seed must be a 64-bit unsigned integer", {"seed": self.seed})
        if not self.iterations > self.burn_in >= 0:
            raise InvalidConfigError(
                "Need iterations > burn-in >= 0", {"iterations": self.iterations, "burn_in": self.burn_in}
            )
        if self.thin < 1:
            raise InvalidConfigError("Thinning must be at least 1", {"thin": self.thin})
        if self.chains < 1 or self.workers < 1:
            raise InvalidConfigError("Need at least one chain and one worker")
        if not 0 <= self.adapt_fraction <= 1:
            raise InvalidConfigError("Adaptation fraction must lie in [0, 1]", {"adapt_fraction": self.adapt_fraction})
        if not 0 < self.target_accept < 1:
            raise InvalidConfigError("Target acceptance must lie in (0, 1)", {"target_accept": self.target_accept})
        if self.step_size <= 0 or self.t_max < 1 or self.fixed_steps < 1 or self.hmc_steps < 1:
            raise InvalidConfigError("Step size and trajectory lengths must be positive")
        if len(self.alpha) != 2 or min(self.alpha) <= 0:
            raise InvalidConfigError("alpha is [off-diagonal, pole], both positive", {"alpha": str(self.alpha)})
        if self.dim < 1 or self.n_obs < 0 or self.trials < 1 or self.times < 2:
            raise InvalidConfigError("Shapes must be positive (times >= 2)")
        if self.band is not None and self.band < 1:
            raise InvalidConfigError("Band width must be positive", {"band": self.band})
        for name in ("hyper_a", "hyper_b", "hyper_m", "hyper_v"):
            if len(getattr(self, name)) != 3:
                raise InvalidConfigError(f"{name} needs one value per block (mean, sd, chol)")
        if self.time_range[1] <= self.t_start:
            raise InvalidConfigError("Time range must be increasing", {"t_start": self.t_start, "t_end": self.t_end})

    @property
    def retained(self) -> int:
        """Number of post-burn-in draws kept after thinning."""
        return len(range(self.burn_in, self.iterations, self.thin))

    @property
    def time_range(self) -> tuple[float, float]:
        """Generator time range; the sparse process defaults to [0, 1], the periodic one to [0, 2]."""
        if self.t_end is not None:
            return self.t_start, self.t_end
        return self.t_start, 1.0 if self.sparse else 2.0

    @property
    def adapt_iterations(self) -> int:
        return int(self.adapt_fraction * self.iterations)

    def echo(self) -> dict[str, ConfigValue]:
        return cast(dict[str, ConfigValue], {key: _plain(value) for key, value in asdict(self).items()})

    @classmethod
    def from_mapping(cls, values: ConfigMapping) -> "ExperimentConfig":
        """Build from a flat mapping; burn-in defaults to a third of the iterations."""
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise InvalidConfigError("Unknown config keys", {"keys": ", ".join(unknown)})

        kwargs: dict[str, object] = {}
        enums: dict[str, type[StrEnum]] = {"prior": PriorKind, "stop_rule": StopRule, "tau_jacobian": TauJacobian}
        for key, value in values.items():
            if key in enums and value is not None:
                try:
                    value = enums[key](str(value))
                except ValueError as e:
                    raise InvalidConfigError(f"Invalid value for {key}", {"value": str(value)}) from e
            kwargs[key] = value
        if "burn_in" not in kwargs and "iterations" in kwargs:
            kwargs["burn_in"] = int(cast(int, kwargs["iterations"])) // 3
        try:
            return cls(**kwargs)  # type: ignore[arg-type]
        except TypeError as e:
            raise InvalidConfigError(f"Invalid config: {e}") from e


def _plain(value: object) -> ConfigValue:
    if isinstance(value, StrEnum):
        return str(value)
    return cast(ConfigValue, value)
