"""Dual-averaging step-size adaptation."""

from typing import NamedTuple

import numpy as np

DA_GAMMA = 0.05
DA_N0 = 10
DA_KAPPA = 0.75


class DualAvgState(NamedTuple):
    """State of the dual-averaging recursion; h is the step used while adapting."""

    mu: float
    log_h: float
    log_h_bar: float
    a_bar: float
    n: int
    target: float
    gamma: float = DA_GAMMA
    n0: int = DA_N0
    kappa: float = DA_KAPPA

    @property
    def h(self) -> float:
        return float(np.exp(self.log_h))

    @property
    def h_bar(self) -> float:
        return float(np.exp(self.log_h_bar))

    def step_size(self, adapting: bool) -> float:
        """Current adaptive step during adaptation, the frozen average afterwards."""
        return self.h if adapting else self.h_bar


def da_init(h0: float, target: float = 0.7) -> DualAvgState:
    return DualAvgState(
        mu=float(np.log(10.0 * h0)),
        log_h=float(np.log(h0)),
        log_h_bar=0.0,
        a_bar=0.0,
        n=0,
        target=target,
    )


def dual_averaging_update(state: DualAvgState, accept: float) -> DualAvgState:
    n = state.n + 1
    weight = 1.0 / (n + state.n0)
    a_bar = (1.0 - weight) * state.a_bar + weight * (state.target - accept)
    log_h = state.mu - np.sqrt(n) / state.gamma * a_bar
    eta = n ** (-state.kappa)
    log_h_bar = eta * log_h + (1.0 - eta) * state.log_h_bar
    return state._replace(log_h=float(log_h), log_h_bar=float(log_h_bar), a_bar=float(a_bar), n=n)
