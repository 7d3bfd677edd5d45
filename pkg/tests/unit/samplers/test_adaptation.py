import numpy as np
import pytest

from src.samplers.adaptation import DA_GAMMA, DA_KAPPA, DA_N0, da_init, dual_averaging_update
from src.samplers.hmc import hmc_step_euclidean


def test_constants():
    assert (DA_GAMMA, DA_N0, DA_KAPPA) == (0.05, 10, 0.75)


def test_init_centres_on_ten_times_the_initial_step():
    state = da_init(0.1, target=0.7)
    assert state.mu == pytest.approx(np.log(1.0))
    assert state.h == pytest.approx(0.1)
    assert state.step_size(adapting=True) == pytest.approx(0.1)


def test_hitting_the_target_is_a_fixed_point():
    state = da_init(0.1, target=0.7)
    for _ in range(20):
        state = dual_averaging_update(state, 0.7)
        assert state.a_bar == 0.0
        assert state.h == pytest.approx(np.exp(state.mu))


def test_all_rejections_shrink_the_step_after_the_first_update():
    state = dual_averaging_update(da_init(0.1), 0.0)
    # the first update jumps toward mu = log(10 h0) before the rejections pull it down
    assert state.h == pytest.approx(np.exp(np.log(1.0) - 0.7 / 11 / DA_GAMMA))
    assert state.h > 0.1
    previous = state.h
    for _ in range(50):
        state = dual_averaging_update(state, 0.0)
        assert state.h < previous
        previous = state.h


def test_frozen_step_is_the_running_average():
    state = da_init(0.1)
    for accept in (0.2, 0.9, 0.5):
        state = dual_averaging_update(state, accept)
    assert state.n == 3
    assert state.step_size(adapting=False) == pytest.approx(np.exp(state.log_h_bar))


def test_adapting_hmc_reaches_the_target_acceptance():
    rng = np.random.default_rng(0)

    def standard_normal(q):
        return -0.5 * float(q @ q), -q

    q = rng.normal(size=10)
    state = da_init(1.0, target=0.7)
    for _ in range(2000):
        transition = hmc_step_euclidean(q, standard_normal, state.h, 10, rng)
        state = dual_averaging_update(state, transition.accept_prob)
        q = transition.q

    probs = []
    for _ in range(1000):
        transition = hmc_step_euclidean(q, standard_normal, state.h_bar, 10, rng)
        probs.append(transition.accept_prob)
        q = transition.q
    assert np.mean(probs) == pytest.approx(0.7, abs=0.1)
