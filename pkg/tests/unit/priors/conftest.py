import numpy as np
import pytest


def chart_gradient_check(logpdf, grad, point, step=1e-6):
    """Compare an ambient gradient with central differences in the chart of the first d - 1 coordinates."""
    free = point[:-1].copy()
    sign = np.sign(point[-1])

    def lift(x):
        return np.append(x, sign * np.sqrt(1.0 - x @ x))

    numeric = np.empty(free.size)
    for k in range(free.size):
        e = np.zeros(free.size)
        e[k] = step
        numeric[k] = (logpdf(lift(free + e)) - logpdf(lift(free - e))) / (2 * step)
    g = grad(point)
    analytic = g[:-1] + g[-1] * (-free / point[-1])
    return numeric, analytic


@pytest.fixture
def chart_check():
    return chart_gradient_check


@pytest.fixture
def random_point():
    def _draw(dim, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=dim)
        x[-1] = abs(x[-1]) + 0.5
        return x / np.linalg.norm(x)

    return _draw
