import math

import numpy as np
import pytest
import scipy.optimize
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dpogd.prox import NonsmoothSpec, project_ball, prox_composite, soft_threshold

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


def prox_objective(u: np.ndarray, x: np.ndarray, alpha: float, sigma: float) -> float:
    return float(sigma * np.abs(u).sum() + np.sum((u - x) ** 2) / (2.0 * alpha))


def brute_force_prox(x: np.ndarray, alpha: float, sigma: float, R: float) -> np.ndarray:
    """Minimize the prox objective over ||u|| <= R from several starts; the result is pulled back into the ball."""

    def objective(u):
        return prox_objective(u, x, alpha, sigma)

    constraints = [] if math.isinf(R) else [{"type": "ineq", "fun": lambda u: R**2 - u @ u}]
    best = None
    for start in (np.zeros_like(x), x, np.clip(x, -R, R) * 0.5):
        result = scipy.optimize.minimize(
            objective, start, method="SLSQP", constraints=constraints, options={"ftol": 1e-14, "maxiter": 500}
        )
        if best is None or result.fun < best.fun:
            best = result
    norm = np.linalg.norm(best.x)
    return best.x * (R / norm) if norm > R else best.x


def test_soft_threshold_example():
    assert np.allclose(soft_threshold([3.0, -0.5, 0.0], 1.0), [2.0, 0.0, 0.0])


def test_soft_threshold_zero_is_identity():
    x = np.array([1.5, -2.0, 0.25])
    assert np.array_equal(soft_threshold(x, 0.0), x)


def test_soft_threshold_rejects_negative_threshold():
    with pytest.raises(ValueError):
        soft_threshold([1.0], -0.1)


@pytest.mark.parametrize(
    "x, R, expected",
    [([3.0, 4.0], 10.0, [3.0, 4.0]), ([3.0, 4.0], 1.0, [0.6, 0.8]), ([0.0, 0.0], 2.0, [0.0, 0.0])],
)
def test_project_ball_examples(x, R, expected):
    assert np.allclose(project_ball(x, R), expected)


def test_project_ball_rows():
    stack = np.array([[3.0, 4.0], [0.3, 0.4]])
    assert np.allclose(project_ball(stack, 1.0), [[0.6, 0.8], [0.3, 0.4]])


def test_project_ball_rejects_non_positive_radius():
    with pytest.raises(ValueError):
        project_ball([1.0], 0.0)


def test_prox_without_nonsmooth_term_is_identity():
    x = np.array([[1.0, -7.0], [0.5, 3.0]])
    assert np.array_equal(prox_composite(x, 0.3, NonsmoothSpec()), x)


def test_prox_thresholds_then_projects():
    assert np.allclose(prox_composite([2.0, 0.0], 1.0, NonsmoothSpec(sigma=1.0, radius=0.5)), [0.5, 0.0])


def test_prox_rejects_non_positive_step():
    with pytest.raises(ValueError):
        prox_composite([1.0], 0.0, NonsmoothSpec())


def test_nonsmooth_value():
    spec = NonsmoothSpec(sigma=2.0, radius=5.0)
    assert spec.value([1.0, -2.0]) == pytest.approx(6.0)
    assert spec.value([6.0, 0.0]) == math.inf
    assert np.allclose(spec.value(np.array([[1.0, 0.0], [0.0, 0.0]])), [2.0, 0.0])


@given(
    x=arrays(np.float64, st.integers(min_value=1, max_value=3), elements=st.floats(-5.0, 5.0)),
    alpha=st.floats(min_value=0.05, max_value=2.0),
    sigma=st.floats(min_value=0.0, max_value=3.0),
    R=st.sampled_from([0.5, 1.0, 3.0, math.inf]),
)
def test_prox_matches_numerical_minimization(x, alpha, sigma, R):
    spec = NonsmoothSpec(sigma=sigma, radius=R)
    closed_form = prox_composite(x, alpha, spec)
    numerical = brute_force_prox(x, alpha, sigma, R)
    assert np.linalg.norm(closed_form) <= R * (1 + 1e-12)
    assert prox_objective(closed_form, x, alpha, sigma) <= prox_objective(numerical, x, alpha, sigma) + 1e-9


@given(
    x=arrays(np.float64, 4, elements=finite),
    y=arrays(np.float64, 4, elements=finite),
    alpha=st.floats(min_value=0.01, max_value=5.0),
    sigma=st.floats(min_value=0.0, max_value=5.0),
    R=st.sampled_from([0.1, 1.0, 20.0, math.inf]),
)
def test_prox_is_non_expansive(x, y, alpha, sigma, R):
    spec = NonsmoothSpec(sigma=sigma, radius=R)
    gap = np.linalg.norm(prox_composite(x, alpha, spec) - prox_composite(y, alpha, spec))
    assert gap <= np.linalg.norm(x - y) * (1 + 1e-12) + 1e-12


@given(
    x=arrays(np.float64, 3, elements=finite),
    alpha=st.floats(min_value=0.01, max_value=5.0),
    sigma=st.floats(min_value=0.0, max_value=5.0),
)
def test_prox_residual_is_a_subgradient(x, alpha, sigma):
    spec = NonsmoothSpec(sigma=sigma)
    p = prox_composite(x, alpha, spec)
    g = (x - p) / alpha
    for u in (np.zeros(3), x, -x, np.ones(3)):
        assert sigma * np.abs(u).sum() >= sigma * np.abs(p).sum() + g @ (u - p) - 1e-9
