import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_slot
from dpogd.exceptions import ConfigurationError, DimensionMismatchError, OracleFailureError, OutOfRangeError, SeriesError
from dpogd.problem import (
    ProblemSpec,
    ProblemStream,
    StaticStream,
    average_gradient,
    evolve_target,
    init_target,
    local_gradient,
    local_gradients,
    local_losses,
    objective,
    oracle_optimum,
    path_length,
    sample_slot,
    smooth_loss,
    smoothness_constants,
    solve_oracle_trace,
    stream_constants,
    subsampled_path_length,
    target_trace,
)
from dpogd.prox import NonsmoothSpec


def random_slot(seed: int, N: int = 3, d: int = 2, n: int = 3, lam: float = 0.1, sigma: float = 0.2):
    rng = np.random.default_rng(seed)
    return sample_slot(rng.standard_normal(n), N, d, lam, sigma, rng)


def test_init_target_sparsity_and_norm():
    state = init_target(50, 10, seed=4)
    assert np.count_nonzero(state.u) == 10
    assert state.sparsity == 10
    assert np.linalg.norm(state.u) == pytest.approx(1.0, abs=1e-12)
    assert state.t == 1


def test_single_entry_target_is_plus_or_minus_one():
    assert abs(init_target(1, 1, seed=8).u[0]) == pytest.approx(1.0)


@pytest.mark.parametrize("sparsity", [0, 6])
def test_init_target_rejects_bad_sparsity(sparsity):
    with pytest.raises(ConfigurationError):
        init_target(5, sparsity, seed=0)


def test_evolve_target_keeps_unit_norm():
    state = init_target(20, 4, seed=1)
    rng = np.random.default_rng(0)
    for _ in range(30):
        state = evolve_target(state, rng)
        assert np.linalg.norm(state.u) == pytest.approx(1.0, abs=1e-12)
        assert state.sparsity == 4
        assert set(np.flatnonzero(state.u)) <= set(state.support)
    assert state.t == 31


def test_support_swap_probability_at_slot_two():
    start = init_target(20, 4, seed=2)
    state = start.model_copy(update={"t": 2})
    swaps = sum(evolve_target(state, np.random.default_rng(s)).support != state.support for s in range(4000))
    assert swaps / 4000 == pytest.approx(0.5, abs=0.04)


def test_drift_shrinks_over_time():
    trace = target_trace(20, 4, horizon=1000, seed=6)
    drift = np.linalg.norm(np.diff(trace, axis=0), axis=1)
    assert drift[:100].mean() > drift[-100:].mean()


def test_target_trace_starts_with_a_repeat():
    trace = target_trace(10, 3, horizon=5, seed=0)
    assert trace.shape == (5, 10)
    assert np.array_equal(trace[0], trace[1])
    assert np.array_equal(trace, target_trace(10, 3, horizon=5, seed=0))


def test_noiseless_measurements():
    u = np.array([1.0, -2.0, 0.5])
    slot = sample_slot(u, N=4, d=2, lam=0.0, sigma=0.0, rng=np.random.default_rng(3), noise_std=0.0)
    assert slot.C.shape == (4, 2, 3)
    assert np.allclose(slot.y, np.einsum("idn,n->id", slot.C, u))


def test_default_weights():
    spec = ProblemSpec()
    assert (spec.N, spec.d, spec.n) == (100, 4, 50)
    assert spec.lam == pytest.approx(0.05 / 400)
    assert spec.sigma == pytest.approx(0.01 / (16 * 100**2))
    assert spec.nonsmooth == NonsmoothSpec(sigma=spec.sigma, radius=10.0)


def test_sparsity_above_dimension_is_rejected():
    with pytest.raises(ValueError):
        ProblemSpec(n=3, sparsity=4)


def test_slot_shape_check():
    with pytest.raises(DimensionMismatchError):
        make_slot(np.zeros((2, 1, 3)), np.zeros((2, 2)))


def test_gradient_vanishes_with_residual():
    slot = make_slot([[[1.0, 0.0], [0.0, 1.0]]], [[1.0, 2.0]], lam=0.3)
    x = np.array([1.0, 2.0])
    assert np.allclose(local_gradient(slot, 0, x), 2 * 0.3 * x)
    assert np.allclose(local_gradient(slot, 0, np.zeros(2)), -2.0 * slot.C[0].T @ slot.y[0])


def test_gradient_matches_finite_differences():
    slot = random_slot(11)
    x = np.random.default_rng(1).standard_normal(3)
    h = 1e-6
    for i in range(slot.N):
        numeric = np.array(
            [
                (local_losses(slot, np.tile(x + h * e, (slot.N, 1)))[i] - local_losses(slot, np.tile(x - h * e, (slot.N, 1)))[i]) / (2 * h)
                for e in np.eye(3)
            ]
        )
        assert np.allclose(local_gradient(slot, i, x), numeric, rtol=1e-6, atol=1e-6)


def test_stacked_gradients_agree_with_single_node():
    slot = random_slot(2)
    X = np.random.default_rng(5).standard_normal((slot.N, slot.n))
    stacked = local_gradients(slot, X)
    for i in range(slot.N):
        assert np.allclose(stacked[i], local_gradient(slot, i, X[i]))
    with pytest.raises(DimensionMismatchError):
        local_gradients(slot, X[:-1])


def test_average_gradient_and_loss_are_consistent():
    slot = random_slot(7)
    x = np.random.default_rng(2).standard_normal(3)
    assert np.allclose(average_gradient(slot, x), local_gradients(slot, np.tile(x, (slot.N, 1))).mean(axis=0))
    assert smooth_loss(slot, x) == pytest.approx(local_losses(slot, np.tile(x, (slot.N, 1))).mean())
    spec = NonsmoothSpec(sigma=0.2, radius=100.0)
    assert objective(slot, spec, x) == pytest.approx(smooth_loss(slot, x) + 0.2 * np.abs(x).sum())


def test_oracle_matches_ridge_closed_form():
    slot = random_slot(3, N=4, d=3, n=3, sigma=0.0)
    record = oracle_optimum(slot, NonsmoothSpec())
    ridge = np.linalg.solve(slot.gram + slot.lam * np.eye(3), slot.moment)
    assert np.allclose(record.x_star, ridge, atol=1e-8)
    assert record.residual <= 1e-10


def test_oracle_at_zero_measurements():
    slot = make_slot(np.random.default_rng(0).standard_normal((3, 2, 4)), np.zeros((3, 2)), lam=0.1, sigma=0.5)
    record = oracle_optimum(slot, NonsmoothSpec(sigma=0.5, radius=10.0))
    assert np.allclose(record.x_star, 0.0)


def kkt_sign_enumeration(slot, sigma: float) -> np.ndarray:
    """Elastic-net minimizer by trying every support and sign pattern of the KKT system."""
    n = slot.n
    H, b = slot.hessian, 2.0 * slot.moment
    best, best_value = np.zeros(n), objective(slot, NonsmoothSpec(sigma=sigma), np.zeros(n))
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            idx = list(support)
            for signs in itertools.product((-1.0, 1.0), repeat=size):
                signs = np.array(signs)
                x = np.zeros(n)
                x[idx] = np.linalg.solve(H[np.ix_(idx, idx)], b[idx] - sigma * signs)
                if np.any(np.sign(x[idx]) != signs):
                    continue
                value = objective(slot, NonsmoothSpec(sigma=sigma), x)
                if value < best_value:
                    best, best_value = x, value
    return best


@given(seed=st.integers(min_value=0, max_value=10_000), sigma=st.floats(min_value=0.0, max_value=2.0))
def test_oracle_matches_sign_enumeration(seed, sigma):
    slot = random_slot(seed, N=3, d=2, n=3, lam=0.2, sigma=sigma)
    record = oracle_optimum(slot, NonsmoothSpec(sigma=sigma))
    assert np.allclose(record.x_star, kkt_sign_enumeration(slot, sigma), atol=1e-8)


def test_oracle_failure_is_reported():
    slot = random_slot(4, sigma=0.1)
    with pytest.raises(OracleFailureError):
        oracle_optimum(slot, NonsmoothSpec(sigma=0.1), tol=1e-300, max_iter=3)


def test_static_stream_has_zero_path():
    stream = StaticStream(random_slot(5), horizon=6, nonsmooth=NonsmoothSpec(sigma=0.2))
    oracle = solve_oracle_trace(stream)
    assert oracle.path_length == 0.0
    assert path_length(oracle) == 0.0
    assert np.all(oracle.cumulative_path() == 0.0)


def test_two_slot_path_length():
    x_star = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert path_length(x_star) == pytest.approx(5.0)
    with pytest.raises(SeriesError):
        path_length(x_star[:1])


def test_subsampled_path_never_exceeds_full_path(small_stream):
    oracle = solve_oracle_trace(small_stream)
    assert oracle.horizon == small_stream.horizon
    assert oracle.cumulative_path()[0] == 0.0
    assert oracle.cumulative_path()[-1] == pytest.approx(oracle.path_length)
    for times in ([1, 8, 15, 22], list(range(1, 61, 3)), [1]):
        assert subsampled_path_length(oracle, times) <= oracle.path_length + 1e-12


def test_identity_measurements_constants():
    slot = make_slot([[[1.0, 0.0], [0.0, 1.0]]] * 2, np.zeros((2, 2)))
    constants = smoothness_constants(slot, radius=1.0)
    assert constants.L == pytest.approx(2.0)
    assert constants.mu == pytest.approx(2.0)


def test_zero_measurements_constants():
    slot = make_slot(np.zeros((2, 3, 2)), np.zeros((2, 3)), lam=0.25)
    constants = smoothness_constants(slot, radius=math.inf)
    assert constants.L == pytest.approx(0.5)
    assert constants.mu == pytest.approx(0.5)
    assert constants.M == math.inf


def test_constants_bound_local_hessians():
    slot = random_slot(9, N=4, d=5, n=3)
    constants = smoothness_constants(slot, radius=2.0)
    for i in range(slot.N):
        eigenvalues = np.linalg.eigvalsh(2.0 * slot.C[i].T @ slot.C[i] + 2.0 * slot.lam * np.eye(3))
        assert eigenvalues[-1] <= constants.L + 1e-9
        assert eigenvalues[0] >= constants.mu - 1e-9
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.standard_normal(3)
        x *= 2.0 * rng.random() / np.linalg.norm(x)
        assert np.linalg.norm(local_gradients(slot, np.tile(x, (slot.N, 1))), axis=1).max() <= constants.M + 1e-9


def test_step_range():
    constants = smoothness_constants(make_slot([[[1.0]]], [[0.0]], lam=0.5), radius=1.0)
    assert constants.alpha_max() == pytest.approx(2 * 3.0 / 9.0)
    assert constants.rho(constants.mu / constants.L**2) < 1.0


def test_streams_are_reproducible(small_spec):
    first = ProblemStream(small_spec, horizon=20, seed=12)
    second = ProblemStream(small_spec, horizon=20, seed=12)
    assert first.target_digest() == second.target_digest()
    assert np.array_equal(first.slot(17).C, second.slot(17).C)
    assert first.manifest() == second.manifest()
    assert first.manifest()["target_sha256"] != ProblemStream(small_spec, horizon=20, seed=13).target_digest()


def test_stream_range(small_stream):
    with pytest.raises(OutOfRangeError):
        small_stream.slot(0)
    with pytest.raises(OutOfRangeError):
        small_stream.slot(small_stream.horizon + 1)
    assert np.array_equal(small_stream.target(1), small_stream.targets[0])


def test_stream_constants_cover_every_slot(small_stream):
    overall = stream_constants(small_stream, [1, 5, 9])
    for t in (1, 5, 9):
        single = smoothness_constants(small_stream.slot(t), small_stream.nonsmooth.radius)
        assert overall.L >= single.L and overall.mu <= single.mu and overall.M >= single.M
    with pytest.raises(OutOfRangeError):
        stream_constants(small_stream, [])
