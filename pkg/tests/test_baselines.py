import numpy as np
import pytest

from conftest import make_slot
from dpogd.baselines import (
    AdmmParams,
    AdmmState,
    admm_step,
    cc_admm_firing_slots,
    run_admm,
    run_cc_admm,
    run_centralized_pogd,
    run_slowed_admm,
)
from dpogd.core import SlotKind, build_schedule, schedule_from_steps
from dpogd.engine import OperationCounter, solve_cost
from dpogd.exceptions import ConfigurationError, DimensionMismatchError
from dpogd.graph import CompleteMixing, DisseminationMode, PermutationMixing
from dpogd.problem import StaticStream, oracle_optimum, sample_slot
from dpogd.prox import NonsmoothSpec


@pytest.fixture
def square_stream() -> StaticStream:
    """f(x) = x^2 in every slot."""
    return StaticStream(make_slot([[[1.0]]], [[0.0]]), horizon=3, nonsmooth=NonsmoothSpec())


@pytest.fixture
def lasso_stream() -> StaticStream:
    rng = np.random.default_rng(21)
    slot = sample_slot(rng.standard_normal(3), N=4, d=3, lam=0.05, sigma=0.3, rng=rng)
    return StaticStream(slot, horizon=1000, nonsmooth=NonsmoothSpec(sigma=0.3, radius=5.0))


def test_centralized_steps_by_hand(square_stream):
    trace = run_centralized_pogd(square_stream, alpha=0.25, x_init=[1.0])
    assert np.allclose(trace.iterates[:, 0, 0], [1.0, 0.5, 0.25, 0.125])
    assert list(trace.play_slots) == [1, 2, 3]
    assert trace.action_at(2)[0, 0] == pytest.approx(0.5)
    assert trace.algorithm == "pogd"
    assert not trace.distributed
    assert trace.update_count == 3


def test_slowed_centralized_fires_only_at_sample_times(square_stream):
    trace = run_centralized_pogd(square_stream, alpha=0.25, sample_times=[1], x_init=[1.0])
    assert trace.algorithm == "pogd-slowed"
    assert trace.update_count == 1
    assert trace.events == (SlotKind.UPDATE, SlotKind.IDLE, SlotKind.IDLE)
    assert trace.action_at(3)[0, 0] == pytest.approx(0.5)


def test_slowed_centralized_accepts_a_schedule(lasso_stream):
    schedule = build_schedule("constant", {"u": 0.5}, horizon=lasso_stream.horizon)
    trace = run_centralized_pogd(lasso_stream, alpha=0.01, sample_times=schedule)
    assert trace.update_count == schedule.K
    assert trace.schedule == schedule


@pytest.mark.parametrize("times", [[2, 2], [0], [4], [3, 1]])
def test_bad_sample_times(square_stream, times):
    with pytest.raises(ConfigurationError):
        run_centralized_pogd(square_stream, alpha=0.25, sample_times=times)


def test_centralized_counts(square_stream):
    counter = OperationCounter()
    run_centralized_pogd(square_stream, alpha=0.25, counter=counter)
    assert counter.updates["pogd"] == 3
    assert counter.per_update("pogd") == pytest.approx(2.0 + 5.0)


def test_admm_step_by_hand():
    slot = make_slot([[[1.0]]], [[0.0]])
    state = AdmmState.start(1, AdmmParams(varrho=1.0, varpi=0.0), x_init=[1.0])
    state = admm_step(state, slot, NonsmoothSpec())
    assert state.x[0] == pytest.approx(1.0 / 3.0)
    assert state.z[0] == pytest.approx(1.0 / 3.0)
    assert state.v[0] == pytest.approx(0.0)


def test_admm_optimum_is_a_fixed_point():
    slot = make_slot([[[1.0]]], [[1.0]])
    state = AdmmState.start(1, AdmmParams(), x_init=[1.0])
    for _ in range(3):
        state = admm_step(state, slot, NonsmoothSpec())
        assert np.allclose([state.x, state.z, state.v], [[1.0], [1.0], [0.0]])


def test_admm_start_checks_shape():
    with pytest.raises(DimensionMismatchError):
        AdmmState.start(3, AdmmParams(), x_init=[1.0, 2.0])


def test_admm_converges_on_a_static_stream(lasso_stream):
    trace = run_admm(lasso_stream, AdmmParams())
    x_star = oracle_optimum(lasso_stream.slot(1), lasso_stream.nonsmooth).x_star
    assert trace.update_count == lasso_stream.horizon
    assert np.allclose(trace.iterates[-1, 0], x_star, atol=1e-6)


def test_admm_counts(lasso_stream):
    counter = OperationCounter()
    schedule = schedule_from_steps([8], horizon=50)
    run_slowed_admm(StaticStream(lasso_stream.slot(1), 50, lasso_stream.nonsmooth), schedule, AdmmParams(), counter=counter)
    assert counter.updates["admm-slowed"] == schedule.K
    assert counter.per_update("admm-slowed", "solve") == pytest.approx(solve_cost(3))


def test_slowed_admm_updates_once_per_iteration(lasso_stream):
    schedule = build_schedule("logarithmic", {"c": 3.0}, horizon=lasso_stream.horizon)
    trace = run_slowed_admm(lasso_stream, schedule, AdmmParams())
    assert trace.update_count == schedule.K
    fired = [t for t, kind in enumerate(trace.events, start=1) if kind is SlotKind.UPDATE]
    assert fired == list(schedule.sample_times)


def test_cc_admm_on_complete_graph_fires_every_slot():
    assert list(cc_admm_firing_slots(CompleteMixing(4), "sh", horizon=10)) == list(range(1, 11))
    assert list(cc_admm_firing_slots(CompleteMixing(4), DisseminationMode.MULTI_HOP, horizon=10)) == list(range(1, 11))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_multi_hop_fires_at_least_as_often(seed):
    mixing = PermutationMixing(6, 2, seed=seed)
    single = list(cc_admm_firing_slots(mixing, "sh", horizon=300))
    multi = list(cc_admm_firing_slots(mixing, "mh", horizon=300))
    assert single[0] == multi[0] == 1
    assert len(multi) >= len(single)
    assert all(m <= s for m, s in zip(multi, single))


def test_cc_admm_trace(lasso_stream):
    stream = StaticStream(lasso_stream.slot(1), 40, lasso_stream.nonsmooth)
    mixing = PermutationMixing(4, 3, seed=2)
    trace = run_cc_admm(stream, mixing, "mh", AdmmParams())
    fired = [t for t, kind in enumerate(trace.events, start=1) if kind is SlotKind.UPDATE]
    assert trace.algorithm == "cc-admm-mh"
    assert fired == list(cc_admm_firing_slots(mixing, "mh", horizon=40))
