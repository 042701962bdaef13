import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpogd.core import (
    ScheduleKind,
    SlotKind,
    bound_components,
    build_schedule,
    floor_time,
    schedule_from_steps,
)
from dpogd.exceptions import OutOfRangeError, ScheduleInfeasibleError


def test_explicit_constant_steps():
    schedule = schedule_from_steps([5], horizon=100)
    assert schedule.K == 14
    assert schedule.sample_times == tuple(range(1, 93, 7))
    assert set(schedule.consensus_steps) == {5}
    assert schedule.last_active_slot == 92 + 5 + 1


def test_logarithmic_schedule():
    schedule = build_schedule(ScheduleKind.LOGARITHMIC, {"c": 2}, horizon=12)
    assert schedule.consensus_steps == (0, 1, 2)
    assert schedule.sample_times == (1, 3, 6)
    assert schedule.K == 3


def test_constant_power_schedule():
    schedule = build_schedule("constant", {"u": 0.5}, horizon=10_000)
    assert set(schedule.consensus_steps) == {100}
    assert schedule.K == 98


def test_explicit_tail_repeats():
    schedule = schedule_from_steps([1, 2], horizon=30)
    assert schedule.consensus_steps[:3] == (1, 2, 2)
    assert all(s == 2 for s in schedule.consensus_steps[1:])


@pytest.mark.parametrize("t, expected", [(9, 8), (14, 8), (8, 8), (1, 1), (15, 15)])
def test_floor_time(t, expected):
    schedule = schedule_from_steps([5], horizon=100)
    assert floor_time(schedule, t) == expected


def test_floor_time_before_first_sample():
    schedule = schedule_from_steps([5], horizon=100)
    with pytest.raises(OutOfRangeError):
        floor_time(schedule, 0)


def test_slot_kinds_of_one_iteration():
    schedule = schedule_from_steps([2], horizon=10)
    kinds = [schedule.slot_kind(t) for t in range(1, 9)]
    assert kinds == [
        SlotKind.GRADIENT,
        SlotKind.CONSENSUS,
        SlotKind.CONSENSUS,
        SlotKind.PROX,
        SlotKind.GRADIENT,
        SlotKind.CONSENSUS,
        SlotKind.CONSENSUS,
        SlotKind.PROX,
    ]
    assert schedule.slot_kind(10) is SlotKind.IDLE


def test_zero_consensus_steps_go_straight_to_prox():
    schedule = build_schedule(ScheduleKind.LOGARITHMIC, {"c": 2}, horizon=12)
    assert schedule.slot_kind(1) is SlotKind.GRADIENT
    assert schedule.slot_kind(2) is SlotKind.PROX


def test_bound_components_constant_steps():
    schedule = schedule_from_steps([5], horizon=100)
    parts = bound_components(schedule, 0.5)
    assert parts.K_count == 14
    assert parts.R_T == 5
    assert parts.E_T == pytest.approx(105 / 32, abs=1e-15)


def test_bound_components_increasing_steps():
    schedule = schedule_from_steps([1, 2, 3, 4], horizon=18)
    assert schedule.K == 4
    assert bound_components(schedule, 0.5).E_T == pytest.approx(1.625, abs=1e-15)


def test_bound_components_log_gamma_near_one():
    schedule = schedule_from_steps([5], horizon=100)
    parts = bound_components(schedule, log_gamma=-1e-30)
    assert parts.gamma == 1.0
    assert parts.E_T == pytest.approx(sum(range(1, 15)))


def test_bound_components_rejects_bad_gamma():
    schedule = schedule_from_steps([5], horizon=100)
    with pytest.raises(ValueError):
        bound_components(schedule, 1.0)


@pytest.mark.parametrize(
    "kind, params, horizon",
    [
        ("explicit", {"steps": [5]}, 6),
        ("explicit", {"steps": [5]}, 2),
        ("explicit", {"steps": []}, 50),
        ("explicit", {"steps": [-1]}, 50),
        ("constant", {"u": 1.5}, 50),
        ("logarithmic", {"c": 0.5}, 50),
    ],
)
def test_infeasible_schedules(kind, params, horizon):
    with pytest.raises(ScheduleInfeasibleError):
        build_schedule(kind, params, horizon)


def test_non_monotone_explicit_list():
    with pytest.raises(ScheduleInfeasibleError):
        schedule_from_steps([5, 3], horizon=50)
    schedule = build_schedule("explicit", {"steps": [5, 3]}, 50, reject_non_monotone=False)
    assert schedule.consensus_steps[:2] == (5, 3)


def test_truncate_keeps_completed_iterations():
    schedule = schedule_from_steps([5], horizon=100)
    prefix = schedule.truncate(20)
    assert prefix.sample_times == (1, 8)
    assert prefix.horizon == 20
    with pytest.raises(ScheduleInfeasibleError):
        schedule.truncate(6)


def test_schedule_frame():
    frame = schedule_from_steps([5], horizon=100).to_frame()
    assert list(frame.columns) == ["k", "t_k", "S_k"]
    assert frame["t_k"].iloc[1] == 8


@given(
    steps=st.lists(st.integers(min_value=0, max_value=12), min_size=1, max_size=6).map(sorted),
    horizon=st.integers(min_value=3, max_value=400),
)
def test_spacing_and_maximality(steps, horizon):
    try:
        schedule = schedule_from_steps(steps, horizon)
    except ScheduleInfeasibleError:
        assert steps[0] + 2 > horizon
        return
    times = schedule.sample_times
    for k in range(1, schedule.K):
        assert times[k] - times[k - 1] == schedule.S(k) + 2
    assert schedule.last_active_slot <= horizon
    following = steps[min(schedule.K, len(steps) - 1)]
    assert times[-1] + schedule.S(schedule.K) + 2 + following + 1 > horizon


@given(u=st.floats(min_value=0.05, max_value=0.6), horizon=st.integers(min_value=50, max_value=5000))
def test_constant_schedule_iteration_count(u, horizon):
    schedule = build_schedule("constant", {"u": u}, horizon)
    S = math.floor(horizon**u + 1e-9)
    assert schedule.K == (horizon - S - 2) // (S + 2) + 1
