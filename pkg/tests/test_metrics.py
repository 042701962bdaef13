import math

import numpy as np
import pytest

from conftest import make_slot
from dpogd.core import SlotKind, bound_components, build_schedule, schedule_from_steps
from dpogd.engine import RunTrace, run_dpogd
from dpogd.exceptions import MisalignedTraceError, SeriesError
from dpogd.graph import CompleteMixing, contraction_constants
from dpogd.metrics import (
    DIAGNOSTIC_COLUMNS,
    consensus_diagnostics,
    diagnostics_frame,
    dynamic_regret,
    path_residual,
    log_grid,
    loglog_slope,
    summarize_diagnostics,
    theoretical_overlay,
)
from dpogd.problem import ProblemStream, StaticStream, solve_oracle_trace, stream_constants
from dpogd.prox import NonsmoothSpec


def frozen_trace(iterates: np.ndarray, horizon: int, play_slots=None) -> RunTrace:
    play = np.arange(1, horizon + 1) if play_slots is None else np.asarray(play_slots)
    return RunTrace(
        algorithm="fixed",
        nodes=iterates.shape[1],
        horizon=horizon,
        iterates=iterates,
        play_slots=play,
        events=(SlotKind.IDLE,) * horizon,
    )


def test_regret_vanishes_on_oracle_actions(small_stream):
    oracle = solve_oracle_trace(small_stream)
    trace = frozen_trace(np.repeat(oracle.x_star[:, None, :], 2, axis=1), small_stream.horizon)
    ledger = dynamic_regret(trace, small_stream, oracle)
    assert np.allclose(ledger.instant, 0.0, atol=1e-12)
    assert ledger.final == pytest.approx(0.0, abs=1e-10)


def test_frozen_action_accumulates_linearly():
    stream = StaticStream(make_slot([[[1.0]]], [[0.0]]), horizon=5, nonsmooth=NonsmoothSpec())
    oracle = solve_oracle_trace(stream)
    ledger = dynamic_regret(frozen_trace(np.ones((1, 1, 1)), 5, play_slots=[1]), stream, oracle)
    assert np.allclose(ledger.instant, 1.0)
    assert np.allclose(ledger.cumulative, [1, 2, 3, 4, 5])
    assert ledger.final_over_T == pytest.approx(1.0)
    frame = ledger.to_frame()
    assert list(frame.columns) == ["t", "regret_instant", "regret_cum", "regret_cum_over_T", "C_t", "C_t_over_T", "overlay"]
    assert frame["overlay"].isna().all()


def test_regret_is_never_negative(small_stream):
    oracle = solve_oracle_trace(small_stream)
    schedule = schedule_from_steps([2], small_stream.horizon)
    trace = run_dpogd(small_stream, schedule, CompleteMixing(4), alpha=0.01)
    ledger = dynamic_regret(trace, small_stream, oracle)
    assert ledger.instant.min() >= -1e-9
    assert np.all(np.diff(ledger.cumulative) >= -1e-9)
    assert np.array_equal(ledger.path, oracle.cumulative_path())


def test_misaligned_oracle(small_stream, small_spec):
    oracle = solve_oracle_trace(ProblemStream(small_spec, horizon=30, seed=3))
    trace = run_dpogd(small_stream, schedule_from_steps([2], 60), CompleteMixing(4), alpha=0.01)
    with pytest.raises(MisalignedTraceError):
        dynamic_regret(trace, small_stream, oracle)


def test_complete_graph_has_no_averaging_error(small_stream):
    schedule = schedule_from_steps([1, 2], small_stream.horizon)
    alpha = 0.01
    trace = run_dpogd(small_stream, schedule, CompleteMixing(4), alpha)
    oracle = solve_oracle_trace(small_stream)
    contraction = contraction_constants(0.25, 4, 1)
    smoothness = stream_constants(small_stream, schedule.sample_times)
    records = consensus_diagnostics(trace, small_stream, alpha, oracle, contraction, smoothness)
    assert len(records) == schedule.K
    assert max(record.e_k for record in records) <= 1e-12
    assert max(record.eps_k for record in records) <= 1e-12
    assert math.isnan(records[0].spread_residual)
    summary = summarize_diagnostics(records)
    assert summary.iterations == schedule.K
    assert summary.satisfied(tol=1e-8)
    assert list(diagnostics_frame(records).columns) == DIAGNOSTIC_COLUMNS


def test_diagnostics_without_constants(small_stream):
    schedule = schedule_from_steps([2], small_stream.horizon)
    trace = run_dpogd(small_stream, schedule, CompleteMixing(4), 0.01)
    summary = summarize_diagnostics(consensus_diagnostics(trace, small_stream, 0.01))
    assert math.isnan(summary.progress_min) and math.isnan(summary.error_min)
    assert summary.satisfied()


def test_overlay_without_path_matches_bound_components():
    schedule = schedule_from_steps([1, 2, 3], horizon=50)
    constants = contraction_constants(0.25, 4, 1)
    overlay = theoretical_overlay(schedule, constants, np.zeros(50))
    assert np.isnan(overlay[:2]).all()
    for T in (3, 10, 27, 50):
        parts = bound_components(schedule.truncate(T), log_gamma=constants.log_gamma)
        assert overlay[T - 1] == pytest.approx(parts.R_T * (1.0 + parts.E_T))


def test_overlay_rebuilds_constant_schedules():
    schedule = build_schedule("constant", {"u": 0.5}, horizon=400)
    constants = contraction_constants(0.5, 3, 2)
    path = np.linspace(0.0, 2.0, 400)
    horizons = np.array([10, 90, 400])
    overlay = theoretical_overlay(schedule, constants, path, horizons, rebuild=True)
    for value, T in zip(overlay, horizons):
        parts = bound_components(build_schedule("constant", {"u": 0.5}, int(T)), log_gamma=constants.log_gamma)
        assert value == pytest.approx(parts.R_T * (1.0 + parts.E_T + path[T - 1]))


def test_slopes():
    T = np.arange(1, 1001, dtype=float)
    assert loglog_slope(T, T**-0.5) == pytest.approx(-0.5)
    assert loglog_slope(T, np.full(T.size, 3.0)) == pytest.approx(0.0, abs=1e-12)
    assert loglog_slope(T, 2.0 * T, decades=2) == pytest.approx(1.0)


def test_slope_rejects_bad_series():
    T = np.arange(1, 1001, dtype=float)
    with pytest.raises(SeriesError):
        loglog_slope(T[:5], T[:5])
    with pytest.raises(SeriesError):
        loglog_slope(T, T - 500.0)


def test_sample_times_never_see_more_path(small_stream):
    oracle = solve_oracle_trace(small_stream)
    for steps in ([0], [3], [1, 5]):
        assert path_residual(oracle, schedule_from_steps(steps, small_stream.horizon)) >= -1e-12


def test_log_grid():
    grid = log_grid(20000, points=50)
    assert grid[0] == 3 and grid[-1] == 20000
    assert np.all(np.diff(grid) > 0)
