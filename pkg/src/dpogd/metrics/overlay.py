import math

import numpy as np
import numpy.typing as npt

from dpogd.core import ConsensusSchedule, ScheduleKind, bound_components, build_schedule
from dpogd.exceptions import ScheduleInfeasibleError, SeriesError
from dpogd.graph import ContractionConstants
from dpogd.problem import OracleTrace, subsampled_path_length


def theoretical_overlay(
    schedule: ConsensusSchedule,
    constants: ContractionConstants,
    path: npt.ArrayLike,
    horizons: npt.ArrayLike | None = None,
    rebuild: bool = False,
) -> np.ndarray:
    """
    Unnormalized regret bound R_T (1 + E_T + C_T) for every prefix horizon.

    By default the run's schedule is truncated to each horizon. With
    `rebuild`, constant and logarithmic schedules are rebuilt for every
    horizon, so that constant schedules follow S = floor(T^u) of that horizon.

    Args:
        schedule: The run's consensus schedule.
        constants: Contraction constants (only log_gamma is used).
        path: Cumulative path length C_t for t = 1..T.
        horizons: Horizons to evaluate (default: every slot 1..T).
        rebuild: Rebuild the schedule per horizon instead of truncating.

    Returns:
        np.ndarray: The overlay per horizon, NaN before the first iteration completes.
    """
    path = np.asarray(path, dtype=np.float64)
    if horizons is None:
        horizons = np.arange(1, path.size + 1)
    horizons = np.asarray(horizons, dtype=np.int64)
    C = path[horizons - 1]

    if rebuild and schedule.kind is not ScheduleKind.EXPLICIT:
        values = np.full(horizons.size, np.nan)
        for index, T in enumerate(horizons):
            try:
                prefix = build_schedule(schedule.kind, schedule.params, int(T))
            except ScheduleInfeasibleError:
                continue
            parts = bound_components(prefix, log_gamma=constants.log_gamma)
            values[index] = parts.R_T * (1.0 + parts.E_T + C[index])
        return values

    k = np.arange(1, schedule.K + 1, dtype=np.float64)
    E_prefix = np.cumsum(np.exp(schedule.steps * constants.log_gamma) * k)
    ends = schedule.times + schedule.steps + 1
    completed = np.searchsorted(ends, horizons, side="right")
    values = np.full(horizons.size, np.nan)
    ready = completed > 0
    last = completed[ready] - 1
    values[ready] = schedule.steps[last] * (1.0 + E_prefix[last] + C[ready])
    return values


def loglog_slope(
    horizons: npt.ArrayLike,
    values: npt.ArrayLike,
    decades: float = 1.0,
    min_points: int = 10,
) -> float:
    """
    Least-squares slope of log(value) against log(T) over the last decades.

    Args:
        horizons: Horizons T (positive).
        values: Series values (positive).
        decades: Width of the window ending at the largest horizon (default: one decade).
        min_points: Minimum number of points inside the window.

    Returns:
        float: The fitted slope.

    Raises:
        SeriesError: If the window holds too few points or non-positive values.
    """
    T = np.asarray(horizons, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    window = T >= T.max() / 10.0**decades
    T, y = T[window], y[window]
    if T.size < min_points:
        raise SeriesError(f"slope window holds {T.size} points, need {min_points}")
    if np.any(y <= 0.0) or np.any(T <= 0.0) or not np.all(np.isfinite(y)):
        raise SeriesError("log-log slope needs positive finite values")
    slope, _ = np.polyfit(np.log(T), np.log(y), 1)
    return float(slope)


def path_residual(oracle: OracleTrace, schedule: ConsensusSchedule) -> float:
    """C_T minus the path length observed at the sample times (non-negative by the triangle inequality)."""
    return oracle.path_length - subsampled_path_length(oracle, schedule.times)


def log_grid(horizon: int, points: int = 200, start: int = 3) -> np.ndarray:
    """Roughly log-spaced distinct integer horizons in [start, horizon]."""
    grid = np.unique(np.round(np.logspace(math.log10(start), math.log10(horizon), points)).astype(np.int64))
    return grid[(grid >= start) & (grid <= horizon)]
