from typing import Iterable

import numpy as np
import numpy.typing as npt
from logzero import logger

from dpogd.core import ConsensusSchedule, SlotKind
from dpogd.engine import OperationCounter, RunTrace, guard_finite, prox_cost
from dpogd.exceptions import ConfigurationError, DimensionMismatchError
from dpogd.problem import SlotStream, average_gradient
from dpogd.prox import prox_composite
from dpogd.types import RealVector, as_real


def centralized_trace(
    algorithm: str,
    stream: SlotStream,
    firing_slots: list[int],
    snapshots: list[RealVector],
    schedule: ConsensusSchedule | None = None,
    alpha: float | None = None,
) -> RunTrace:
    """
    Wrap the snapshots of a centralized run fired at `firing_slots`.

    The update fired at slot f uses slot f's data and is played from f + 1.
    """
    T = stream.horizon
    fired = set(firing_slots)
    play = [1] + [f + 1 for f in firing_slots if f + 1 <= T]
    return RunTrace(
        algorithm=algorithm,
        nodes=1,
        horizon=T,
        iterates=np.stack(snapshots)[:, None, :],
        play_slots=np.asarray(play, dtype=np.int64),
        events=tuple(SlotKind.UPDATE if t in fired else SlotKind.IDLE for t in range(1, T + 1)),
        schedule=schedule,
        alpha=alpha,
        distributed=False,
    )


def _firing_slots(stream: SlotStream, sample_times: Iterable[int] | None) -> list[int]:
    if sample_times is None:
        return list(range(1, stream.horizon + 1))
    slots = [int(t) for t in sample_times]
    if any(not 1 <= t <= stream.horizon for t in slots) or any(b <= a for a, b in zip(slots, slots[1:])):
        raise ConfigurationError("sample times must be increasing slots within the horizon")
    return slots


def run_centralized_pogd(
    stream: SlotStream,
    alpha: float,
    sample_times: Iterable[int] | ConsensusSchedule | None = None,
    x_init: npt.ArrayLike | None = None,
    counter: OperationCounter | None = None,
    algorithm: str | None = None,
) -> RunTrace:
    """
    Centralized proximal OGD: x <- prox_{g_t}^alpha(x - alpha grad f_t(x)).

    Args:
        stream: The problem stream; grad f_t is the exact network-average gradient.
        alpha: Step size.
        sample_times: Slots at which updates fire (a schedule, a list, or None
            for every slot); the iterate is frozen in between.
        x_init: Starting point (default: zeros).
        counter: Optional operation counter.
        algorithm: Name recorded in the trace (default: "pogd" or "pogd-slowed").

    Returns:
        RunTrace: A single-node trace.

    Raises:
        DivergenceError: On non-finite or exploding iterates.
    """
    if alpha <= 0.0:
        raise ConfigurationError(f"step size must be positive, got {alpha}")
    schedule = sample_times if isinstance(sample_times, ConsensusSchedule) else None
    times = schedule.sample_times if schedule is not None else sample_times
    algorithm = algorithm or ("pogd" if times is None else "pogd-slowed")
    firing = _firing_slots(stream, times)
    x = np.zeros(stream.n) if x_init is None else as_real(x_init).reshape(-1).copy()
    if x.shape != (stream.n,):
        raise DimensionMismatchError(f"x_init must have {stream.n} entries, got {x.size}")

    snapshots = [x.copy()]
    for f in firing:
        data = stream.slot(f)
        x = prox_composite(x - alpha * average_gradient(data, x), alpha, stream.nonsmooth)
        guard_finite(x, stream.nonsmooth.radius, slot=f)
        snapshots.append(x.copy())
        if counter is not None:
            counter.add("gradient", 2.0 * stream.n**2)
            counter.add("prox", prox_cost(1, stream.n))
            counter.finish_update(algorithm)
    logger.debug(f"{algorithm}: {len(firing)} updates over {stream.horizon} slots")
    return centralized_trace(algorithm, stream, firing, snapshots, schedule=schedule, alpha=alpha)
