from typing import Literal, Sequence

import numpy as np
import numpy.typing as npt
from logzero import logger

from dpogd.core import ConsensusSchedule, SlotKind
from dpogd.exceptions import ConfigurationError, DimensionMismatchError
from dpogd.graph import MixingSequence, consensus_product
from dpogd.problem import SlotStream, local_gradients
from dpogd.prox import prox_composite
from dpogd.types import RealMatrix, as_real
from dpogd.utils import StreamKey, derive_rng

from .counters import OperationCounter, consensus_cost, gradient_cost, prox_cost
from .trace import NodeState, RunTrace, guard_finite

ALGORITHM = "dpogd"


def initial_iterates(
    N: int, n: int, seed: int = 0, kind: Literal["zeros", "random"] = "zeros", scale: float = 1.0
) -> RealMatrix:
    """
    Per-node starting points x_1^i.

    Args:
        N: Number of nodes.
        n: Dimension.
        seed: Run seed (used by the random kind).
        kind: "zeros" or "random" (i.i.d. normal with std scale / sqrt(n)).
        scale: Norm scale of random starts.

    Returns:
        RealMatrix: Stack of shape (N, n).
    """
    if kind == "zeros":
        return np.zeros((N, n))
    rng = derive_rng(seed, StreamKey.INIT)
    return rng.normal(0.0, scale / np.sqrt(n), size=(N, n))


def _check_inputs(
    stream: SlotStream, schedule: ConsensusSchedule, alpha: float, x_init: npt.ArrayLike
) -> RealMatrix:
    if alpha <= 0.0:
        raise ConfigurationError(f"step size must be positive, got {alpha}")
    if schedule.horizon > stream.horizon:
        raise ConfigurationError(f"schedule horizon {schedule.horizon} exceeds the stream's {stream.horizon}")
    x = as_real(x_init)
    if x.shape != (stream.N, stream.n):
        raise DimensionMismatchError(f"x_init must have shape ({stream.N}, {stream.n}), got {x.shape}")
    guard_finite(x, stream.nonsmooth.radius, slot=1)
    return x


def _events(schedule: ConsensusSchedule) -> tuple[SlotKind, ...]:
    return tuple(schedule.slot_kind(t) for t in range(1, schedule.horizon + 1))


def run_time_indexed(
    stream: SlotStream,
    schedule: ConsensusSchedule,
    mixing: MixingSequence | None,
    alpha: float,
    x_init: npt.ArrayLike,
    counter: OperationCounter | None = None,
    algorithm: str = ALGORITHM,
) -> RunTrace:
    """
    Run DP-OGD slot by slot.

    Gradient slot t_k: z^i = x^i - alpha grad f_t^i(x^i). Consensus slot t:
    z^i = sum_j A_t^ij z^j. Prox slot: x^i = prox_{g_floor(t)}^alpha(z^i). The
    losses are queried only at the sample times.

    Args:
        stream: The problem stream.
        schedule: Consensus schedule.
        mixing: Mixing sequence (may be None only if no iteration has consensus slots).
        alpha: Step size.
        x_init: Per-node starting points, shape (N, n).
        counter: Optional operation counter.
        algorithm: Name recorded in the trace.

    Returns:
        RunTrace: x_hat_1..x_hat_{K+1}, x_hat_k played from t_k.

    Raises:
        ConfigurationError: If a consensus slot has no mixing matrix.
        DimensionMismatchError: If shapes disagree.
        DivergenceError: On non-finite or exploding iterates.
    """
    state = NodeState.start(_check_inputs(stream, schedule, alpha, x_init))
    radius = stream.nonsmooth.radius
    snapshots = [state.x.copy()]

    for t in range(1, schedule.last_active_slot + 1):
        kind = schedule.slot_kind(t)
        if kind is SlotKind.GRADIENT:
            data = stream.slot(t)
            state.z = state.x - alpha * local_gradients(data, state.x)
            if counter is not None:
                counter.add("gradient", gradient_cost(stream.N, data.d, stream.n))
        elif kind is SlotKind.CONSENSUS:
            if mixing is None:
                raise ConfigurationError(f"no mixing sequence for consensus slot {t}")
            weights = mixing.matrix(t).weights
            if weights.shape != (stream.N, stream.N):
                raise DimensionMismatchError(f"slot {t}: mixing matrix {weights.shape} for N={stream.N}")
            state.z = weights @ state.z
            if counter is not None:
                counter.add("consensus", consensus_cost(stream.N, stream.n))
        elif kind is SlotKind.PROX:
            state.y = state.z
            state.x = prox_composite(state.y, alpha, stream.nonsmooth)
            guard_finite(state.x, radius, slot=t)
            snapshots.append(state.x.copy())
            if counter is not None:
                counter.add("prox", prox_cost(stream.N, stream.n))
                counter.finish_update(algorithm)

    logger.debug(f"{algorithm}: {schedule.K} iterations over {schedule.horizon} slots (time-indexed)")
    return RunTrace(
        algorithm=algorithm,
        nodes=stream.N,
        horizon=schedule.horizon,
        iterates=np.stack(snapshots),
        play_slots=schedule.times,
        events=_events(schedule),
        schedule=schedule,
        alpha=alpha,
    )


def consensus_products(mixing: MixingSequence | None, schedule: ConsensusSchedule) -> list[RealMatrix | None]:
    """
    Q_k = A_{t_k+S(k)} ... A_{t_k+1} for every iteration.

    Args:
        mixing: Mixing sequence.
        schedule: Consensus schedule.

    Returns:
        list[RealMatrix | None]: Q_k, or None for iterations without consensus slots.

    Raises:
        ConfigurationError: If consensus is needed but no sequence is given.
    """
    products: list[RealMatrix | None] = []
    for t_k, S_k in zip(schedule.sample_times, schedule.consensus_steps):
        if S_k == 0:
            products.append(None)
            continue
        if mixing is None:
            raise ConfigurationError(f"no mixing sequence for the consensus slots after t={t_k}")
        products.append(consensus_product(mixing.window(t_k + 1, t_k + S_k + 1)))
    return products


def run_iteration_indexed(
    stream: SlotStream,
    schedule: ConsensusSchedule,
    products: Sequence[RealMatrix | None],
    alpha: float,
    x_init: npt.ArrayLike,
    algorithm: str = ALGORITHM,
) -> RunTrace:
    """
    Run DP-OGD in iteration form.

    z_k^i = x_k^i - alpha grad f_k^i(x_k^i), y_k^i = sum_j Q_k^ij z_k^j,
    x_{k+1}^i = prox_{g_k}^alpha(y_k^i).

    Args:
        stream: The problem stream, sampled at the sample times only.
        schedule: Consensus schedule.
        products: Q_1..Q_K (None means identity).
        alpha: Step size.
        x_init: Per-node starting points, shape (N, n).
        algorithm: Name recorded in the trace.

    Returns:
        RunTrace: Same layout as `run_time_indexed`.
    """
    x = _check_inputs(stream, schedule, alpha, x_init)
    if len(products) < schedule.K:
        raise ConfigurationError(f"{len(products)} consensus products for {schedule.K} iterations")
    radius = stream.nonsmooth.radius
    snapshots = [x.copy()]
    for k in range(1, schedule.K + 1):
        z = x - alpha * local_gradients(stream.slot(schedule.t(k)), x)
        Q = products[k - 1]
        if Q is not None and Q.shape != (stream.N, stream.N):
            raise DimensionMismatchError(f"Q_{k} has shape {Q.shape} for N={stream.N}")
        y = z if Q is None else Q @ z
        x = prox_composite(y, alpha, stream.nonsmooth)
        guard_finite(x, radius, slot=schedule.t(k) + schedule.S(k) + 1)
        snapshots.append(x.copy())
    return RunTrace(
        algorithm=algorithm,
        nodes=stream.N,
        horizon=schedule.horizon,
        iterates=np.stack(snapshots),
        play_slots=schedule.times,
        events=_events(schedule),
        schedule=schedule,
        alpha=alpha,
    )


def run_dpogd(
    stream: SlotStream,
    schedule: ConsensusSchedule,
    mixing: MixingSequence | None,
    alpha: float,
    x_init: npt.ArrayLike | None = None,
    *,
    form: Literal["time", "iteration"] = "time",
    counter: OperationCounter | None = None,
    algorithm: str = ALGORITHM,
) -> RunTrace:
    """
    Run DP-OGD in either form, starting from zeros by default.

    Args:
        stream: The problem stream.
        schedule: Consensus schedule.
        mixing: Mixing sequence.
        alpha: Step size.
        x_init: Starting points (default: zeros).
        form: "time" (slot machine) or "iteration" (Q_k products).
        counter: Optional operation counter (time form only).
        algorithm: Name recorded in the trace.

    Returns:
        RunTrace: The run.
    """
    if x_init is None:
        x_init = initial_iterates(stream.N, stream.n)
    if form == "iteration":
        return run_iteration_indexed(
            stream, schedule, consensus_products(mixing, schedule), alpha, x_init, algorithm=algorithm
        )
    return run_time_indexed(stream, schedule, mixing, alpha, x_init, counter=counter, algorithm=algorithm)
