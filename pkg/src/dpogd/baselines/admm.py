from typing import Iterable, Iterator

import numpy as np
import numpy.typing as npt
import scipy.linalg
from logzero import logger
from pydantic import BaseModel, ConfigDict, Field

from dpogd.core import ConsensusSchedule
from dpogd.engine import OperationCounter, RunTrace, guard_finite, prox_cost, solve_cost
from dpogd.exceptions import DimensionMismatchError, DivergenceError, InsufficientHorizonError
from dpogd.graph import DisseminationMode, MixingSequence, dissemination_delay
from dpogd.problem import SlotData, SlotStream
from dpogd.prox import NonsmoothSpec, prox_composite
from dpogd.types import as_real

from .pogd import centralized_trace


class AdmmParams(BaseModel):
    """Penalty varrho and proximal damping varpi of the dynamic ADMM."""

    model_config = ConfigDict(frozen=True)

    varrho: float = Field(default=1.0, gt=0.0)
    varpi: float = Field(default=0.1, ge=0.0)


class AdmmState(BaseModel):
    """Primal x, split copy z and dual v of the dynamic ADMM."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray
    z: np.ndarray
    v: np.ndarray
    varrho: float = Field(gt=0.0)
    varpi: float = Field(ge=0.0)

    @classmethod
    def start(cls, n: int, params: AdmmParams, x_init: npt.ArrayLike | None = None) -> "AdmmState":
        """Start at (x, x, 0) with x = x_init or zeros."""
        x = np.zeros(n) if x_init is None else as_real(x_init).reshape(-1).copy()
        if x.shape != (n,):
            raise DimensionMismatchError(f"x_init must have {n} entries, got {x.size}")
        return cls(x=x, z=x.copy(), v=np.zeros(n), varrho=params.varrho, varpi=params.varpi)


def admm_step(
    state: AdmmState,
    slot: SlotData,
    spec: NonsmoothSpec,
    counter: OperationCounter | None = None,
) -> AdmmState:
    """
    One damped ADMM update on the slot's network-average loss.

    x+ solves (2 gram + 2 lam I + (varrho + varpi) I) x = 2 moment - v + varrho z + varpi x
    by Cholesky; z+ = prox of g with step 1/(varrho + varpi) at
    (varrho x+ + v + varpi z)/(varrho + varpi); v+ = v + varrho (x+ - z+).

    Args:
        state: Current state.
        slot: Slot data defining f_t.
        spec: The nonsmooth term g.
        counter: Optional operation counter (charged for the linear solve).

    Returns:
        AdmmState: The updated state.

    Raises:
        DivergenceError: If the x-update system is not positive definite.
    """
    rho, damping = state.varrho, state.varpi
    system = slot.hessian + (rho + damping) * np.eye(slot.n)
    rhs = 2.0 * slot.moment - state.v + rho * state.z + damping * state.x
    try:
        x = scipy.linalg.cho_solve(scipy.linalg.cho_factor(system), rhs)
    except np.linalg.LinAlgError as exc:
        raise DivergenceError(f"x-update system is not positive definite: {exc}") from exc
    z = prox_composite((rho * x + state.v + damping * state.z) / (rho + damping), 1.0 / (rho + damping), spec)
    v = state.v + rho * (x - z)
    if counter is not None:
        counter.add("solve", solve_cost(slot.n))
        counter.add("prox", prox_cost(1, slot.n))
    return AdmmState(x=x, z=z, v=v, varrho=rho, varpi=damping)


def _run_admm_at(
    stream: SlotStream,
    firing: Iterable[int],
    params: AdmmParams,
    algorithm: str,
    x_init: npt.ArrayLike | None,
    counter: OperationCounter | None,
    schedule: ConsensusSchedule | None = None,
) -> RunTrace:
    state = AdmmState.start(stream.n, params, x_init)
    snapshots = [state.z.copy()]
    fired: list[int] = []
    for f in firing:
        state = admm_step(state, stream.slot(f), stream.nonsmooth, counter)
        guard_finite(np.stack([state.x, state.z, state.v]), stream.nonsmooth.radius, slot=f)
        snapshots.append(state.z.copy())
        fired.append(f)
        if counter is not None:
            counter.finish_update(algorithm)
    logger.debug(f"{algorithm}: {len(fired)} updates over {stream.horizon} slots")
    return centralized_trace(algorithm, stream, fired, snapshots, schedule=schedule)


def run_admm(
    stream: SlotStream,
    params: AdmmParams,
    x_init: npt.ArrayLike | None = None,
    counter: OperationCounter | None = None,
) -> RunTrace:
    """Dynamic ADMM with one update in every slot; z is played."""
    return _run_admm_at(stream, range(1, stream.horizon + 1), params, "admm", x_init, counter)


def run_slowed_admm(
    stream: SlotStream,
    schedule: ConsensusSchedule,
    params: AdmmParams,
    x_init: npt.ArrayLike | None = None,
    counter: OperationCounter | None = None,
) -> RunTrace:
    """
    Dynamic ADMM restricted to one update per sample time t_k.

    Args:
        stream: The problem stream.
        schedule: Consensus schedule providing the sample times.
        params: ADMM parameters.
        x_init: Starting point (default: zeros).
        counter: Optional operation counter.

    Returns:
        RunTrace: Exactly K updates, frozen in between.
    """
    return _run_admm_at(
        stream, schedule.sample_times, params, "admm-slowed", x_init, counter, schedule=schedule
    )


def cc_admm_firing_slots(
    mixing: MixingSequence, mode: DisseminationMode | str, horizon: int, start: int = 1
) -> Iterator[int]:
    """
    Firing slots of communication-constrained ADMM.

    The first update fires at `start`; after an update at slot tau the next
    fires at tau + dissemination_delay(A_tau, A_tau+1, ...). Firing stops when
    dissemination cannot complete within the horizon.

    Args:
        mixing: Mixing sequence.
        mode: "sh" (direct pair coverage) or "mh" (time-respecting reachability).
        horizon: Last slot T.
        start: First firing slot (default: 1).

    Yields:
        int: Firing slots in increasing order.
    """
    tau = start
    while tau <= horizon:
        yield tau
        try:
            delay = dissemination_delay((mixing.matrix(s) for s in range(tau, horizon + 1)), mode)
        except InsufficientHorizonError:
            label = DisseminationMode(mode).value
            logger.debug(f"cc-admm-{label}: dissemination from slot {tau} never completes; updates stop")
            return
        tau += delay


def run_cc_admm(
    stream: SlotStream,
    mixing: MixingSequence,
    mode: DisseminationMode | str,
    params: AdmmParams,
    x_init: npt.ArrayLike | None = None,
    counter: OperationCounter | None = None,
) -> RunTrace:
    """
    Communication-constrained ADMM: each update waits for full dissemination.

    Each fired update is one `admm_step` on the data of the firing slot.

    Args:
        stream: The problem stream.
        mixing: Mixing sequence driving the delays.
        mode: "sh" or "mh".
        params: ADMM parameters.
        x_init: Starting point (default: zeros).
        counter: Optional operation counter.

    Returns:
        RunTrace: Single-node trace named "cc-admm-sh" or "cc-admm-mh".
    """
    mode = DisseminationMode(mode)
    firing = cc_admm_firing_slots(mixing, mode, stream.horizon)
    return _run_admm_at(stream, firing, params, f"cc-admm-{mode.value}", x_init, counter)
