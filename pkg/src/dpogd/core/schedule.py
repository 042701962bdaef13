import math
from enum import Enum
from typing import Any, Sequence

import numpy as np
import pandas as pd
from logzero import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dpogd.exceptions import OutOfRangeError, ScheduleInfeasibleError

_FLOOR_SLACK = 1e-9


class ScheduleKind(str, Enum):
    """Families of consensus-step sequences S(k)."""

    CONSTANT = "constant"  # S(k) = floor(T^u)
    LOGARITHMIC = "logarithmic"  # S(k) = floor(c ln k)
    EXPLICIT = "explicit"  # S(k) given as a list


class SlotKind(Enum):
    """The update performed in a time slot."""

    GRADIENT = "gradient"
    CONSENSUS = "consensus"
    PROX = "prox"
    UPDATE = "update"  # one centralized step
    IDLE = "idle"


class ConsensusSchedule(BaseModel):
    """
    The map k -> S(k) together with the sample times t_k.

    Iteration k starts at t_k, performs the gradient step in slot t_k, S(k)
    consensus steps in slots t_k + 1 ... t_k + S(k) and the prox step in slot
    t_k + S(k) + 1, so that t_{k+1} = t_k + S(k) + 2.
    """

    model_config = ConfigDict(frozen=True)

    kind: ScheduleKind
    params: dict[str, Any] = Field(default_factory=dict)
    horizon: int = Field(ge=3)
    sample_times: tuple[int, ...]
    consensus_steps: tuple[int, ...]

    @model_validator(mode="after")
    def _check_spacing(self) -> "ConsensusSchedule":
        if not self.sample_times or len(self.sample_times) != len(self.consensus_steps):
            raise ValueError("sample_times and consensus_steps must be non-empty and aligned")
        if self.sample_times[0] != 1:
            raise ValueError("the first sample time must be slot 1")
        for k in range(len(self.sample_times) - 1):
            if self.sample_times[k + 1] - self.sample_times[k] != self.consensus_steps[k] + 2:
                raise ValueError(f"sample times violate t_(k+1) = t_k + S(k) + 2 at k={k + 1}")
        if self.last_active_slot > self.horizon:
            raise ValueError("the last iteration does not complete within the horizon")
        return self

    @property
    def K(self) -> int:
        """Number of iterations that fit in the horizon (S_T)."""
        return len(self.sample_times)

    @property
    def last_active_slot(self) -> int:
        """Slot of the final prox step, t_K + S(K) + 1."""
        return self.sample_times[-1] + self.consensus_steps[-1] + 1

    @property
    def times(self) -> np.ndarray:
        """Sample times as an integer array."""
        return np.asarray(self.sample_times, dtype=np.int64)

    @property
    def steps(self) -> np.ndarray:
        """Consensus steps as an integer array."""
        return np.asarray(self.consensus_steps, dtype=np.int64)

    def S(self, k: int) -> int:
        """Consensus steps of iteration k (1-based)."""
        return self.consensus_steps[k - 1]

    def t(self, k: int) -> int:
        """Sample time of iteration k (1-based)."""
        return self.sample_times[k - 1]

    def iteration_of(self, t: int) -> int:
        """
        Return the iteration k whose sample time is floor_time(t).

        Args:
            t: Slot index, t >= t_1.

        Returns:
            int: The 1-based iteration index.

        Raises:
            OutOfRangeError: If t precedes the first sample time.
        """
        if t < self.sample_times[0]:
            raise OutOfRangeError(f"slot {t} precedes the first sample time {self.sample_times[0]}")
        return int(np.searchsorted(self.times, t, side="right"))

    def slot_kind(self, t: int) -> SlotKind:
        """
        Classify slot t as a gradient, consensus, prox or idle slot.

        Args:
            t: Slot index, t >= t_1.

        Returns:
            SlotKind: The update performed at slot t.
        """
        k = self.iteration_of(t)
        offset = t - self.t(k)
        if offset == 0:
            return SlotKind.GRADIENT
        if offset <= self.S(k):
            return SlotKind.CONSENSUS
        if offset == self.S(k) + 1:
            return SlotKind.PROX
        return SlotKind.IDLE

    def to_frame(self) -> pd.DataFrame:
        """Return the (k, t_k, S_k) table written next to run outputs."""
        return pd.DataFrame(
            {
                "k": np.arange(1, self.K + 1),
                "t_k": self.times,
                "S_k": self.steps,
            }
        )

    def truncate(self, horizon: int) -> "ConsensusSchedule":
        """
        Return the prefix of this schedule that completes within a shorter horizon.

        Args:
            horizon: The new horizon, at least the span of the first iteration.

        Returns:
            ConsensusSchedule: The schedule restricted to iterations ending by `horizon`.

        Raises:
            ScheduleInfeasibleError: If not even the first iteration fits.
        """
        ends = self.times + self.steps + 1
        count = int(np.searchsorted(ends, horizon, side="right"))
        if count == 0:
            raise ScheduleInfeasibleError(f"horizon {horizon} cannot hold one iteration")
        return ConsensusSchedule(
            kind=self.kind,
            params=self.params,
            horizon=horizon,
            sample_times=self.sample_times[:count],
            consensus_steps=self.consensus_steps[:count],
        )


class BoundComponents(BaseModel):
    """Ingredients of the regret bound: S_T, R_T = S(S_T) and E_T = sum gamma^S(k) k."""

    model_config = ConfigDict(frozen=True)

    K_count: int = Field(ge=1)
    R_T: int = Field(ge=0)
    E_T: float = Field(ge=0.0)
    gamma: float = Field(gt=0.0, le=1.0)


def _floor(value: float) -> int:
    return math.floor(value + _FLOOR_SLACK)


def _step_function(
    kind: ScheduleKind, params: dict[str, Any], horizon: int, reject_non_monotone: bool
):
    if kind is ScheduleKind.CONSTANT:
        u = float(params.get("u", 0.0))
        if not 0.0 < u < 1.0:
            raise ScheduleInfeasibleError(f"constant schedule requires 0 < u < 1, got u={u}")
        steps = _floor(horizon**u)
        return lambda k: steps

    if kind is ScheduleKind.LOGARITHMIC:
        c = float(params.get("c", 0.0))
        if c <= 1.0:
            raise ScheduleInfeasibleError(f"logarithmic schedule requires c > 1, got c={c}")
        return lambda k: _floor(c * math.log(k))

    listed = [int(s) for s in params.get("steps", [])]
    if not listed or min(listed) < 0:
        raise ScheduleInfeasibleError("explicit schedule requires a non-empty list of S(k) >= 0")
    if any(b < a for a, b in zip(listed, listed[1:])):
        message = f"explicit schedule {listed} is not non-decreasing"
        if reject_non_monotone:
            raise ScheduleInfeasibleError(message)
        logger.warning(message)
    return lambda k: listed[min(k, len(listed)) - 1]


def build_schedule(
    kind: ScheduleKind | str,
    params: dict[str, Any],
    horizon: int,
    *,
    reject_non_monotone: bool = True,
) -> ConsensusSchedule:
    """
    Build the consensus schedule with the maximal number of iterations fitting in T.

    Args:
        kind: Schedule family ("constant", "logarithmic" or "explicit").
        params: {"u": float} for constant, {"c": float} for logarithmic,
            {"steps": [int, ...]} for explicit (the last entry repeats).
        horizon: Number of time slots T (T >= 3).
        reject_non_monotone: Reject explicit lists that decrease instead of
            only warning (default: True).

    Returns:
        ConsensusSchedule: The schedule with t_1 = 1 and t_{k+1} = t_k + S(k) + 2.

    Raises:
        ScheduleInfeasibleError: If parameters are invalid or T < S(1) + 2.
    """
    kind = ScheduleKind(kind)
    if horizon < 3:
        raise ScheduleInfeasibleError(f"horizon must be at least 3 slots, got {horizon}")
    step = _step_function(kind, params, horizon, reject_non_monotone)

    times: list[int] = []
    steps: list[int] = []
    t, k = 1, 1
    while t + step(k) + 1 <= horizon:
        times.append(t)
        steps.append(step(k))
        t += step(k) + 2
        k += 1
    if not times:
        raise ScheduleInfeasibleError(
            f"horizon {horizon} is too small for one iteration spanning {step(1) + 2} slots"
        )
    logger.debug(f"Built {kind.value} schedule: K={len(times)}, S(K)={steps[-1]}, T={horizon}")
    return ConsensusSchedule(
        kind=kind,
        params=dict(params),
        horizon=horizon,
        sample_times=tuple(times),
        consensus_steps=tuple(steps),
    )


def schedule_from_steps(steps: Sequence[int], horizon: int) -> ConsensusSchedule:
    """Build an explicit schedule from a list of S(k) values (the last one repeats)."""
    return build_schedule(ScheduleKind.EXPLICIT, {"steps": list(steps)}, horizon)


def floor_time(schedule: ConsensusSchedule, t: int) -> int:
    """
    Return the largest sample time t_k that does not exceed t.

    Args:
        schedule: The consensus schedule.
        t: Slot index.

    Returns:
        int: floor_time(t) = max{t_k : t_k <= t}.

    Raises:
        OutOfRangeError: If t < t_1.
    """
    return schedule.t(schedule.iteration_of(t))


def bound_components(
    schedule: ConsensusSchedule,
    gamma: float | None = None,
    *,
    log_gamma: float | None = None,
) -> BoundComponents:
    """
    Compute S_T, R_T and E_T for a schedule.

    Args:
        schedule: The consensus schedule.
        gamma: Contraction factor in (0, 1).
        log_gamma: ln(gamma); preferred when gamma rounds to 1 in float64.

    Returns:
        BoundComponents: K_count = K, R_T = S(K), E_T = sum_k gamma^S(k) k.

    Raises:
        ValueError: If neither a valid gamma nor a negative log_gamma is given.
    """
    if log_gamma is None:
        if gamma is None or not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        log_gamma = math.log(gamma)
    if log_gamma >= 0.0:
        raise ValueError(f"log_gamma must be negative, got {log_gamma}")
    k = np.arange(1, schedule.K + 1, dtype=np.float64)
    e_total = float(np.sum(np.exp(schedule.steps * log_gamma) * k))
    return BoundComponents(
        K_count=schedule.K,
        R_T=schedule.consensus_steps[-1],
        E_T=e_total,
        gamma=math.exp(log_gamma),
    )
