import math

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dpogd.core import ConsensusSchedule, SlotKind
from dpogd.exceptions import DimensionMismatchError, DivergenceError
from dpogd.types import RealMatrix

UpdateKind = SlotKind

DIVERGENCE_FACTOR = 1e6
"""Iterates with norm above DIVERGENCE_FACTOR * R abort the run."""


class NodeState(BaseModel):
    """Stacked per-node buffers: x (decision), z (pre-consensus), y (post-consensus)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: np.ndarray
    z: np.ndarray
    y: np.ndarray

    @classmethod
    def start(cls, x_init: RealMatrix) -> "NodeState":
        x = np.array(x_init, dtype=np.float64)
        return cls(x=x, z=x.copy(), y=x.copy())


class RunTrace(BaseModel):
    """
    Iterate snapshots of one run together with the slots they are played in.

    Row j of `iterates` is the action of every node from slot `play_slots[j]`
    until the next play slot. Rows beyond `len(play_slots)` were computed but
    never played (the final prox output of the last iteration, for instance).

    Attributes:
        algorithm (str): Algorithm name.
        nodes (int): N for distributed runs, 1 for centralized ones.
        horizon (int): Number of slots T.
        iterates (np.ndarray): Snapshots, shape (m, nodes, n).
        play_slots (np.ndarray): Slots from which each snapshot is played, play_slots[0] = 1.
        events (tuple[SlotKind, ...]): The update fired in each slot 1..T.
        schedule (ConsensusSchedule | None): Sample times of DP-OGD and slowed runs.
        alpha (float | None): Step size, when the algorithm has one.
        distributed (bool): Per-node actions (False for centralized baselines).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    algorithm: str
    nodes: int = Field(ge=1)
    horizon: int = Field(ge=1)
    iterates: np.ndarray
    play_slots: np.ndarray
    events: tuple[SlotKind, ...]
    schedule: ConsensusSchedule | None = None
    alpha: float | None = None
    distributed: bool = True

    @model_validator(mode="after")
    def _check_alignment(self) -> "RunTrace":
        if self.iterates.ndim != 3 or self.iterates.shape[1] != self.nodes:
            raise DimensionMismatchError(f"iterates must have shape (m, {self.nodes}, n), got {self.iterates.shape}")
        if self.play_slots.size == 0 or self.play_slots[0] != 1:
            raise DimensionMismatchError("the first snapshot must be played from slot 1")
        if self.play_slots.size > self.iterates.shape[0] or np.any(np.diff(self.play_slots) <= 0):
            raise DimensionMismatchError("play slots must be increasing and backed by snapshots")
        if len(self.events) != self.horizon:
            raise DimensionMismatchError(f"expected {self.horizon} events, got {len(self.events)}")
        return self

    @property
    def actions(self) -> np.ndarray:
        """Played snapshots, shape (len(play_slots), nodes, n)."""
        return self.iterates[: self.play_slots.size]

    @property
    def x_bar(self) -> np.ndarray:
        """Network average of every snapshot, shape (m, n)."""
        return self.iterates.mean(axis=1)

    @property
    def update_count(self) -> int:
        """Number of slots that fired a prox or centralized update."""
        return sum(kind in (SlotKind.PROX, SlotKind.UPDATE) for kind in self.events)

    def action_index(self, t: int | np.ndarray) -> int | np.ndarray:
        """Index of the snapshot played at slot t (vectorized)."""
        return np.searchsorted(self.play_slots, t, side="right") - 1

    def action_at(self, t: int) -> RealMatrix:
        """Per-node actions x_t^i at slot t, shape (nodes, n)."""
        return self.iterates[int(self.action_index(t))]

    def to_frame(self, x_star: np.ndarray | None = None, include_x: bool = False) -> pd.DataFrame:
        """
        Long table with one row per (slot, node).

        Args:
            x_star: Oracle minimizers, shape (T, n), for the distance column.
            include_x: Append the action coordinates x_0..x_{n-1}.

        Returns:
            pd.DataFrame: Columns t, k, node, update_kind, distance_to_oracle[, x_*].
        """
        slots = np.arange(1, self.horizon + 1)
        index = self.action_index(slots)
        actions = self.iterates[index]
        if self.schedule is not None:
            k = np.searchsorted(self.schedule.times, slots, side="right")
        else:
            k = index
        node_labels = list(range(self.nodes)) if self.distributed else ["central"]
        frame = pd.DataFrame(
            {
                "t": np.repeat(slots, self.nodes),
                "k": np.repeat(k, self.nodes),
                "node": np.tile(np.asarray(node_labels, dtype=object), self.horizon),
                "update_kind": np.repeat([kind.value for kind in self.events], self.nodes),
            }
        )
        if x_star is not None:
            gaps = np.linalg.norm(actions - x_star[:, None, :], axis=2)
            frame["distance_to_oracle"] = gaps.reshape(-1)
        else:
            frame["distance_to_oracle"] = math.nan
        if include_x:
            flat = actions.reshape(-1, actions.shape[2])
            for j in range(flat.shape[1]):
                frame[f"x_{j}"] = flat[:, j]
        return frame


def guard_finite(x: RealMatrix, radius: float, slot: int) -> None:
    """
    Abort on NaN/Inf entries or norms beyond DIVERGENCE_FACTOR * radius.

    Raises:
        DivergenceError: With the offending slot.
    """
    if not np.all(np.isfinite(x)):
        raise DivergenceError("non-finite iterate", slot=slot)
    if math.isfinite(radius):
        largest = float(np.max(np.linalg.norm(np.atleast_2d(x), axis=-1)))
        if largest > DIVERGENCE_FACTOR * radius:
            raise DivergenceError(f"iterate norm {largest:.3e} exceeds {DIVERGENCE_FACTOR:.0e} R", slot=slot)
