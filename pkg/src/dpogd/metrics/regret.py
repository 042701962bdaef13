import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from dpogd.engine import RunTrace
from dpogd.exceptions import MisalignedTraceError
from dpogd.problem import OracleTrace, SlotStream, objective


class RegretLedger(BaseModel):
    """
    Per-slot dynamic regret and path length of one run.

    Attributes:
        instant (np.ndarray): Instantaneous regret of slots 1..T.
        cumulative (np.ndarray): Reg_t for t = 1..T.
        path (np.ndarray): C_t for t = 1..T.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    instant: np.ndarray
    cumulative: np.ndarray
    path: np.ndarray

    @property
    def horizon(self) -> int:
        return self.instant.size

    @property
    def final(self) -> float:
        """Reg_T."""
        return float(self.cumulative[-1])

    @property
    def final_over_T(self) -> float:
        """Reg_T / T."""
        return self.final / self.horizon

    def to_frame(self, overlay: np.ndarray | None = None) -> pd.DataFrame:
        """Metrics table with columns t, regret_instant, regret_cum, regret_cum_over_T, C_t, C_t_over_T, overlay."""
        t = np.arange(1, self.horizon + 1)
        return pd.DataFrame(
            {
                "t": t,
                "regret_instant": self.instant,
                "regret_cum": self.cumulative,
                "regret_cum_over_T": self.cumulative / t,
                "C_t": self.path,
                "C_t_over_T": self.path / t,
                "overlay": overlay if overlay is not None else np.full(self.horizon, np.nan),
            }
        )


def dynamic_regret(trace: RunTrace, stream: SlotStream, oracle: OracleTrace) -> RegretLedger:
    """
    Dynamic regret of the played actions against the per-slot minimizers.

    Distributed runs average l_t(x_t^i) - l_t(x_t*) over nodes; centralized
    runs have a single action per slot. Between updates the frozen action is
    evaluated on the current slot's loss.

    Args:
        trace: The run.
        stream: The problem stream the run consumed.
        oracle: Oracle minimizers of the same stream.

    Returns:
        RegretLedger: Instantaneous and cumulative regret with C_t.

    Raises:
        MisalignedTraceError: If the run, stream and oracle cover different slots.
    """
    T = trace.horizon
    if oracle.horizon != T or stream.horizon != T:
        raise MisalignedTraceError(
            f"run covers {T} slots, stream {stream.horizon}, oracle {oracle.horizon}"
        )
    instant = np.empty(T)
    for t, data in stream.slots():
        losses = objective(data, stream.nonsmooth, trace.action_at(t))
        best = objective(data, stream.nonsmooth, oracle.at(t))
        instant[t - 1] = float(np.mean(losses)) - best
    return RegretLedger(instant=instant, cumulative=np.cumsum(instant), path=oracle.cumulative_path())
