import math
from typing import Iterable

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from dpogd.engine import RunTrace
from dpogd.exceptions import ConfigurationError
from dpogd.graph import ContractionConstants
from dpogd.problem import OracleTrace, SlotStream, SmoothnessConstants, average_gradient, local_gradients
from dpogd.prox import prox_composite

DIAGNOSTIC_COLUMNS = [
    "k",
    "e_k",
    "eps_k",
    "delta_k",
    "rho",
    "progress_residual",
    "spread_residual",
    "growth_residual",
    "error_residual",
]


class DiagnosticsRecord(BaseModel):
    """
    Averaging errors of iteration k and the slack of the per-iteration bounds.

    Residuals are bound minus measured value, so non-negative means the
    inequality holds; NaN marks bounds that are undefined for k or lack constants.
    """

    model_config = ConfigDict(frozen=True)

    k: int
    e_k: float
    eps_k: float
    delta_k: float
    rho: float
    progress_residual: float
    spread_residual: float
    growth_residual: float
    error_residual: float


class DiagnosticsSummary(BaseModel):
    """Worst residual per inequality across the iterations of a run."""

    model_config = ConfigDict(frozen=True)

    iterations: int
    max_delta: float
    progress_min: float
    spread_min: float
    growth_min: float
    error_min: float

    def satisfied(self, tol: float = 1e-9) -> bool:
        """True when every defined residual is at least -tol."""
        values = (self.progress_min, self.spread_min, self.growth_min, self.error_min)
        return all(math.isnan(value) or value >= -tol for value in values)


def consensus_diagnostics(
    trace: RunTrace,
    stream: SlotStream,
    alpha: float,
    oracle: OracleTrace | None = None,
    contraction: ContractionConstants | None = None,
    smoothness: SmoothnessConstants | None = None,
) -> list[DiagnosticsRecord]:
    """
    Per-iteration gradient and prox averaging errors of a DP-OGD run.

    e_k = (1/N) sum_i [grad f_k^i(x_k^i) - grad f_k^i(x_bar_k)],
    eps_k = x_bar_{k+1} - prox(z_bar_k) and delta_k = ||eps_k|| + alpha ||e_k||.
    With constants, also the slack of
    ||x_bar_{k+1} - x_k*|| <= rho ||x_bar_k - x_k*|| + delta_k,
    sum_i ||x_bar_k - x_k^i|| <= 2 Gamma gamma^(S(k-1)-1) N sum_i ||z_{k-1}^i||,
    sum_i ||z_{k-1}^i|| <= Z_1 + 2 alpha N M (k-2) and of the delta_k bound
    2 alpha L Gamma gamma^(S(k-1)-1)(Z_1 + 2 alpha N M (k-2)) + Gamma gamma^(S(k)-1)(Z_1 + 2 alpha N M (k-1)),
    where Z_1 = sum_i ||z_1^i||.

    Args:
        trace: A DP-OGD trace holding K + 1 snapshots.
        stream: The stream the run consumed.
        alpha: The run's step size.
        oracle: Oracle trace (needed for the progress inequality).
        contraction: Contraction constants of the mixing sequence.
        smoothness: Constants (mu, L, M) valid over the sample times.

    Returns:
        list[DiagnosticsRecord]: One record per iteration k = 1..K.

    Raises:
        ConfigurationError: If the trace has no schedule or lacks the final snapshot.
    """
    schedule = trace.schedule
    if schedule is None or trace.iterates.shape[0] < schedule.K + 1:
        raise ConfigurationError(f"{trace.algorithm} trace does not hold per-iteration snapshots")
    N = trace.nodes
    rho = smoothness.rho(alpha) if smoothness is not None else math.nan
    nan = math.nan

    def decay(S: int) -> float:
        return contraction.Gamma * math.exp((S - 1) * contraction.log_gamma)

    records = []
    z_total_first = z_total_prev = nan
    for k in range(1, schedule.K + 1):
        X = trace.iterates[k - 1]
        data = stream.slot(schedule.t(k))
        gradients = local_gradients(data, X)
        x_bar = X.mean(axis=0)
        e_k = gradients.mean(axis=0) - average_gradient(data, x_bar)
        Z = X - alpha * gradients
        z_bar = Z.mean(axis=0)
        x_bar_next = trace.iterates[k].mean(axis=0)
        eps_k = x_bar_next - prox_composite(z_bar, alpha, stream.nonsmooth)
        delta_k = float(np.linalg.norm(eps_k) + alpha * np.linalg.norm(e_k))
        z_total = float(np.linalg.norm(Z, axis=1).sum())
        if k == 1:
            z_total_first = z_total

        progress = nan
        if oracle is not None and smoothness is not None:
            x_star = oracle.at(schedule.t(k))
            progress = (
                rho * float(np.linalg.norm(x_bar - x_star))
                + delta_k
                - float(np.linalg.norm(x_bar_next - x_star))
            )

        spread = growth = error = nan
        if k >= 2 and contraction is not None:
            deviation = float(np.linalg.norm(X - x_bar, axis=1).sum())
            spread = 2.0 * decay(schedule.S(k - 1)) * N * z_total_prev - deviation
            if smoothness is not None and math.isfinite(smoothness.M):
                growth_prev = z_total_first + 2.0 * alpha * N * smoothness.M * (k - 2)
                growth_now = z_total_first + 2.0 * alpha * N * smoothness.M * (k - 1)
                growth = growth_prev - z_total_prev
                bound = (
                    2.0 * alpha * smoothness.L * decay(schedule.S(k - 1)) * growth_prev
                    + decay(schedule.S(k)) * growth_now
                )
                error = bound - delta_k

        records.append(
            DiagnosticsRecord(
                k=k,
                e_k=float(np.linalg.norm(e_k)),
                eps_k=float(np.linalg.norm(eps_k)),
                delta_k=delta_k,
                rho=rho,
                progress_residual=progress,
                spread_residual=spread,
                growth_residual=growth,
                error_residual=error,
            )
        )
        z_total_prev = z_total
    return records


def diagnostics_frame(records: Iterable[DiagnosticsRecord]) -> pd.DataFrame:
    """Diagnostics table in the column order of the diagnostics CSV."""
    return pd.DataFrame([record.model_dump() for record in records], columns=DIAGNOSTIC_COLUMNS)


def summarize_diagnostics(records: list[DiagnosticsRecord]) -> DiagnosticsSummary:
    """Minimum residual per inequality (NaN when never defined) and the largest delta_k."""
    frame = diagnostics_frame(records)

    def worst(column: str) -> float:
        values = frame[column].dropna()
        return float(values.min()) if len(values) else math.nan

    return DiagnosticsSummary(
        iterations=len(frame),
        max_delta=float(frame["delta_k"].max()) if len(frame) else math.nan,
        progress_min=worst("progress_residual"),
        spread_min=worst("spread_residual"),
        growth_min=worst("growth_residual"),
        error_min=worst("error_residual"),
    )
