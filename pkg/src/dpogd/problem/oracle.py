import math

import numpy as np
import numpy.typing as npt
import scipy.linalg
from logzero import logger
from pydantic import BaseModel, ConfigDict, Field

from dpogd.exceptions import OracleFailureError, SeriesError
from dpogd.prox import NonsmoothSpec, prox_composite
from dpogd.types import RealVector, as_real

from .slots import SlotData, average_gradient
from .stream import SlotStream

ORACLE_TOL = 1e-10
ORACLE_MAX_ITER = 100_000
_POLISH_BELOW = 1e-3
_POLISH_EVERY = 10


class OracleRecord(BaseModel):
    """High-precision minimizer x_t* of one slot's composite loss."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x_star: np.ndarray
    residual: float = Field(ge=0.0)
    path_increment: float = Field(default=0.0, ge=0.0)
    iterations: int = Field(default=0, ge=0)


class OracleTrace(BaseModel):
    """Oracle minimizers of slots 1..T with residuals and path increments."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x_star: np.ndarray
    residuals: np.ndarray
    increments: np.ndarray
    iterations: np.ndarray

    @property
    def horizon(self) -> int:
        return self.x_star.shape[0]

    @property
    def path_length(self) -> float:
        """C_T = sum_{t>=2} ||x_t* - x_{t-1}*||."""
        return float(self.increments[1:].sum())

    def cumulative_path(self) -> np.ndarray:
        """C_t for t = 1..T (C_1 = 0)."""
        return np.cumsum(self.increments)

    def at(self, t: int) -> RealVector:
        """x_t* for slot t (1-based)."""
        return self.x_star[t - 1]


def fixed_point_residual(slot: SlotData, spec: NonsmoothSpec, x: npt.ArrayLike, step: float) -> float:
    """||x - prox(x - step grad f(x))||, zero exactly at the minimizer."""
    x = as_real(x)
    return float(np.linalg.norm(x - prox_composite(x - step * average_gradient(slot, x), step, spec)))


def _lipschitz(slot: SlotData) -> float:
    return float(np.linalg.eigvalsh(slot.hessian)[-1])


def _polish(slot: SlotData, spec: NonsmoothSpec, x: RealVector) -> RealVector | None:
    """Solve the KKT system restricted to the detected support and sign pattern."""
    support = np.flatnonzero(x)
    candidate = np.zeros_like(x)
    if support.size:
        signs = np.sign(x[support])
        hessian = slot.hessian[np.ix_(support, support)]
        rhs = 2.0 * slot.moment[support] - spec.sigma * signs
        try:
            solution = scipy.linalg.solve(hessian, rhs, assume_a="pos")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            return None
        if np.any(np.sign(solution) != signs):
            return None
        candidate[support] = solution
    if np.linalg.norm(candidate) > spec.radius:
        return None
    return candidate


def oracle_optimum(
    slot: SlotData,
    spec: NonsmoothSpec,
    tol: float = ORACLE_TOL,
    x0: npt.ArrayLike | None = None,
    max_iter: int = ORACLE_MAX_ITER,
) -> OracleRecord:
    """
    Minimize f(x) + g(x) with restarted FISTA and an active-set polish.

    The residual is the fixed-point residual of the prox-gradient map with
    step 1/L_t, where L_t is the largest eigenvalue of the Hessian of f.

    Args:
        slot: Slot data defining f.
        spec: The nonsmooth term g.
        tol: Residual tolerance (default: 1e-10).
        x0: Warm start (default: the origin).
        max_iter: Iteration cap (default: 1e5).

    Returns:
        OracleRecord: The minimizer, its residual and the iteration count.

    Raises:
        OracleFailureError: If the residual does not reach tol within max_iter.
    """
    if tol <= 0.0:
        raise ValueError(f"oracle tolerance must be positive, got {tol}")
    lipschitz = _lipschitz(slot)
    step = 1.0 / lipschitz if lipschitz > 0.0 else 1.0
    x = np.zeros(slot.n) if x0 is None else as_real(x0).copy()
    residual = fixed_point_residual(slot, spec, x, step)
    if residual <= tol:
        return OracleRecord(x_star=x, residual=residual)

    y, theta = x.copy(), 1.0
    for iteration in range(1, max_iter + 1):
        x_next = prox_composite(y - step * average_gradient(slot, y), step, spec)
        theta_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * theta**2))
        if np.dot(y - x_next, x_next - x) > 0.0:
            theta_next, y = 1.0, x_next.copy()
        else:
            y = x_next + ((theta - 1.0) / theta_next) * (x_next - x)
        x, theta = x_next, theta_next

        residual = fixed_point_residual(slot, spec, x, step)
        if residual <= tol:
            return OracleRecord(x_star=x, residual=residual, iterations=iteration)
        if residual <= _POLISH_BELOW and iteration % _POLISH_EVERY == 0:
            candidate = _polish(slot, spec, x)
            if candidate is not None:
                polished = fixed_point_residual(slot, spec, candidate, step)
                if polished <= tol:
                    return OracleRecord(x_star=candidate, residual=polished, iterations=iteration)
    raise OracleFailureError(
        f"oracle did not reach residual {tol:.1e} within {max_iter} iterations (last {residual:.3e})"
    )


def solve_oracle_trace(
    stream: SlotStream, tol: float = ORACLE_TOL, max_iter: int = ORACLE_MAX_ITER
) -> OracleTrace:
    """
    Solve every slot of a stream, warm-starting from the previous optimum.

    Args:
        stream: The problem stream.
        tol: Residual tolerance per slot.
        max_iter: Iteration cap per slot.

    Returns:
        OracleTrace: x_t* for t = 1..T with residuals and path increments.

    Raises:
        OracleFailureError: With the failing slot and seed in the details.
    """
    T = stream.horizon
    x_star = np.empty((T, stream.n))
    residuals = np.empty(T)
    iterations = np.empty(T, dtype=np.int64)
    previous = None
    for t, data in stream.slots():
        try:
            record = oracle_optimum(data, stream.nonsmooth, tol, x0=previous, max_iter=max_iter)
        except OracleFailureError as exc:
            seed = getattr(stream, "seed", None)
            raise OracleFailureError(f"slot {t} (seed={seed}): {exc.details}") from exc
        x_star[t - 1] = record.x_star
        residuals[t - 1] = record.residual
        iterations[t - 1] = record.iterations
        previous = record.x_star
    increments = np.zeros(T)
    increments[1:] = np.linalg.norm(np.diff(x_star, axis=0), axis=1)
    logger.debug(
        f"Oracle trace: T={T}, mean iterations={iterations.mean():.1f}, "
        f"max residual={residuals.max():.2e}, C_T={increments.sum():.4f}"
    )
    return OracleTrace(x_star=x_star, residuals=residuals, increments=increments, iterations=iterations)


def path_length(trace: OracleTrace | npt.ArrayLike) -> float:
    """
    Sum of ||x_t* - x_{t-1}*|| over t = 2..T.

    Raises:
        SeriesError: If the trace has fewer than two slots.
    """
    x_star = trace.x_star if isinstance(trace, OracleTrace) else as_real(trace)
    if x_star.shape[0] < 2:
        raise SeriesError("path length needs at least two slots")
    return float(np.linalg.norm(np.diff(x_star, axis=0), axis=1).sum())


def subsampled_path_length(trace: OracleTrace, sample_times: npt.ArrayLike) -> float:
    """
    Path length of the optimum observed only at the sample times.

    Args:
        trace: Oracle trace.
        sample_times: Slots t_1 < ... < t_K.

    Returns:
        float: sum_k ||x*_{t_{k+1}} - x*_{t_k}||, never larger than C_T.
    """
    times = np.asarray(sample_times, dtype=np.int64)
    if times.size < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(trace.x_star[times - 1], axis=0), axis=1).sum())
