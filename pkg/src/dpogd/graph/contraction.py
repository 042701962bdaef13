import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dpogd.exceptions import ContractionUnderflowError

_LOG_TINY = math.log(np.finfo(np.float64).tiny)


class ContractionConstants(BaseModel):
    """
    Constants of the bound max_ij |Q^ij - 1/N| <= Gamma gamma^(S - 1).

    gamma = (1 - omega)^(1/B) rounds to 1.0 in float64 for realistic networks,
    so the exponent is carried as `log_gamma` and every power is evaluated in
    log space.
    """

    model_config = ConfigDict(frozen=True)

    eta: float = Field(gt=0.0, le=1.0)
    B: int = Field(ge=1)
    N: int = Field(ge=2)
    omega: float = Field(gt=0.0, lt=1.0)
    log_omega: float = Field(lt=0.0)
    Gamma: float = Field(gt=0.0)
    gamma: float = Field(gt=0.0, le=1.0)
    log_gamma: float = Field(lt=0.0)

    def bound(self, S: int | np.ndarray) -> float | np.ndarray:
        """
        Evaluate Gamma gamma^(S - 1).

        Args:
            S: Number of consensus steps (scalar or array).

        Returns:
            float | np.ndarray: The bound on the entrywise distance of Q to 1/N.
        """
        return self.Gamma * np.exp((np.asarray(S, dtype=np.float64) - 1.0) * self.log_gamma)


def contraction_constants(eta: float, N: int, B: int) -> ContractionConstants:
    """
    Compute omega = eta^((N-1)B), Gamma = 2(omega+1)/(omega(1-omega)) and gamma = (1-omega)^(1/B).

    Args:
        eta: Weight floor of the mixing matrices, 0 < eta <= 1.
        N: Number of nodes (N >= 2).
        B: Connectivity window (B >= 1).

    Returns:
        ContractionConstants: The constants together with their logarithms.

    Raises:
        ContractionUnderflowError: If omega underflows float64, or if eta = 1
            makes omega = 1 and Gamma undefined.
        ValueError: If eta, N or B are out of range.
    """
    if not 0.0 < eta <= 1.0 or N < 2 or B < 1:
        raise ValueError(f"invalid contraction inputs eta={eta}, N={N}, B={B}")
    log_omega = (N - 1) * B * math.log(eta)
    if log_omega == 0.0:
        raise ContractionUnderflowError("eta = 1 gives omega = 1: Gamma divides by zero")
    if log_omega < _LOG_TINY:
        raise ContractionUnderflowError(
            f"omega = eta^((N-1)B) = exp({log_omega:.1f}) underflows float64; "
            f"reduce N*B (currently {N}*{B}) for diagnostic runs"
        )
    omega = math.exp(log_omega)
    Gamma = 2.0 * (omega + 1.0) / (omega * (1.0 - omega))
    if not math.isfinite(Gamma):
        raise ContractionUnderflowError(f"Gamma overflows for omega={omega:.3e}; reduce N*B")
    log_gamma = math.log1p(-omega) / B
    return ContractionConstants(
        eta=eta,
        B=B,
        N=N,
        omega=omega,
        log_omega=log_omega,
        Gamma=Gamma,
        gamma=math.exp(log_gamma),
        log_gamma=log_gamma,
    )
