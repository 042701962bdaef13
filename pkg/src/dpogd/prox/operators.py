import math

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from dpogd.types import RealMatrix, RealVector, as_real

_BALL_SLACK = 1e-12


class NonsmoothSpec(BaseModel):
    """
    The shared nonsmooth term g(x) = sigma ||x||_1 + indicator{||x|| <= radius}.

    Attributes:
        sigma (float): l1 weight.
        radius (float): Radius of the Euclidean constraint ball (inf for none).
    """

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(default=0.0, ge=0.0)
    radius: float = Field(default=math.inf, gt=0.0)

    def value(self, x: npt.ArrayLike) -> float | RealVector:
        """
        Evaluate g row-wise.

        Args:
            x: A vector (n,) or a stack of vectors (N, n).

        Returns:
            float | RealVector: sigma ||x||_1, or +inf outside the ball.
        """
        x = as_real(x)
        l1 = self.sigma * np.abs(x).sum(axis=-1)
        outside = np.linalg.norm(x, axis=-1) > self.radius * (1.0 + _BALL_SLACK)
        values = np.where(outside, np.inf, l1)
        return float(values) if values.ndim == 0 else values


def soft_threshold(x: npt.ArrayLike, tau: float) -> RealMatrix:
    """
    Componentwise sign(x) max(|x| - tau, 0).

    Args:
        x: Vector or stack of vectors.
        tau: Threshold, tau >= 0.

    Returns:
        RealMatrix: The shrunk input, same shape as x.

    Raises:
        ValueError: If tau is negative.
    """
    if tau < 0.0:
        raise ValueError(f"threshold must be non-negative, got {tau}")
    x = as_real(x)
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def project_ball(x: npt.ArrayLike, R: float) -> RealMatrix:
    """
    Project onto the Euclidean ball of radius R (row-wise for stacks).

    Args:
        x: Vector or stack of vectors.
        R: Ball radius, R > 0 (inf leaves x unchanged).

    Returns:
        RealMatrix: x where ||x|| <= R, (R/||x||) x otherwise.

    Raises:
        ValueError: If R is not positive.
    """
    if R <= 0.0:
        raise ValueError(f"ball radius must be positive, got {R}")
    x = as_real(x)
    if math.isinf(R):
        return x.copy()
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    scale = np.where(norms > R, R / np.where(norms > 0.0, norms, 1.0), 1.0)
    return x * scale


def prox_composite(x: npt.ArrayLike, alpha: float, spec: NonsmoothSpec) -> RealMatrix:
    """
    Proximal operator of alpha (sigma ||.||_1 + indicator of the R-ball).

    Soft thresholding followed by radial projection is exact for this pair.

    Args:
        x: Vector or stack of vectors (applied row-wise).
        alpha: Step size, alpha > 0.
        spec: The nonsmooth term.

    Returns:
        RealMatrix: project_ball(soft_threshold(x, alpha sigma), R).

    Raises:
        ValueError: If alpha is not positive.
    """
    if alpha <= 0.0:
        raise ValueError(f"prox step must be positive, got {alpha}")
    return project_ball(soft_threshold(x, alpha * spec.sigma), spec.radius)
