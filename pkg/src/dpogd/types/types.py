import numpy as np
import numpy.typing as npt
from pydantic import conint

RealVector = npt.NDArray[np.float64]
"""Dense float64 vector (iterates, measurements, error vectors)."""

RealMatrix = npt.NDArray[np.float64]
"""Dense float64 matrix (measurement matrices, mixing matrices, node stacks)."""

BoolMatrix = npt.NDArray[np.bool_]
"""Boolean adjacency or reachability matrix."""

Seed = conint(ge=0, lt=2**63)
"""Seed accepted by numpy.random.SeedSequence."""


def as_real(value: npt.ArrayLike) -> RealMatrix:
    """
    Convert array-like input to a float64 numpy array.

    Args:
        value: Any array-like (list, tuple, numpy array, scalar).

    Returns:
        RealMatrix: A float64 array with the same shape as the input.
    """
    return np.asarray(value, dtype=np.float64)
