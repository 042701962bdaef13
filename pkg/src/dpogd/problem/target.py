import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dpogd.exceptions import ConfigurationError
from dpogd.utils import StreamKey, derive_rng


class TargetState(BaseModel):
    """The drifting sparse parameter u_t with its support."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    u: np.ndarray
    support: tuple[int, ...]
    t: int = Field(ge=1)

    @property
    def sparsity(self) -> int:
        return len(self.support)


def init_target(n: int, sparsity: int, seed: int) -> TargetState:
    """
    Draw the initial unit-norm sparse target u_1.

    Args:
        n: Dimension.
        sparsity: Number of nonzero entries, 0 < sparsity <= n.
        seed: Run seed.

    Returns:
        TargetState: Support uniform without replacement, standard normal
            values, normalized to unit norm, t = 1.

    Raises:
        ConfigurationError: If sparsity is not in [1, n].
    """
    if not 0 < sparsity <= n:
        raise ConfigurationError(f"sparsity must lie in [1, n={n}], got {sparsity}")
    rng = derive_rng(seed, StreamKey.TARGET, 0)
    support = np.sort(rng.choice(n, size=sparsity, replace=False))
    u = np.zeros(n)
    u[support] = rng.standard_normal(sparsity)
    while not np.any(u[support]):
        u[support] = rng.standard_normal(sparsity)
    u /= np.linalg.norm(u)
    return TargetState(u=u, support=tuple(int(i) for i in support), t=1)


def evolve_target(state: TargetState, rng: np.random.Generator) -> TargetState:
    """
    Advance the target by one slot.

    With probability 1/t one support index is swapped for a zero index (the
    removed entry is zeroed), then N(0, 1/t^2) noise is added on the new
    support and the vector is renormalized.

    Args:
        state: Current target at slot t.
        rng: Generator for this step.

    Returns:
        TargetState: The target at slot t + 1.
    """
    t = state.t
    u = state.u.copy()
    support = list(state.support)
    zeros = np.setdiff1d(np.arange(u.size), support)
    if zeros.size and rng.random() < 1.0 / t:
        position = int(rng.integers(len(support)))
        u[support[position]] = 0.0
        support[position] = int(rng.choice(zeros))
    support.sort()
    u[support] += rng.normal(0.0, 1.0 / t, size=len(support))
    norm = np.linalg.norm(u)
    if norm > 0.0:
        u /= norm
    return TargetState(u=u, support=tuple(support), t=t + 1)


def target_trace(n: int, sparsity: int, horizon: int, seed: int) -> np.ndarray:
    """
    Generate u_1, ..., u_T as a (T, n) array.

    Evolution starts at t = 2: u_2 = u_1 and u_{t+1} = evolve(u_t) for t >= 2,
    each step drawing from its own derived stream.

    Args:
        n: Dimension.
        sparsity: Support size.
        horizon: Number of slots T.
        seed: Run seed.

    Returns:
        np.ndarray: Row t - 1 holds u_t.
    """
    state = init_target(n, sparsity, seed)
    trace = np.empty((horizon, n))
    trace[0] = state.u
    if horizon > 1:
        trace[1] = state.u
        state = TargetState(u=state.u, support=state.support, t=2)
    for t in range(2, horizon):
        state = evolve_target(state, derive_rng(seed, StreamKey.TARGET, t))
        trace[t] = state.u
    return trace
