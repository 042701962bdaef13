import functools
import math
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dpogd.exceptions import DimensionMismatchError
from dpogd.prox import NonsmoothSpec
from dpogd.types import RealMatrix, RealVector, as_real


class ProblemSpec(BaseModel):
    """
    Parameters of the dynamic sparse recovery instance.

    `lam` and `sigma` left as None default to 0.05/(dN) and 0.01/(d^2 N^2).
    """

    model_config = ConfigDict(frozen=True)

    N: int = Field(default=100, ge=1)
    d: int = Field(default=4, ge=1)
    n: int = Field(default=50, ge=1)
    sparsity: int = Field(default=10, ge=1)
    lam: float | None = Field(default=None, ge=0.0)
    sigma: float | None = Field(default=None, ge=0.0)
    noise_std: float = Field(default=0.01, ge=0.0)
    radius: float = Field(default=10.0, gt=0.0)
    scale_columns: bool = False

    @model_validator(mode="before")
    @classmethod
    def _derive_weights(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        N = data.get("N", cls.model_fields["N"].default)
        d = data.get("d", cls.model_fields["d"].default)
        if not (isinstance(N, int) and isinstance(d, int) and N > 0 and d > 0):
            return data
        if data.get("lam") is None:
            data["lam"] = 0.05 / (d * N)
        if data.get("sigma") is None:
            data["sigma"] = 0.01 / (d**2 * N**2)
        return data

    @model_validator(mode="after")
    def _check_sparsity(self) -> "ProblemSpec":
        if self.sparsity > self.n:
            raise ValueError(f"sparsity {self.sparsity} exceeds dimension n={self.n}")
        return self

    @property
    def nonsmooth(self) -> NonsmoothSpec:
        """The shared g = sigma ||.||_1 + ball indicator."""
        return NonsmoothSpec(sigma=self.sigma, radius=self.radius)


class SlotData(BaseModel):
    """
    Per-node measurements of one slot: f^i(x) = ||y_i - C_i x||^2 + lam ||x||^2.

    Attributes:
        C (np.ndarray): Observation matrices, shape (N, d, n).
        y (np.ndarray): Measurements, shape (N, d).
        lam (float): l2 weight.
        sigma (float): l1 weight of the shared nonsmooth part.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    C: np.ndarray
    y: np.ndarray
    lam: float = Field(ge=0.0)
    sigma: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _check_shapes(self) -> "SlotData":
        if self.C.ndim != 3 or self.y.shape != self.C.shape[:2]:
            raise DimensionMismatchError(
                f"expected C of shape (N, d, n) and y of shape (N, d), got {self.C.shape} and {self.y.shape}"
            )
        return self

    @property
    def N(self) -> int:
        return self.C.shape[0]

    @property
    def d(self) -> int:
        return self.C.shape[1]

    @property
    def n(self) -> int:
        return self.C.shape[2]

    @functools.cached_property
    def gram(self) -> RealMatrix:
        """(1/N) sum_i C_i^T C_i."""
        return np.einsum("idn,idm->nm", self.C, self.C) / self.N

    @functools.cached_property
    def moment(self) -> RealVector:
        """(1/N) sum_i C_i^T y_i."""
        return np.einsum("idn,id->n", self.C, self.y) / self.N

    @functools.cached_property
    def energy(self) -> float:
        """(1/N) sum_i ||y_i||^2."""
        return float(np.sum(self.y**2) / self.N)

    @functools.cached_property
    def hessian(self) -> RealMatrix:
        """Hessian 2(gram + lam I) of the network-average smooth loss."""
        return 2.0 * (self.gram + self.lam * np.eye(self.n))


def sample_slot(
    target: npt.ArrayLike,
    N: int,
    d: int,
    lam: float,
    sigma: float,
    rng: np.random.Generator,
    noise_std: float = 0.01,
    scale_columns: bool = False,
) -> SlotData:
    """
    Draw C_i with i.i.d. standard normal entries and y_i = C_i u + v_i.

    Args:
        target: The parameter u_t.
        N: Number of nodes.
        d: Measurements per node.
        lam: l2 weight.
        sigma: l1 weight.
        rng: Generator of this slot.
        noise_std: Standard deviation of v_i (default: 0.01).
        scale_columns: Scale C_i entries by 1/sqrt(d) (default: False).

    Returns:
        SlotData: The slot's measurements.
    """
    u = as_real(target)
    C = rng.standard_normal((N, d, u.size))
    if scale_columns:
        C /= math.sqrt(d)
    noise = noise_std * rng.standard_normal((N, d)) if noise_std > 0.0 else np.zeros((N, d))
    y = np.einsum("idn,n->id", C, u) + noise
    return SlotData(C=C, y=y, lam=lam, sigma=sigma)


def local_gradient(slot: SlotData, i: int, x: npt.ArrayLike) -> RealVector:
    """Return 2 C_i^T (C_i x - y_i) + 2 lam x."""
    x = as_real(x)
    C_i = slot.C[i]
    return 2.0 * C_i.T @ (C_i @ x - slot.y[i]) + 2.0 * slot.lam * x


def local_gradients(slot: SlotData, X: npt.ArrayLike) -> RealMatrix:
    """
    Evaluate every node's gradient at its own point.

    Args:
        slot: Slot data.
        X: Stack of points, shape (N, n); row i is evaluated under f^i.

    Returns:
        RealMatrix: Row i holds grad f^i(X[i]).
    """
    X = as_real(X)
    if X.shape != (slot.N, slot.n):
        raise DimensionMismatchError(f"expected a ({slot.N}, {slot.n}) stack, got {X.shape}")
    residual = np.einsum("idn,in->id", slot.C, X) - slot.y
    return 2.0 * np.einsum("idn,id->in", slot.C, residual) + 2.0 * slot.lam * X


def average_gradient(slot: SlotData, x: npt.ArrayLike) -> RealMatrix:
    """
    Gradient of f = (1/N) sum_i f^i, row-wise for stacks.

    Args:
        slot: Slot data.
        x: Point (n,) or points (m, n).

    Returns:
        RealMatrix: 2 (gram + lam I) x - 2 moment, same shape as x.
    """
    x = as_real(x)
    return x @ slot.hessian - 2.0 * slot.moment


def local_losses(slot: SlotData, X: npt.ArrayLike) -> RealVector:
    """Per-node losses f^i(X[i]) for a (N, n) stack."""
    X = as_real(X)
    residual = slot.y - np.einsum("idn,in->id", slot.C, X)
    return np.sum(residual**2, axis=1) + slot.lam * np.sum(X**2, axis=1)


def smooth_loss(slot: SlotData, x: npt.ArrayLike) -> float | RealVector:
    """
    Network-average smooth loss f(x) = (1/N) sum_i f^i(x), row-wise for stacks.

    Args:
        slot: Slot data.
        x: Point (n,) or points (m, n).

    Returns:
        float | RealVector: x^T (gram + lam I) x - 2 moment^T x + energy.
    """
    x = as_real(x)
    quadratic = 0.5 * np.sum((x @ slot.hessian) * x, axis=-1)
    values = quadratic - 2.0 * (x @ slot.moment) + slot.energy
    return float(values) if np.ndim(values) == 0 else values


def objective(slot: SlotData, spec: NonsmoothSpec, x: npt.ArrayLike) -> float | RealVector:
    """
    Composite loss l_t(x) = f(x) + g(x), row-wise for stacks.

    Args:
        slot: Slot data.
        spec: The nonsmooth term.
        x: Point (n,) or points (m, n).

    Returns:
        float | RealVector: The loss of each point.
    """
    return smooth_loss(slot, x) + spec.value(x)


class SmoothnessConstants(BaseModel):
    """Strong convexity mu, smoothness L and gradient bound M of one slot or a stream."""

    model_config = ConfigDict(frozen=True)

    mu: float = Field(ge=0.0)
    L: float = Field(ge=0.0)
    M: float = Field(ge=0.0)

    def rho(self, alpha: float) -> float:
        """Contraction factor sqrt(1 + alpha^2 L^2 - 2 alpha mu) of one prox-gradient step."""
        return math.sqrt(max(1.0 + alpha**2 * self.L**2 - 2.0 * alpha * self.mu, 0.0))

    def alpha_max(self) -> float:
        """Upper end 2 mu / L^2 of the step range where rho < 1."""
        return 2.0 * self.mu / self.L**2 if self.L > 0.0 else math.inf


def smoothness_constants(slot: SlotData, radius: float) -> SmoothnessConstants:
    """
    Certified constants of the local losses of one slot.

    L = 2 lam + 2 max_i s_max(C_i)^2, mu = 2 lam + 2 min_i lambda_min(C_i^T C_i) and
    M = max(2 max_i s_max(C_i)(s_max(C_i) R + ||y_i||) + 2 lam R, sigma sqrt(n)).

    Args:
        slot: Slot data.
        radius: Radius R of the constraint ball.

    Returns:
        SmoothnessConstants: (mu, L, M); M is inf when R is inf.
    """
    singular = np.linalg.svd(slot.C, compute_uv=False)
    s_max = singular[:, 0]
    s_min_sq = singular[:, -1] ** 2 if slot.d >= slot.n else np.zeros(slot.N)
    L = 2.0 * slot.lam + 2.0 * float(np.max(s_max**2))
    mu = 2.0 * slot.lam + 2.0 * float(np.min(s_min_sq))
    if math.isinf(radius):
        return SmoothnessConstants(mu=mu, L=L, M=math.inf)
    y_norms = np.linalg.norm(slot.y, axis=1)
    gradient_bound = float(np.max(2.0 * s_max * (s_max * radius + y_norms))) + 2.0 * slot.lam * radius
    M = max(gradient_bound, slot.sigma * math.sqrt(slot.n))
    return SmoothnessConstants(mu=mu, L=L, M=M)
