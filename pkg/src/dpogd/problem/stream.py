import functools
from abc import ABC, abstractmethod
from typing import Any, Iterable, Iterator

import numpy as np
from logzero import logger

from dpogd.exceptions import OutOfRangeError
from dpogd.prox import NonsmoothSpec
from dpogd.types import RealVector
from dpogd.utils import StreamKey, array_digest, derive_rng

from .slots import ProblemSpec, SlotData, SmoothnessConstants, sample_slot, smoothness_constants
from .target import target_trace


class SlotStream(ABC):
    """
    Source of per-slot losses f_t^i and the shared nonsmooth term g_t.

    Attributes:
        N (int): Number of nodes.
        n (int): Dimension of the decision variable.
        horizon (int): Number of slots T.
        nonsmooth (NonsmoothSpec): The shared g (the same for every slot).
    """

    def __init__(self, N: int, n: int, horizon: int, nonsmooth: NonsmoothSpec) -> None:
        self.N = N
        self.n = n
        self.horizon = horizon
        self.nonsmooth = nonsmooth

    def _check_slot(self, t: int) -> None:
        if not 1 <= t <= self.horizon:
            raise OutOfRangeError(f"slot {t} outside [1, {self.horizon}]")

    @abstractmethod
    def slot(self, t: int) -> SlotData:
        """Return the data of slot t (1-based)."""
        ...

    def slots(self, start: int = 1, stop: int | None = None) -> Iterator[tuple[int, SlotData]]:
        """Iterate (t, data) over slots start..stop (inclusive, default: horizon)."""
        for t in range(start, (stop or self.horizon) + 1):
            yield t, self.slot(t)

    def manifest(self) -> dict[str, Any]:
        """Reproducibility record of the instance."""
        return {"N": self.N, "n": self.n, "horizon": self.horizon, **self.nonsmooth.model_dump()}


class StaticStream(SlotStream):
    """The same slot data in every slot."""

    def __init__(self, data: SlotData, horizon: int, nonsmooth: NonsmoothSpec | None = None) -> None:
        super().__init__(data.N, data.n, horizon, nonsmooth or NonsmoothSpec(sigma=data.sigma))
        self._data = data

    def slot(self, t: int) -> SlotData:
        self._check_slot(t)
        return self._data


class ProblemStream(SlotStream):
    """
    Seeded dynamic sparse recovery stream.

    The target trace u_1..u_T is generated once; the measurements of any slot
    are regenerated on demand from the slot's own derived random stream, so
    two streams built from the same (spec, horizon, seed) agree bit for bit.
    """

    def __init__(self, spec: ProblemSpec, horizon: int, seed: int, cache_size: int = 512) -> None:
        super().__init__(spec.N, spec.n, horizon, spec.nonsmooth)
        self.spec = spec
        self.seed = seed
        self.targets = target_trace(spec.n, spec.sparsity, horizon, seed)
        self._cached = functools.lru_cache(maxsize=cache_size)(self._generate)
        logger.debug(f"Generated target trace for seed={seed}: T={horizon}, n={spec.n}")

    def target(self, t: int) -> RealVector:
        """The true parameter u_t."""
        self._check_slot(t)
        return self.targets[t - 1]

    def _generate(self, t: int) -> SlotData:
        return sample_slot(
            self.targets[t - 1],
            self.spec.N,
            self.spec.d,
            self.spec.lam,
            self.spec.sigma,
            derive_rng(self.seed, StreamKey.SLOT, t),
            noise_std=self.spec.noise_std,
            scale_columns=self.spec.scale_columns,
        )

    def slot(self, t: int) -> SlotData:
        self._check_slot(t)
        return self._cached(t)

    def target_digest(self) -> str:
        """sha256 of the target trace."""
        return array_digest(self.targets)

    def manifest(self) -> dict[str, Any]:
        return {
            **self.spec.model_dump(),
            "horizon": self.horizon,
            "seed": self.seed,
            "seed_derivation": {key.name.lower(): int(key) for key in StreamKey},
            "target_sha256": self.target_digest(),
        }


def stream_constants(stream: SlotStream, slots: Iterable[int]) -> SmoothnessConstants:
    """
    Constants valid over several slots: inf of mu, sup of L and M.

    Args:
        stream: The problem stream.
        slots: The slots to inspect (typically the sample times).

    Returns:
        SmoothnessConstants: The worst-case (mu, L, M) across the slots.
    """
    constants = [smoothness_constants(stream.slot(t), stream.nonsmooth.radius) for t in slots]
    if not constants:
        raise OutOfRangeError("no slots supplied for the smoothness constants")
    return SmoothnessConstants(
        mu=min(c.mu for c in constants),
        L=max(c.L for c in constants),
        M=max(c.M for c in constants),
    )
