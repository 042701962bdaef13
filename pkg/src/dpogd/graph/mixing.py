import functools
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from logzero import logger
from pydantic import BaseModel, ConfigDict, Field

from dpogd.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    InvalidIotaError,
    InvalidNetworkError,
)
from dpogd.types import RealMatrix, as_real
from dpogd.utils import StreamKey, derive_rng, read_csv, write_csv

STOCHASTIC_TOL = 1e-12
"""Tolerance on row and column sums of a mixing matrix."""


class MixingMatrix(BaseModel):
    """Doubly stochastic weight matrix A_t used in consensus slot t."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray
    slot: int = Field(ge=0)
    eta: float = Field(gt=0.0, le=1.0)

    @property
    def N(self) -> int:
        """Number of nodes."""
        return self.weights.shape[0]

    @property
    def support(self) -> np.ndarray:
        """Boolean matrix of nonzero entries (i receives from j)."""
        return self.weights > 0.0


class PermutationBasis(BaseModel):
    """
    Permutation matrices P^0 = I, P^1, ..., P^{N-1}.

    Each permutation is stored as an index array `perm` with P[i, perm[i]] = 1.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    perms: np.ndarray
    seed: int

    @property
    def N(self) -> int:
        """Number of nodes."""
        return self.perms.shape[1]

    def matrix(self, j: int) -> RealMatrix:
        """Return P^j as a dense 0/1 matrix."""
        dense = np.zeros((self.N, self.N))
        dense[np.arange(self.N), self.perms[j]] = 1.0
        return dense


class ValidationReport(BaseModel):
    """Outcome of checking a matrix against the three weight assumptions."""

    model_config = ConfigDict(frozen=True)

    eta: float
    stochastic_ok: bool
    stochastic_residual: float
    worst_stochastic: tuple[str, int]
    floor_ok: bool
    worst_floor_entry: tuple[int, int, float] | None
    diagonal_ok: bool
    worst_diagonal: tuple[int, float]

    @property
    def passed(self) -> bool:
        """True when every clause holds."""
        return self.stochastic_ok and self.floor_ok and self.diagonal_ok

    @property
    def failed_clauses(self) -> list[int]:
        """1-based numbers of the violated clauses."""
        flags = (self.stochastic_ok, self.floor_ok, self.diagonal_ok)
        return [index + 1 for index, ok in enumerate(flags) if not ok]


def permutation_basis(N: int, seed: int) -> PermutationBasis:
    """
    Generate P^0 = I and N - 1 distinct random row permutations of the identity.

    Args:
        N: Number of nodes (N >= 2).
        seed: Seed of the basis stream.

    Returns:
        PermutationBasis: The basis, fixed for a whole run.

    Raises:
        InvalidNetworkError: If N < 2.
    """
    if N < 2:
        raise InvalidNetworkError(f"a network needs at least 2 nodes, got N={N}")
    rng = derive_rng(seed, StreamKey.BASIS)
    identity = np.arange(N)
    perms = [identity]
    seen = {identity.tobytes()}
    while len(perms) < N:
        candidate = rng.permutation(N)
        if candidate.tobytes() in seen:
            continue
        seen.add(candidate.tobytes())
        perms.append(candidate)
    return PermutationBasis(perms=np.stack(perms), seed=seed)


def effective_eta(N: int, iota: int | None) -> float:
    """
    Weight floor guaranteed by the construction.

    Args:
        N: Number of nodes.
        iota: Number of mixed permutations, or None for the complete graph.

    Returns:
        float: 1/N for the complete graph, min(2/N, 1/(iota + 1)) otherwise.
    """
    if iota is None:
        return 1.0 / N
    return min(2.0 / N, 1.0 / (iota + 1))


def complete_matrix(N: int, slot: int = 0) -> MixingMatrix:
    """Return the complete-graph matrix with all weights 1/N."""
    return MixingMatrix(weights=np.full((N, N), 1.0 / N), slot=slot, eta=1.0 / N)


def mixing_matrix(
    basis: PermutationBasis,
    iota: int,
    slot: int,
    rng: np.random.Generator,
) -> MixingMatrix:
    """
    Build A_t = (P^0 + sum of iota randomly chosen basis permutations) / (iota + 1).

    Args:
        basis: The run's permutation basis.
        iota: Number of non-identity permutations mixed in, 1 <= iota <= N - 1.
        slot: The slot the matrix belongs to.
        rng: Generator used to pick the permutation subset.

    Returns:
        MixingMatrix: A doubly stochastic matrix with diagonal >= 1/(iota + 1).

    Raises:
        InvalidIotaError: If iota is outside [1, N - 1].
    """
    N = basis.N
    if not 1 <= iota <= N - 1:
        raise InvalidIotaError(f"iota must lie in [1, {N - 1}], got {iota}")
    chosen = rng.choice(np.arange(1, N), size=iota, replace=False)
    counts = np.zeros((N, N))
    rows = np.arange(N)
    for j in (0, *chosen):
        np.add.at(counts, (rows, basis.perms[j]), 1.0)
    return MixingMatrix(weights=counts / (iota + 1), slot=slot, eta=effective_eta(N, iota))


def validate(
    matrix: MixingMatrix | RealMatrix, eta_effective: float | None = None
) -> ValidationReport:
    """
    Check double stochasticity, the nonzero floor and the diagonal floor.

    Args:
        matrix: A MixingMatrix or a square array.
        eta_effective: The floor to test against (default: the matrix's own eta,
            or the smallest positive entry of a bare array).

    Returns:
        ValidationReport: Pass/fail per clause with the worst violating entry.

    Raises:
        DimensionMismatchError: If the matrix is not square.
    """
    weights = matrix.weights if isinstance(matrix, MixingMatrix) else as_real(matrix)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise DimensionMismatchError(f"mixing matrix must be square, got {weights.shape}")
    if eta_effective is None:
        if isinstance(matrix, MixingMatrix):
            eta_effective = matrix.eta
        else:
            positive = weights[weights > 0.0]
            eta_effective = float(positive.min()) if positive.size else 0.0

    row_residual = np.abs(weights.sum(axis=1) - 1.0)
    col_residual = np.abs(weights.sum(axis=0) - 1.0)
    if row_residual.max() >= col_residual.max():
        worst_stochastic = ("row", int(row_residual.argmax()))
        stochastic_residual = float(row_residual.max())
    else:
        worst_stochastic = ("column", int(col_residual.argmax()))
        stochastic_residual = float(col_residual.max())

    nonzero = weights != 0.0
    floor_gap = np.where(nonzero, weights - eta_effective, np.inf)
    i, j = np.unravel_index(np.argmin(floor_gap), floor_gap.shape)
    worst_floor_entry = (int(i), int(j), float(weights[i, j])) if nonzero.any() else None
    floor_ok = bool(np.all(floor_gap >= -STOCHASTIC_TOL))

    diagonal = np.diag(weights)
    worst_diagonal = (int(diagonal.argmin()), float(diagonal.min()))

    return ValidationReport(
        eta=eta_effective,
        stochastic_ok=stochastic_residual <= STOCHASTIC_TOL,
        stochastic_residual=stochastic_residual,
        worst_stochastic=worst_stochastic,
        floor_ok=floor_ok,
        worst_floor_entry=worst_floor_entry,
        diagonal_ok=bool(diagonal.min() > 0.0 and diagonal.min() >= eta_effective - STOCHASTIC_TOL),
        worst_diagonal=worst_diagonal,
    )


def consensus_product(matrices: Sequence[MixingMatrix | RealMatrix]) -> RealMatrix:
    """
    Multiply consensus matrices in slot order, latest slot leftmost.

    Args:
        matrices: [A_{t+1}, ..., A_{t+S}] in increasing slot order.

    Returns:
        RealMatrix: Q = A_{t+S} ... A_{t+1}.

    Raises:
        DimensionMismatchError: If the list is empty or shapes differ.
    """
    if not matrices:
        raise DimensionMismatchError("consensus product needs at least one matrix")
    arrays = [m.weights if isinstance(m, MixingMatrix) else as_real(m) for m in matrices]
    shape = arrays[0].shape
    product = arrays[0].copy()
    for array in arrays[1:]:
        if array.shape != shape:
            raise DimensionMismatchError(f"matrix shapes differ: {shape} vs {array.shape}")
        product = array @ product
    return product


class MixingSequence(ABC):
    """Deterministic map from slot index to the mixing matrix A_t."""

    def __init__(self, N: int) -> None:
        self.N = N

    @property
    @abstractmethod
    def eta(self) -> float:
        """Weight floor holding for every matrix of the sequence."""
        ...

    @property
    @abstractmethod
    def label(self) -> str:
        """Graph family label used in file names and plots."""
        ...

    @abstractmethod
    def matrix(self, slot: int) -> MixingMatrix:
        """
        Return A_t for slot t.

        Raises:
            ConfigurationError: If the sequence holds no matrix for the slot.
        """
        ...

    def window(self, start: int, stop: int) -> list[MixingMatrix]:
        """Matrices of slots start, ..., stop - 1."""
        return [self.matrix(t) for t in range(start, stop)]

    def dump_csv(self, slots: Sequence[int], path: Path, manifest_hash: str) -> None:
        """
        Write the nonzero weights of the given slots as (slot, i, j, weight) rows.

        Args:
            slots: Slots to dump.
            path: Destination CSV.
            manifest_hash: Hash of the producing instance's manifest.
        """
        frames = []
        for t in slots:
            weights = self.matrix(t).weights
            i, j = np.nonzero(weights)
            frames.append(pd.DataFrame({"slot": t, "i": i, "j": j, "weight": weights[i, j]}))
        write_csv(pd.concat(frames, ignore_index=True), path, manifest_hash)


class CompleteMixing(MixingSequence):
    """Complete graph with all weights 1/N in every slot."""

    @property
    def eta(self) -> float:
        return 1.0 / self.N

    @property
    def label(self) -> str:
        return "complete"

    def matrix(self, slot: int) -> MixingMatrix:
        return complete_matrix(self.N, slot)


class PermutationMixing(MixingSequence):
    """
    Time-varying A_t^(iota) drawn from a fixed permutation basis.

    The basis is generated once per run; each slot draws a fresh subset of
    iota permutations from its own derived random stream.
    """

    def __init__(self, N: int, iota: int, seed: int, cache_size: int = 4096) -> None:
        super().__init__(N)
        if not 1 <= iota <= N - 1:
            raise InvalidIotaError(f"iota must lie in [1, {N - 1}], got {iota}")
        self.iota = iota
        self.seed = seed
        self.basis = permutation_basis(N, seed)
        self._cached = functools.lru_cache(maxsize=cache_size)(self._generate)

    @property
    def eta(self) -> float:
        return effective_eta(self.N, self.iota)

    @property
    def label(self) -> str:
        return f"iota{self.iota}"

    def _generate(self, slot: int) -> MixingMatrix:
        return mixing_matrix(self.basis, self.iota, slot, derive_rng(self.seed, StreamKey.GRAPH, slot))

    def matrix(self, slot: int) -> MixingMatrix:
        return self._cached(slot)


class ExplicitMixing(MixingSequence):
    """Mixing matrices given slot by slot, or one static matrix for every slot."""

    def __init__(
        self,
        matrices: dict[int, RealMatrix] | None = None,
        *,
        static: RealMatrix | None = None,
        eta: float | None = None,
        label: str = "explicit",
    ) -> None:
        if (matrices is None) == (static is None):
            raise ConfigurationError("give either per-slot matrices or one static matrix")
        arrays = {int(t): as_real(w) for t, w in (matrices or {}).items()}
        sample = as_real(static) if static is not None else next(iter(arrays.values()))
        super().__init__(sample.shape[0])
        self._matrices = arrays
        self._static = as_real(static) if static is not None else None
        if eta is None:
            everything = [self._static] if self._static is not None else list(arrays.values())
            eta = min(float(w[w > 0.0].min()) for w in everything)
        self._eta = eta
        self._label = label

    @property
    def eta(self) -> float:
        return self._eta

    @property
    def label(self) -> str:
        return self._label

    @property
    def slots(self) -> list[int]:
        """Slots with an explicit matrix (empty for a static sequence)."""
        return sorted(self._matrices)

    def matrix(self, slot: int) -> MixingMatrix:
        if self._static is not None:
            return MixingMatrix(weights=self._static, slot=slot, eta=self._eta)
        if slot not in self._matrices:
            raise ConfigurationError(f"no mixing matrix supplied for consensus slot {slot}")
        return MixingMatrix(weights=self._matrices[slot], slot=slot, eta=self._eta)

    @classmethod
    def from_sequence(cls, matrices: Sequence[RealMatrix], start: int = 1, **kwargs) -> "ExplicitMixing":
        """Build a sequence whose i-th matrix belongs to slot start + i."""
        return cls({start + offset: m for offset, m in enumerate(matrices)}, **kwargs)

    @classmethod
    def load_csv(cls, path: Path) -> "ExplicitMixing":
        """
        Load a sequence dumped with `MixingSequence.dump_csv`.

        Args:
            path: Source CSV with columns slot, i, j, weight.

        Returns:
            ExplicitMixing: The per-slot sequence.
        """
        frame, _ = read_csv(path)
        N = int(max(frame["i"].max(), frame["j"].max())) + 1
        matrices: dict[int, RealMatrix] = {}
        for slot, group in frame.groupby("slot"):
            weights = np.zeros((N, N))
            weights[group["i"].to_numpy(), group["j"].to_numpy()] = group["weight"].to_numpy()
            matrices[int(slot)] = weights
        logger.debug(f"Loaded {len(matrices)} mixing matrices from {path}")
        return cls(matrices, label=path.stem)
