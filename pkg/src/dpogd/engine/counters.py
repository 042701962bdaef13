from collections import defaultdict


def gradient_cost(N: int, d: int, n: int) -> float:
    """C_i x, C_i^T r and the l2 term for every node."""
    return N * (4.0 * d * n + 3.0 * n)


def consensus_cost(N: int, n: int) -> float:
    """One dense mixing step A z on an (N, n) stack."""
    return 2.0 * N * N * n


def prox_cost(rows: int, n: int) -> float:
    """Soft threshold plus radial projection per row."""
    return rows * 5.0 * n


def solve_cost(n: int) -> float:
    """Cholesky factorization and two triangular solves of an n x n system."""
    return n**3 / 3.0 + 2.0 * n**2


class OperationCounter:
    """
    Accumulates operation counts per category and per update.

    An update is one DP-OGD iteration, or one centralized step of a baseline.
    """

    def __init__(self) -> None:
        self.flops: dict[str, float] = defaultdict(float)
        self.updates: dict[str, int] = defaultdict(int)

    def add(self, category: str, flops: float) -> None:
        """Charge `flops` operations to a category."""
        self.flops[category] += flops

    def finish_update(self, algorithm: str) -> None:
        """Mark the end of one update of an algorithm."""
        self.updates[algorithm] += 1

    def total(self, *categories: str) -> float:
        """Sum over the given categories (all when none are given)."""
        keys = categories or tuple(self.flops)
        return sum(self.flops.get(key, 0.0) for key in keys)

    def per_update(self, algorithm: str, *categories: str) -> float:
        """
        Average work per update of an algorithm.

        Args:
            algorithm: Algorithm whose update count divides the total.
            *categories: Categories to include (default: all).

        Returns:
            float: Operations per update, 0 when no update was recorded.
        """
        count = self.updates.get(algorithm, 0)
        return self.total(*categories) / count if count else 0.0

    def __repr__(self) -> str:
        parts = ", ".join(f"{key}={value:.3g}" for key, value in sorted(self.flops.items()))
        return f"{self.__class__.__name__}({parts})"
