from enum import Enum
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from logzero import logger

from dpogd.exceptions import InsufficientHorizonError, InvalidNetworkError
from dpogd.types import BoolMatrix, RealMatrix

from .mixing import MixingMatrix


class DisseminationMode(str, Enum):
    """How update information travels between nodes."""

    SINGLE_HOP = "sh"  # every ordered pair needs a direct edge
    MULTI_HOP = "mh"  # time-respecting relaying is allowed


def _weights(matrix: MixingMatrix | RealMatrix) -> RealMatrix:
    return matrix.weights if isinstance(matrix, MixingMatrix) else np.asarray(matrix)


def support_graph(matrices: Iterable[MixingMatrix | RealMatrix], N: int) -> nx.Graph:
    """
    Undirected union graph of the off-diagonal supports of the given matrices.

    Args:
        matrices: Mixing matrices of a window.
        N: Number of nodes.

    Returns:
        nx.Graph: Graph on nodes 0..N-1 with an edge wherever some A^ij or A^ji > 0.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(N))
    for matrix in matrices:
        support = _weights(matrix) > 0.0
        np.fill_diagonal(support, False)
        graph.add_edges_from(zip(*np.nonzero(support)))
    return graph


def check_b_connectivity(matrices: Sequence[MixingMatrix | RealMatrix], B: int) -> bool:
    """
    Test that the union graph of every aligned window of B slots is connected.

    Args:
        matrices: Consecutive mixing matrices; their count must be a multiple of B.
        B: Window length.

    Returns:
        bool: True iff every window's undirected union support is connected.

    Raises:
        InvalidNetworkError: If B < 1, the sequence is empty or its length is
            not a multiple of B.
    """
    if B < 1 or not matrices or len(matrices) % B != 0:
        raise InvalidNetworkError(
            f"window of {len(matrices)} matrices is not a positive multiple of B={B}"
        )
    N = _weights(matrices[0]).shape[0]
    for start in range(0, len(matrices), B):
        if not nx.is_connected(support_graph(matrices[start : start + B], N)):
            logger.debug(f"Window starting at offset {start} is disconnected (B={B})")
            return False
    return True


def estimate_connectivity_window(
    matrices: Sequence[MixingMatrix | RealMatrix], max_B: int
) -> int | None:
    """
    Find the smallest B for which the sequence is B-connected.

    Only the longest prefix whose length is a multiple of B is tested.

    Args:
        matrices: Consecutive mixing matrices.
        max_B: Largest window to try.

    Returns:
        int | None: The smallest B <= max_B, or None when no window works.
    """
    for B in range(1, min(max_B, len(matrices)) + 1):
        usable = len(matrices) - len(matrices) % B
        if check_b_connectivity(matrices[:usable], B):
            return B
    return None


def dissemination_delay(
    matrices: Iterable[MixingMatrix | RealMatrix],
    mode: DisseminationMode | str,
) -> int:
    """
    Number of slots needed before every node has heard from every other node.

    Single-hop: smallest D such that every ordered pair (i, j) had a direct
    edge A^ij > 0 in some slot of [t0, t0 + D). Multi-hop: smallest D such that
    the time-respecting reachability R <- Adj_t R, started from R = I, is all
    true.

    Args:
        matrices: Mixing matrices from slot t0 onward (a generator is fine).
        mode: DisseminationMode or its value ("sh" / "mh").

    Returns:
        int: The delay D >= 1.

    Raises:
        InsufficientHorizonError: If the matrices run out before dissemination completes.
    """
    mode = DisseminationMode(mode)
    reach: BoolMatrix | None = None
    delay = 0
    for delay, matrix in enumerate(matrices, start=1):
        adjacency = _weights(matrix) > 0.0
        if reach is None:
            reach = np.eye(adjacency.shape[0], dtype=bool)
        if mode is DisseminationMode.SINGLE_HOP:
            reach |= adjacency
        else:
            np.fill_diagonal(adjacency, True)
            reach = (adjacency.astype(np.int64) @ reach.astype(np.int64)) > 0
        if reach.all():
            return delay
    raise InsufficientHorizonError(
        f"dissemination ({mode.value}) incomplete after {delay} supplied slots"
    )
