import os

import hypothesis
import numpy as np
import pytest

from dpogd.problem import ProblemSpec, ProblemStream, SlotData, StaticStream
from dpogd.prox import NonsmoothSpec

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: long-running acceptance checks (deselect with -m 'not slow')")


def make_slot(C, y, lam: float = 0.0, sigma: float = 0.0) -> SlotData:
    """Slot data from nested lists, C of shape (N, d, n) and y of shape (N, d)."""
    return SlotData(C=np.asarray(C, dtype=float), y=np.asarray(y, dtype=float), lam=lam, sigma=sigma)


@pytest.fixture
def two_node_slot() -> SlotData:
    """f^1 = (x - 1)^2, f^2 = (x - 3)^2 on the real line."""
    return make_slot([[[1.0]], [[1.0]]], [[1.0], [3.0]])


@pytest.fixture
def two_node_stream(two_node_slot: SlotData) -> StaticStream:
    return StaticStream(two_node_slot, horizon=3, nonsmooth=NonsmoothSpec())


@pytest.fixture
def small_spec() -> ProblemSpec:
    return ProblemSpec(N=4, d=2, n=6, sparsity=2)


@pytest.fixture
def small_stream(small_spec: ProblemSpec) -> ProblemStream:
    return ProblemStream(small_spec, horizon=60, seed=3)
