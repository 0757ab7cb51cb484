"""Shared network fixtures."""

import numpy as np
import pytest

from src.generators import barbell, complete, example2, random_bridged, random_network, ring
from src.models import SocialNetwork


@pytest.fixture
def dyad() -> SocialNetwork:
    """Two agents that always average."""
    return complete(2)


@pytest.fixture
def forceful_dyad() -> SocialNetwork:
    """Agent 1 always influences agent 0 (alpha = 1, eps = 1/2); pi_bar = (1/3, 2/3)."""
    return complete(2, forceful=[(0, 1, 1.0)])


@pytest.fixture
def example2a() -> SocialNetwork:
    return example2("a")


@pytest.fixture
def example2b() -> SocialNetwork:
    return example2("b")


@pytest.fixture
def bridge_barbell() -> SocialNetwork:
    """Two triangles joined by {2, 3}; agent 3 influences agent 2 over the bridge."""
    return barbell(3, 0, forceful=[(2, 3, 0.5)])


@pytest.fixture
def ring6() -> SocialNetwork:
    return ring(6)


@pytest.fixture
def random_networks():
    """Random valid networks with disjoint forceful edges, n in [3, 12]."""
    rng = np.random.default_rng(2024)
    return [
        random_network(int(rng.integers(3, 13)), seed=s, forceful_pairs=int(rng.integers(1, 4)))
        for s in range(100)
    ]


@pytest.fixture
def bridged_networks():
    return [random_bridged(3 + s % 4, 2 + s % 5, seed=s) for s in range(20)]


def directed_cycle(n: int = 3) -> SocialNetwork:
    meeting = np.roll(np.eye(n), 1, axis=1)
    return SocialNetwork(n=n, epsilon=0.5, meeting=meeting, alpha=np.zeros((n, n)),
                         beta=meeting.copy(), gamma=np.zeros((n, n)))
