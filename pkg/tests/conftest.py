import numpy as np
import pytest

from diffbounds import (
    AmplitudeSpec,
    DislocationSpec,
    PointSet,
    SiteDistribution,
    gaussian,
    lattice,
)


@pytest.fixture(scope="session")
def gauss1():
    return gaussian(1, 1.0)


@pytest.fixture(scope="session")
def gauss2():
    return gaussian(2, 1.0)


@pytest.fixture(scope="session")
def bernoulli():
    return AmplitudeSpec(
        default=SiteDistribution(
            values=np.array([1.0, -1.0], dtype=complex), probs=np.array([0.5, 0.5])
        )
    )


@pytest.fixture(scope="session")
def lattice9():
    return lattice(1, 1.0, 4.0)


def two_point_dislocations(dim: int, delta: float) -> DislocationSpec:
    if dim == 1:
        vals = np.array([[-delta], [delta]])
    else:
        vals = np.zeros((2, dim))
        vals[0, 0] = -delta
        vals[1, 0] = delta
    return DislocationSpec(
        dim=dim,
        delta=delta,
        default=SiteDistribution(values=vals, probs=np.array([0.5, 0.5])),
    )


def segment(n: int, spacing: float = 1.0) -> PointSet:
    """1-D lattice segment 0, spacing, ..., (n-1)*spacing with exactly n sites."""
    pts = (np.arange(n, dtype=float) * spacing).reshape(-1, 1)
    return PointSet(dim=1, points=pts, min_dist=spacing, label=f"segment-{n}")
