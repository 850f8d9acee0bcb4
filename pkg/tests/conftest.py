import hypothesis
import numpy as np
import pytest

from ppocp.core import Polyhedron

hypothesis.settings.register_profile(
    "suite", max_examples=25, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("suite")


TRIANGLE = [[2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]
SEGMENT_THROUGH_ORIGIN = [[-1.0, 0.0], [1.0, 0.0]]
COLLINEAR_PAIR = [[1.0, 0.0], [2.0, 0.0]]
LINE_POINTS = [[-1.0], [1.0], [5.0]]
SINGLE_POINT = [[3.0, 4.0]]


@pytest.fixture
def triangle():
    return Polyhedron(np.array(TRIANGLE))


def random_polyhedron(seed, max_m=12, max_n=8, box=5.0):
    """Vertices uniform in a box; mixed dimensions and counts."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    return Polyhedron(rng.uniform(-box, box, size=(m, n)))


def origin_inside_polyhedron(seed, max_m=12, max_n=8, box=5.0):
    """Hull containing the origin: one vertex closes a positive combination."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(2, max_m + 1))
    z = rng.uniform(-box, box, size=(m - 1, n))
    lam = rng.uniform(0.2, 1.0, size=m)
    closing = -(lam[1:] @ z) / lam[0]
    return Polyhedron(np.vstack([closing[None, :], z]))


def separated_polyhedron(seed, margin=0.5, max_m=12, max_n=8, box=5.0):
    """Hull strongly separated from the origin by at least ``margin``."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    z = rng.uniform(-box, box, size=(m, n))
    d = rng.normal(size=n)
    d /= np.linalg.norm(d)
    shift = margin - float(np.min(z @ d))
    return Polyhedron(z + shift * d)
