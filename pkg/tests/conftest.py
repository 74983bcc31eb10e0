import numpy as np
import pytest

from dispersim import LatticeState


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_lattice_state(rng, max_offset: int = 8, max_len: int = 12) -> LatticeState:
    offset = int(rng.integers(-max_offset, max_offset + 1))
    length = int(rng.integers(1, max_len + 1))
    vals = rng.normal(size=length) + 1j * rng.normal(size=length)
    return LatticeState(offset, vals)


def aligned_values(a: LatticeState, b: LatticeState):
    """Both states on the union window, for direct comparison."""
    lo = min(a.offset, b.offset)
    hi = max(a.last_site, b.last_site)
    return a.restrict(lo, hi).values, b.restrict(lo, hi).values
