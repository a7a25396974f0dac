import numpy as np
import pytest

# Fixed seeds for statistical tests: a test passes if the property holds on
# at least 2 of the 3 seeds, which bounds the flake rate while keeping the
# tests sensitive to real distributional bugs.
STAT_SEEDS = (101, 202, 303)


def majority(outcomes) -> bool:
    outcomes = list(outcomes)
    assert len(outcomes) == len(STAT_SEEDS)
    return sum(bool(v) for v in outcomes) >= 2


class ConstantRng:
    """Stand-in generator returning a fixed uniform value / zero words."""

    def __init__(self, value: float = 0.5):
        self.value = value

    def random(self, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def integers(self, low, high, size=None, dtype=None):
        return np.zeros(size, dtype=dtype)

    def permutation(self, n):
        return np.arange(n)


@pytest.fixture
def constant_rng():
    return ConstantRng
