"""Shared generators for seeded random models and hypothesis strategies."""

import math
import random
from fractions import Fraction

from hypothesis import strategies as st

from unisum import ContinuousSum, DiscreteSum


def rational(rng: random.Random, lo, hi, max_den: int = 8) -> Fraction:
    """A random rational in [lo, hi] with a small denominator."""
    den = rng.randint(1, max_den)
    lo_n = math.ceil(Fraction(lo) * den)
    hi_n = math.floor(Fraction(hi) * den)
    return Fraction(rng.randint(lo_n, hi_n), den)


def random_continuous(rng: random.Random, n: int, c_range=(-8, 8),
                      a_range=(Fraction(1, 8), 6)) -> ContinuousSum:
    pairs = []
    for _ in range(n):
        c = rational(rng, *c_range)
        a = rational(rng, *a_range)
        pairs.append((c, a))
    return ContinuousSum.from_pairs(pairs)


def random_x(rng: random.Random, csum: ContinuousSum, slack=Fraction(1)) -> Fraction:
    lo, hi = csum.support()
    return rational(rng, lo - slack, hi + slack, max_den=16)


def discrete_panel(seed: int, size: int, n_max: int = 6, m_max: int = 5):
    """A fixed panel of discrete sums, reproducible from the seed."""
    rng = random.Random(seed)
    panel = []
    for _ in range(size):
        n = rng.randint(1, n_max)
        panel.append(DiscreteSum.from_half_ranges(
            [rng.randint(0, m_max) for _ in range(n)]))
    return panel


# hypothesis strategies ------------------------------------------------------

centers = st.fractions(min_value=-5, max_value=5, max_denominator=8)
widths = st.fractions(min_value=Fraction(1, 8), max_value=5, max_denominator=8)
points = st.fractions(min_value=-40, max_value=40, max_denominator=16)


def component_lists(max_n: int = 6):
    return st.lists(st.tuples(centers, widths), min_size=1, max_size=max_n)


def half_range_lists(max_n: int = 6, m_max: int = 4):
    return st.lists(st.integers(min_value=0, max_value=m_max),
                    min_size=1, max_size=max_n)
