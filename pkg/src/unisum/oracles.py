"""Independent ground-truth generators for validating the closed forms.

Nothing in this module calls the formula code it is used to check: the
discrete oracle counts lattice points, the continuous oracle convolves
sampled boxes numerically, the series oracle manipulates truncated power
series, and the sampler just draws and adds uniforms.  The test suite (and
the CLI `verify` command) compares these against the vertex-sum formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

from .contsum import ContinuousSum
from .discsum import DiscreteSum
from .errors import CapacityError

__all__ = [
    "EvenSeries",
    "csc_series_oracle",
    "discrete_conv_oracle",
    "continuous_conv_oracle",
    "sample_sum",
    "ks_statistic",
    "ks_critical_1pct",
    "DISCRETE_ORACLE_CAP",
]

# Largest prod_j (2 m_j + 1) the lattice-count oracle will attempt.
DISCRETE_ORACLE_CAP = 10 ** 7


# ---------------------------------------------------------------------------
# Truncated even power series over the rationals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvenSeries:
    """A truncated even power series sum_k c_k x^(2k), exact coefficients.

    Arithmetic is exact up to the truncation order; coefficients beyond it
    are dropped (truncation, never rounding).
    """

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", tuple(Fraction(c) for c in self.coefficients)
        )
        if not self.coefficients:
            raise ValueError("a series needs at least the constant coefficient")

    @property
    def truncation_order(self) -> int:
        return len(self.coefficients) - 1

    def multiply(self, other: "EvenSeries") -> "EvenSeries":
        K = min(self.truncation_order, other.truncation_order)
        a, b = self.coefficients, other.coefficients
        out = [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(K + 1)]
        return EvenSeries(tuple(out))

    def reciprocal(self) -> "EvenSeries":
        """Solve self * r = 1 coefficient by coefficient (constant term != 0)."""
        a = self.coefficients
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        K = self.truncation_order
        r: List[Fraction] = [Fraction(1) / a[0]]
        for k in range(1, K + 1):
            acc = sum(a[i] * r[k - i] for i in range(1, k + 1))
            r.append(-acc / a[0])
        return EvenSeries(tuple(r))

    def power(self, n: int) -> "EvenSeries":
        if n < 0:
            raise ValueError("power expects n >= 0")
        out = EvenSeries((Fraction(1),) + (Fraction(0),) * self.truncation_order)
        for _ in range(n):
            out = out.multiply(self)
        return out


def csc_series_oracle(n: int, K: int) -> List[Fraction]:
    """First K+1 Laurent coefficients of (1/sin x)^n, by series arithmetic.

    Expands s(x) = sin(x)/x = sum_r (-1)^r x^(2r) / (2r+1)!, inverts it by
    the standard recurrence and raises to the n-th power by repeated
    multiplication.  Since (1/sin x)^n = x^(-n) (x/sin x)^n, the even-series
    coefficients of s^(-n) are exactly the wanted Laurent coefficients.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if K < 0:
        raise ValueError("K must be >= 0")
    sinc = EvenSeries(tuple(
        Fraction((-1) ** r, math.factorial(2 * r + 1)) for r in range(K + 1)
    ))
    return list(sinc.reciprocal().power(n).coefficients)


# ---------------------------------------------------------------------------
# Brute-force convolutions
# ---------------------------------------------------------------------------

def discrete_conv_oracle(dsum: DiscreteSum) -> Dict[int, Fraction]:
    """Exact PMF of the discrete sum by direct lattice counting.

    Convolves the component counting measures one at a time and divides by
    the total number of lattice points at the end, so all intermediate
    arithmetic is on integers.
    """
    total_points = math.prod(c.count for c in dsum.components)
    if total_points > DISCRETE_ORACLE_CAP:
        raise CapacityError(
            f"lattice has {total_points} points, oracle cap is {DISCRETE_ORACLE_CAP}"
        )
    counts = {0: 1}
    for comp in dsum.components:
        new: Dict[int, int] = {}
        for value, cnt in counts.items():
            for d in range(-comp.m, comp.m + 1):
                new[value + d] = new.get(value + d, 0) + cnt
        counts = new
    return {p: Fraction(cnt, total_points) for p, cnt in sorted(counts.items())}


def continuous_conv_oracle(csum: ContinuousSum, grid_step: float):
    """Numerical density of the continuous sum on a uniform grid.

    Each component box is discretized onto cells of width grid_step anchored
    at its lower edge; the sample for a cell is the box mass inside it over
    the step (the trapezoid-style half weight appears when a cell straddles
    a jump), attributed to the cell center.  The sampled components are then
    convolved directly.  Box edges land on cell boundaries whenever the box
    width is a multiple of the step, so aligned kinks of the result are
    reproduced cleanly; accuracy is O(grid_step^2) away from the kinks and
    first order within a cell of one, so comparisons should skip those
    neighborhoods.

    Returns (grid, values) as float arrays; grid point k sits at
    sum_j lo_j + (k + n/2) * grid_step.
    """
    h = float(grid_step)
    if not h > 0:
        raise ValueError(f"grid_step must be > 0, got {grid_step!r}")
    vals = None
    start = 0.0
    for comp in csum.components:
        lo = float(comp.lo)
        width = 2.0 * float(comp.half_width)
        ncells = int(math.ceil(width / h)) + 1
        edges = lo + h * np.arange(ncells + 1)
        left = np.maximum(edges[:-1], lo)
        right = np.minimum(edges[1:], lo + width)
        cover = np.clip(right - left, 0.0, None) / h
        sample = cover / width
        start += lo
        vals = sample if vals is None else np.convolve(vals, sample) * h
    grid = start + h * (np.arange(len(vals)) + csum.n / 2.0)
    return grid, vals


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def sample_sum(csum: ContinuousSum, count: int, seed: int) -> np.ndarray:
    """Draw `count` independent realizations of the sum, reproducibly.

    The seed fixes the stream: equal (csum, count, seed) give equal output.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    total = np.zeros(count)
    for comp in csum.components:
        total += rng.uniform(float(comp.lo), float(comp.hi), size=count)
    return total


def ks_statistic(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov sup distance between samples and a reference CDF."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("need at least one sample")
    F = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, n + 1)
    return float(max((i / n - F).max(), (F - (i - 1) / n).max()))


def ks_critical_1pct(count: int) -> float:
    """Asymptotic 1% critical value 1.63 / sqrt(count) for the KS statistic."""
    return 1.63 / math.sqrt(count)
