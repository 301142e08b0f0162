"""Exact PMF of a sum of independent discrete uniforms on integer ranges.

Each summand X_j is uniform on the 2 m_j + 1 integers in [-m_j, m_j].  With
M = prod_j 1 / (2 m_j + 1), the mass function of the sum at an integer p is

    g_n(p) = (M / 2^(n-1)) * sum_{k=0}^{floor((n-1)/2)}
                 (-1)^k B(n, k) / (n-2k-1)!
                 * sum_{eps in {-1,1}^n} (2p + sum_j (2 m_j + 1) eps_j)_+^(n-2k-1)
                                          * prod_j eps_j,

where y_+^e = y^e * tau(y) with tau(0) = 1/2, and B(n, k) is the coefficient
of x^(2k-n) in the Laurent expansion of (1 / sin x)^n.  An equivalent form
replaces tau by the sign function and 2^(n-1) by 2^n.  The inner vertex
arguments are integers with the parity of n, so for odd n they are never
zero and the two step conventions trivially agree; for even n the agreement
follows from the vanishing of the unweighted alternating sums.

Everything here is computed in exact rational arithmetic: the inputs are
integers, the Laurent coefficients are rationals, and the alternating
structure makes floating point useless at these sizes.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterable

from .errors import CapacityError, N_MAX

__all__ = [
    "DiscreteComponent",
    "DiscreteSum",
    "csc_coefficient",
    "csc_coefficient_table",
    "pmf_n2_closed",
]


# ---------------------------------------------------------------------------
# Laurent coefficients of (1 / sin x)^n
# ---------------------------------------------------------------------------

_coeff_lock = threading.Lock()


@lru_cache(maxsize=None)
def _csc_coefficient(n: int, k: int) -> Fraction:
    comb = math.comb
    total = Fraction(0)
    for m in range(2 * k + 1):
        inner = sum((-1) ** r * comb(m, r) * (2 * r - m) ** (2 * k + m)
                    for r in range(m + 1))
        total += Fraction(n, n + m) * comb(2 * k, m) \
            * Fraction(inner, 2 ** m * math.factorial(2 * k + m))
    return (-1) ** k * comb(n + 2 * k, n) * total


def csc_coefficient(n: int, k: int) -> Fraction:
    """Coefficient of x^(2k-n) in the Laurent expansion of (1/sin x)^n.

    Computed by the explicit finite triple sum

        B(n, k) = (-1)^k C(n+2k, n) sum_{m=0}^{2k} [n/(n+m)] C(2k, m)
                  / (2^m (2k+m)!) * sum_{r=0}^{m} (-1)^r C(m, r) (2r-m)^(2k+m)

    whose internal alternating sign makes the result the plain series
    coefficient (B(n, 0) = 1, B(1, 1) = 1/6, ...).  Values are memoized; the
    lock makes concurrent first computations observe one consistent value.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    with _coeff_lock:
        return _csc_coefficient(n, k)


def csc_coefficient_table(n_max: int, k_max: int) -> Dict[tuple, Fraction]:
    """Materialize {(n, k): B(n, k)} for 1 <= n <= n_max, 0 <= k <= k_max."""
    return {(n, k): csc_coefficient(n, k)
            for n in range(1, n_max + 1) for k in range(k_max + 1)}


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteComponent:
    """Uniform on the integers in [-m, m].  m = 0 is a point mass at 0."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, int) or isinstance(self.m, bool):
            raise ValueError(f"m must be an integer, got {self.m!r}")
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")

    @property
    def count(self) -> int:
        return 2 * self.m + 1


@dataclass(frozen=True)
class DiscreteSum:
    """Sum of n independent discrete uniforms on [-m_j, m_j]."""

    components: tuple

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, DiscreteComponent) else DiscreteComponent(c)
            for c in self.components
        )
        object.__setattr__(self, "components", comps)
        if len(comps) < 1:
            raise ValueError("a sum needs at least one component")
        if len(comps) > N_MAX:
            raise CapacityError(
                f"{len(comps)} components would need 2**{len(comps)} vertex terms "
                f"(limit N_MAX={N_MAX})"
            )

    @classmethod
    def from_half_ranges(cls, ms: Iterable[int]) -> "DiscreteSum":
        return cls(tuple(DiscreteComponent(m) for m in ms))

    @property
    def n(self) -> int:
        return len(self.components)

    @cached_property
    def mass_norm(self) -> Fraction:
        """M = prod_j 1 / (2 m_j + 1), the mass of one lattice point."""
        return Fraction(1, math.prod(c.count for c in self.components))

    @cached_property
    def span(self) -> int:
        """Largest attainable |sum|: the PMF vanishes for |p| > span."""
        return sum(c.m for c in self.components)

    def support(self) -> tuple:
        return (-self.span, self.span)

    # -- vertex power sums --------------------------------------------------

    def _power_sums(self, p: int, signed: bool) -> list:
        """S_k = sum over sign vectors of w(arg) * arg^(n-2k-1) * parity.

        arg = 2p + sum_j (2 m_j + 1) eps_j, an integer of the parity of n.
        With signed=False the weight is tau(arg) (the arg = 0, exponent = 0
        combination cannot occur: exponent 0 needs odd n, whose arguments
        are odd); with signed=True the weight is sign(arg).  Gray-code
        enumeration keeps the per-vertex update O(1).
        """
        n = self.n
        legs = [2 * c.count for c in self.components]
        arg = 2 * p - sum(c.count for c in self.components)
        exps = [n - 2 * k - 1 for k in range((n - 1) // 2 + 1)]
        sums = [0] * len(exps)
        rho = -1 if n % 2 else 1
        mask = 0
        for i in range(1 << n):
            if i:
                bit = i & -i
                j = bit.bit_length() - 1
                mask ^= bit
                arg = arg + legs[j] if mask & bit else arg - legs[j]
                rho = -rho
            if arg > 0:
                for idx, e in enumerate(exps):
                    sums[idx] += rho * arg ** e
            elif arg < 0 and signed:
                for idx, e in enumerate(exps):
                    sums[idx] -= rho * arg ** e
            # arg == 0: tau weight multiplies arg^e = 0 (e >= 1 when n even),
            # and sign(0) = 0, so nothing contributes either way
        return sums

    def _combine(self, sums: list, pow2: int) -> Fraction:
        n = self.n
        total = Fraction(0)
        for k, s in enumerate(sums):
            if s:
                e = n - 2 * k - 1
                total += (-1) ** k * csc_coefficient(n, k) \
                    * Fraction(s, math.factorial(e))
        return self.mass_norm / 2 ** pow2 * total

    # -- public operations ---------------------------------------------------

    def pmf_tau(self, p: int) -> Fraction:
        """P(S = p) via the step-function form, as an exact rational."""
        return self._combine(self._power_sums(int(p), signed=False), self.n - 1)

    def pmf_sign(self, p: int) -> Fraction:
        """P(S = p) via the sign-function form; equals pmf_tau exactly."""
        return self._combine(self._power_sums(int(p), signed=True), self.n)

    def pmf_full(self) -> Dict[int, Fraction]:
        """The whole PMF on [-span, span]; values sum to exactly 1."""
        return {p: self.pmf_tau(p) for p in range(-self.span, self.span + 1)}


def pmf_n2_closed(m1: int, m2: int, p: int) -> Fraction:
    """Two-component PMF in closed form:

        g_2(p) = (M/2) (|p + m1 + m2 + 1| - |p + m1 - m2|
                        - |p - m1 + m2| + |p - m1 - m2 - 1|).

    Equals DiscreteSum.from_half_ranges([m1, m2]).pmf_tau(p) for every
    integer p.
    """
    for name, m in (("m1", m1), ("m2", m2)):
        if not isinstance(m, int) or isinstance(m, bool) or m < 0:
            raise ValueError(f"{name} must be a nonnegative integer, got {m!r}")
    M = Fraction(1, (2 * m1 + 1) * (2 * m2 + 1))
    return M * Fraction(
        abs(p + m1 + m2 + 1) - abs(p + m1 - m2) - abs(p - m1 + m2)
        + abs(p - m1 - m2 - 1),
        2,
    )
