"""Deterministic numerical primitives used across the toolkit.

Standard-normal CDF/quantile, exact fair-coin binomial tails, the
chi-square(1) survival function, keyed reproducible random streams, and
the integer rounding policies applied when real-valued sample sizes are
converted to patient counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ValidationError

__all__ = [
    "normal_cdf",
    "normal_quantile",
    "exact_binomial_two_sided",
    "chi_square1_sf",
    "RoundingPolicy",
    "RngStream",
    "check_probability",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def check_probability(value: float, name: str = "probability") -> float:
    """Validate that ``value`` lies in [0, 1] and return it."""
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{name} must be a real number, got {value!r}", field=name)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}", field=name)
    return float(value)


def normal_cdf(z: float) -> float:
    """Standard-normal CDF, accurate to double precision in both tails."""
    return 0.5 * math.erfc(-z / _SQRT2)


# Acklam's rational approximation to the standard-normal quantile.
# Raw accuracy ~1.15e-9; two Halley refinements against normal_cdf push
# the error to a few ulps, well inside the 1e-9 contract.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((( _C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
               (((( _D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return ((((( _A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
           ((((( _B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def _refine(x: float, p: float) -> float:
    # One Halley step: exact Newton direction with curvature correction.
    err = normal_cdf(x) - p
    u = err * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def normal_quantile(p: float) -> float:
    """Inverse standard-normal CDF on the open interval (0, 1).

    Absolute error is bounded by 1e-9 (in practice a few ulps).  Values
    at or outside the interval endpoints raise ValidationError.
    """
    check_probability(p, "p")
    if p <= 0.0 or p >= 1.0:
        raise ValidationError(f"quantile requires 0 < p < 1, got {p!r}", field="p")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        # 1 - p is exact for p >= 0.5, so reflection costs no accuracy.
        return -normal_quantile(1.0 - p)
    x = _acklam(p)
    x = _refine(x, p)
    x = _refine(x, p)
    return x


def exact_binomial_two_sided(b: int, n: int) -> float:
    """Two-sided exact p-value for ``b`` successes in ``n`` fair-coin trials.

    Doubles the smaller tail (sum of exact binomial(n, 1/2) terms) and
    clips at 1.  ``n = 0`` carries no information and returns 1.0.
    """
    if b < 0 or n < 0 or b > n:
        raise ValidationError(f"require 0 <= b <= n, got b={b}, n={n}")
    if n == 0:
        return 1.0
    lower = sum(math.comb(n, i) for i in range(0, b + 1))
    upper = sum(math.comb(n, i) for i in range(b, n + 1))
    # Integer arithmetic throughout; a single division at the end.
    p = 2 * min(lower, upper) / (1 << n)
    return min(1.0, p)


def chi_square1_sf(x: float) -> float:
    """Survival function of the chi-square distribution with 1 df.

    P(X > x) = 2(1 - Phi(sqrt(x))) = erfc(sqrt(x/2)).
    """
    if math.isnan(x) or x < 0.0:
        raise ValidationError(f"chi-square argument must be >= 0, got {x!r}", field="x")
    return math.erfc(math.sqrt(0.5 * x))


class RoundingPolicy(str, Enum):
    """How real-valued sizes become integer patient counts.

    Applied only at the final conversion; ``ceil_per_arm`` (the default
    everywhere) rounds each arm up independently and totals are sums.
    """

    CEIL_PER_ARM = "ceil_per_arm"
    NEAREST = "nearest"
    FLOOR = "floor"

    def round(self, x: float) -> int:
        if x < 0:
            raise ValidationError(f"cannot round negative count {x!r}")
        x = _snap_integer(x)
        if self is RoundingPolicy.CEIL_PER_ARM:
            return math.ceil(x)
        if self is RoundingPolicy.NEAREST:
            return math.floor(x + 0.5)
        return math.floor(x)


def _snap_integer(x: float, rel_tol: float = 1e-9) -> float:
    # Products like n * cr * w can land 1 ulp off an exact integer; without
    # snapping, ceil would charge a whole extra patient for float noise.
    r = round(x)
    if abs(x - r) <= rel_tol * max(1.0, abs(x)):
        return float(r)
    return x


_U64 = 1 << 64


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream keyed by (master_seed, stream_index).

    Backed by the counter-based Philox generator: the two key words are
    the seed and the stream index, so identical keys replay identical
    sequences and distinct indices give independent streams regardless
    of scheduling.  Substreams use Philox jumps and are likewise
    independent.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < _U64:
                raise ValidationError(f"{name} must be a 64-bit unsigned integer, got {v!r}",
                                      field=name)

    def generator(self, substream: int = 0) -> np.random.Generator:
        """A fresh numpy Generator positioned at the start of ``substream``."""
        if not isinstance(substream, int) or substream < 0:
            raise ValidationError(f"substream must be a non-negative integer, got {substream!r}")
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        bitgen = np.random.Philox(key=key)
        if substream:
            bitgen = bitgen.jumped(substream)
        return np.random.Generator(bitgen)

    def spawn(self, stream_index: int) -> "RngStream":
        """A sibling stream under the same master seed."""
        return RngStream(self.master_seed, stream_index)
