"""Independent reference implementations the tests check against.

Everything here is deliberately brute force (series evaluation, bisection,
exact rational summation, quadrature) and shares no code with the package.
"""

from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy import stats
from scipy.integrate import quad

mp.mp.dps = 40


def normal_cdf_oracle(z) -> mp.mpf:
    return 0.5 * mp.erfc(-mp.mpf(z) / mp.sqrt(2))


def normal_quantile_oracle(p) -> float:
    """Bisection against the high-precision erf-series CDF."""
    target = mp.mpf(p)
    lo, hi = mp.mpf(-40), mp.mpf(40)
    for _ in range(200):
        mid = (lo + hi) / 2
        if normal_cdf_oracle(mid) < target:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def binomial_two_sided_oracle(b: int, n: int) -> float:
    """Exact two-sided fair-coin tail via a Pascal-row of Fractions."""
    if n == 0:
        return 1.0
    row = [Fraction(1)]
    for _ in range(n):
        row = [a + c for a, c in zip([Fraction(0)] + row, row + [Fraction(0)])]
    total = Fraction(2) ** n
    lower = sum(row[: b + 1]) / total
    upper = sum(row[b:]) / total
    return float(min(Fraction(1), 2 * min(lower, upper)))


def chi_square1_sf_oracle(x) -> float:
    return float(2 * (1 - normal_cdf_oracle(mp.sqrt(mp.mpf(x)))))


def two_proportion_sample_size(p1: float, p0: float, alpha: float, power: float,
                               k: float, margin: float = 0.0) -> float:
    """Classical one-sided two-proportion total sample size (unpooled variance).

    Control-arm size solves the power equation with n_treat = k * n_control;
    returns the real-valued total.
    """
    z = stats.norm.ppf(1 - alpha) + stats.norm.ppf(power)
    effect = abs(p1 - p0)
    n_control = z ** 2 * (p1 * (1 - p1) / k + p0 * (1 - p0)) / (effect - margin) ** 2
    return n_control * (1 + k)


def bivariate_top_fraction_overlap(rho: float, q: float) -> float:
    """P(Z1 > h | Z2 > h) for standard bivariate normals with correlation rho,
    h the (1-q) quantile, via 1-D quadrature of the conditional tail."""
    h = stats.norm.ppf(1 - q)
    if rho == 0.0:
        return q
    scale = np.sqrt(1 - rho ** 2)
    upper, _ = quad(lambda x: stats.norm.pdf(x) * stats.norm.sf((h - rho * x) / scale),
                    h, np.inf)
    return upper / q
