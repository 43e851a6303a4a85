"""Shapiro-Wilk normality test, Royston's 1995 approximation (AS R94).

Valid for sample sizes 3..5000. The W statistic uses Blom-score-based
coefficients with polynomial corrections for the two largest weights; the
p-value comes from a normalizing transformation of W (log-based for
n >= 12, loglog-based for 4 <= n <= 11, exact arcsin form for n = 3).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr, ndtri

from ..errors import ConstantInputError, NOutOfRangeError

# Polynomial coefficients, low order first.
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -2.0322e-3)
_C5 = (-1.5861, -0.31082, -0.083751, 3.8915e-3)
_C6 = (-0.4803, -0.082676, 3.0302e-3)
_GAMMA = (-2.273, 0.459)

_PI6 = 6.0 / math.pi
_STQR = math.asin(math.sqrt(0.75))


def _poly(coeffs, value):
    total = 0.0
    for c in reversed(coeffs):
        total = total * value + c
    return total


def shapiro_wilk_w(x) -> tuple[float, float]:
    """Return (W, p) for the sample x.

    Raises NOutOfRangeError outside 3 <= n <= 5000 and ConstantInputError
    when the sample has zero range.
    """
    data = np.sort(np.asarray(x, dtype=np.float64))
    n = data.size
    if n < 3 or n > 5000:
        raise NOutOfRangeError(f"shapiro_wilk requires 3 <= n <= 5000, got n={n}")
    if data[0] == data[-1]:
        raise ConstantInputError("shapiro_wilk requires a non-constant sample")

    m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    m_sq = float(np.dot(m, m))
    rsn = 1.0 / math.sqrt(n)
    a = np.empty(n, dtype=np.float64)

    if n == 3:
        a[0] = math.sqrt(0.5)
        a[1] = 0.0
        a[2] = -a[0]
    else:
        a_n = _poly(_C1, rsn) + m[-1] / math.sqrt(m_sq)
        if n > 5:
            a_n1 = _poly(_C2, rsn) + m[-2] / math.sqrt(m_sq)
            lower = 2
            phi = (m_sq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
                1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2
            )
            a[-2] = a_n1
            a[1] = -a_n1
        else:
            lower = 1
            phi = (m_sq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
        a[-1] = a_n
        a[0] = -a_n
        middle = slice(lower, n - lower)
        a[middle] = m[middle] / math.sqrt(phi)

    mean = float(data.mean())
    centered = data - mean
    sse = float(np.dot(centered, centered))
    w_num = float(np.dot(a, data)) ** 2
    w = min(w_num / sse, 1.0)

    if n == 3:
        p = _PI6 * (math.asin(math.sqrt(w)) - _STQR)
        p = min(max(p, 0.0), 1.0)
        return w, p

    if n <= 11:
        gamma = _GAMMA[0] + _GAMMA[1] * n
        if gamma - math.log1p(-w) <= 0.0:
            # w is so close to 1 the transform degenerates; report p = 1.
            return w, 1.0
        w_transformed = -math.log(gamma - math.log1p(-w))
        mu = _poly(_C3, float(n))
        sigma = math.exp(_poly(_C4, float(n)))
    else:
        w_transformed = math.log1p(-w)
        log_n = math.log(float(n))
        mu = _poly(_C5, log_n)
        sigma = math.exp(_poly(_C6, log_n))

    z = (w_transformed - mu) / sigma
    p = float(1.0 - ndtr(z))
    return w, min(max(p, 0.0), 1.0)
