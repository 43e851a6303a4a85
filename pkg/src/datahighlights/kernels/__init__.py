"""Statistical kernels used by the detectors.

Each kernel is a pure function over numeric sequences returning a
KernelResult (raw statistic, p-value where defined, sample size). The
O(n^2) pair loops (Kendall pair counting, Mann-Kendall S, dominance
comparison) are dispatched to a compiled extension when it was built,
with a pure-Python fallback selected at import time. Both backends
produce exact integer counts, so results are identical either way.

Set DATAHIGHLIGHTS_PURE_KERNELS=1 to force the fallback (used by the
benchmark and the backend-parity tests).
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import ndtr, stdtr

from ..errors import (
    ConstantInputError,
    AllTiedError,
    InsufficientDataError,
    KernelError,
    LengthMismatchError,
    ZeroRangeError,
)
from .shapiro import shapiro_wilk_w

_FORCE_PURE = os.environ.get("DATAHIGHLIGHTS_PURE_KERNELS", "") not in ("", "0")
if _FORCE_PURE:
    from . import _pair_py as _pair

    _BACKEND_NAME = "pure-python"
else:
    try:
        from . import _pair_cy as _pair  # type: ignore[attr-defined]

        _BACKEND_NAME = "compiled"
    except ImportError:
        from . import _pair_py as _pair

        _BACKEND_NAME = "pure-python"


def kernel_backend() -> str:
    """Name of the active pair-loop backend: 'compiled' or 'pure-python'."""
    return _BACKEND_NAME


@dataclass(frozen=True)
class KernelResult:
    statistic: float
    p_value: float | None
    n: int


@dataclass(frozen=True)
class TrendTestResult(KernelResult):
    """Mann-Kendall output: statistic is S, z is the normalized score."""

    z: float = 0.0


# ---------------------------------------------------------------------------
# backend adapters
# ---------------------------------------------------------------------------


def pair_counts(x: Sequence[float], y: Sequence[float]):
    """(concordant, discordant, ties in x, ties in y, ties in both) over i<j."""
    if _BACKEND_NAME == "compiled":
        ax = np.ascontiguousarray(x, dtype=np.float64)
        ay = np.ascontiguousarray(y, dtype=np.float64)
        return _pair.kendall_pair_counts(ax, ay)
    return _pair.kendall_pair_counts([float(v) for v in x], [float(v) for v in y])


def mann_kendall_s_statistic(x: Sequence[float]) -> int:
    if _BACKEND_NAME == "compiled":
        return int(_pair.mann_kendall_s(np.ascontiguousarray(x, dtype=np.float64)))
    return _pair.mann_kendall_s([float(v) for v in x])


def dominance_counts(values, present) -> list[list[int]]:
    """Strict-domination 0/1 matrix over grid rows (see detectors.dominance).

    `values` and `present` are row-major rectangular grids; absent cells
    may hold any value, only `present` gates comparison.
    """
    n = len(values)
    if n == 0:
        return []
    if _BACKEND_NAME == "compiled":
        v = np.ascontiguousarray(values, dtype=np.float64)
        p = np.ascontiguousarray(present, dtype=np.uint8)
        out = np.zeros((n, n), dtype=np.uint8)
        _pair.dominance_matrix(v, p, out)
        return out.tolist()
    rows = [[float(c) for c in row] for row in values]
    mask = [[bool(c) for c in row] for row in present]
    return _pair.dominance_matrix(rows, mask)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _as_float_array(x, name="input") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise KernelError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise KernelError(f"{name} contains non-finite values")
    return arr


def _check_pair(x, y, min_n):
    ax = _as_float_array(x, "x")
    ay = _as_float_array(y, "y")
    if ax.size != ay.size:
        raise LengthMismatchError(f"length mismatch: {ax.size} vs {ay.size}")
    if ax.size < min_n:
        raise InsufficientDataError(f"need n >= {min_n}, got n={ax.size}")
    return ax, ay


def _clamp_unit(value: float) -> float:
    return min(max(value, -1.0), 1.0)


def _t_two_sided_p(r: float, n: int) -> float:
    """Two-sided p for a correlation r via the t approximation, n-2 dof."""
    if abs(r) >= 1.0:
        return 0.0
    df = n - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    return float(2.0 * stdtr(df, -abs(t)))


def _normal_two_sided_p(z: float) -> float:
    return float(2.0 * (1.0 - ndtr(abs(z))))


@lru_cache(maxsize=None)
def _inversion_counts(n: int) -> tuple[int, ...]:
    """Number of permutations of n items per inversion count (Mahonian row)."""
    poly = [1]
    for i in range(2, n + 1):
        out = [0] * (len(poly) + i - 1)
        for k, c in enumerate(poly):
            for j in range(i):
                out[k + j] += c
        poly = out
    return tuple(poly)


def _exact_s_two_sided_p(n: int, s: int) -> float:
    """P(|S'| >= |s|) for S' of a uniformly random untied permutation."""
    counts = _inversion_counts(n)
    pairs = n * (n - 1) // 2
    hits = sum(c for k, c in enumerate(counts) if abs(pairs - 2 * k) >= abs(s))
    return hits / math.factorial(n)


def _tie_group_sizes(values: np.ndarray) -> list[int]:
    return [count for count in Counter(values.tolist()).values() if count > 1]


# ---------------------------------------------------------------------------
# correlation kernels
# ---------------------------------------------------------------------------


def pearson(x, y) -> KernelResult:
    """Sample Pearson r with a two-sided t-approximation p-value (n-2 dof)."""
    ax, ay = _check_pair(x, y, min_n=3)
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise ConstantInputError("pearson requires both inputs non-constant")
    r = _clamp_unit(float(np.dot(dx, dy)) / math.sqrt(sxx * syy))
    return KernelResult(r, _t_two_sided_p(r, ax.size), int(ax.size))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tie groups assigned their mean rank."""
    n = values.size
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> KernelResult:
    """Spearman rho: Pearson over average ranks (ties get the mean rank)."""
    ax, ay = _check_pair(x, y, min_n=3)
    result = pearson(_average_ranks(ax), _average_ranks(ay))
    return KernelResult(result.statistic, result.p_value, int(ax.size))


def kendall_tau(x, y) -> KernelResult:
    """Kendall tau-b with tie correction.

    p-value: exact enumeration over the permutation null when the inputs
    are untied and n < 10, otherwise a normal approximation of S with
    tie-corrected variance.
    """
    ax, ay = _check_pair(x, y, min_n=3)
    n = int(ax.size)
    concordant, discordant, ties_x, ties_y, ties_xy = pair_counts(ax, ay)
    pairs = n * (n - 1) // 2
    denom_x = pairs - (ties_x + ties_xy)
    denom_y = pairs - (ties_y + ties_xy)
    if denom_x == 0 or denom_y == 0:
        raise AllTiedError("kendall_tau requires at least one untied pair per input")
    s = concordant - discordant
    tau = _clamp_unit(s / math.sqrt(denom_x * denom_y))

    has_ties = (ties_x + ties_y + ties_xy) > 0
    if not has_ties and n < 10:
        p = _exact_s_two_sided_p(n, s)
    else:
        tx = _tie_group_sizes(ax)
        ty = _tie_group_sizes(ay)
        v0 = n * (n - 1) * (2 * n + 5)
        vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
        vu = sum(u * (u - 1) * (2 * u + 5) for u in ty)
        v1 = (
            sum(t * (t - 1) for t in tx)
            * sum(u * (u - 1) for u in ty)
            / (2.0 * n * (n - 1))
        )
        v2 = (
            sum(t * (t - 1) * (t - 2) for t in tx)
            * sum(u * (u - 1) * (u - 2) for u in ty)
            / (9.0 * n * (n - 1) * (n - 2))
        )
        var_s = (v0 - vt - vu) / 18.0 + v1 + v2
        if var_s <= 0.0:
            raise AllTiedError("degenerate tie structure")
        p = _normal_two_sided_p(s / math.sqrt(var_s))
    return KernelResult(tau, min(max(p, 0.0), 1.0), n)


# ---------------------------------------------------------------------------
# distribution kernels
# ---------------------------------------------------------------------------


def shapiro_wilk(x) -> KernelResult:
    """Shapiro-Wilk W and p (Royston AS R94), 3 <= n <= 5000."""
    arr = _as_float_array(x)
    w, p = shapiro_wilk_w(arr)
    return KernelResult(w, p, int(arr.size))


def _kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov series: 2 * sum (-1)^(k-1) exp(-2 k^2 lam^2)."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-12:
            break
    return min(max(total, 0.0), 1.0)


def ks_uniform(x) -> KernelResult:
    """Kolmogorov-Smirnov D against Uniform(min(x), max(x)), n >= 5.

    D is the maximum gap between the empirical CDF and the fitted uniform
    CDF; the p-value uses the asymptotic Kolmogorov series at sqrt(n)*D.
    """
    arr = _as_float_array(x)
    n = int(arr.size)
    if n < 5:
        raise InsufficientDataError(f"ks_uniform needs n >= 5, got n={n}")
    ordered = np.sort(arr)
    lo, hi = float(ordered[0]), float(ordered[-1])
    if lo == hi:
        raise ZeroRangeError("ks_uniform requires max(x) > min(x)")
    cdf = (ordered - lo) / (hi - lo)
    steps = np.arange(1, n + 1) / n
    d = float(np.max(np.maximum(np.abs(steps - cdf), np.abs(steps - 1.0 / n - cdf))))
    return KernelResult(d, _kolmogorov_sf(math.sqrt(n) * d), n)


# ---------------------------------------------------------------------------
# series kernels
# ---------------------------------------------------------------------------


def mann_kendall(values) -> TrendTestResult:
    """Mann-Kendall trend test over a series in axis order.

    S = sum over i<j of sign(x[j] - x[i]). The p-value is exact (full
    permutation null) for untied series with n <= 10, otherwise the
    normal approximation with tie-corrected variance and continuity
    correction. Constant series give S=0, z=0, p=1.
    """
    arr = _as_float_array(values)
    n = int(arr.size)
    if n < 3:
        raise InsufficientDataError(f"mann_kendall needs n >= 3, got n={n}")
    s = mann_kendall_s_statistic(arr)

    tie_sizes = _tie_group_sizes(arr)
    var_s = (
        n * (n - 1) * (2 * n + 5)
        - sum(q * (q - 1) * (2 * q + 5) for q in tie_sizes)
    ) / 18.0
    if var_s <= 0.0:
        return TrendTestResult(float(s), 1.0, n, z=0.0)
    if s > 0:
        z = (s - 1) / math.sqrt(var_s)
    elif s < 0:
        z = (s + 1) / math.sqrt(var_s)
    else:
        z = 0.0

    if not tie_sizes and n <= 10:
        p = _exact_s_two_sided_p(n, s)
    else:
        p = _normal_two_sided_p(z)
    return TrendTestResult(float(s), min(max(p, 0.0), 1.0), n, z=z)


def autocorrelation(values, lag: int) -> KernelResult:
    """Correlation between the series and its lag-shifted self.

    Computed as the Pearson coefficient of (x[:-lag], x[lag:]), so an
    exactly periodic series scores 1.0 at its period. Requires
    n >= 2*lag + 1.
    """
    if lag < 1:
        raise KernelError(f"lag must be positive, got {lag}")
    arr = _as_float_array(values)
    n = int(arr.size)
    if n < 2 * lag + 1:
        raise InsufficientDataError(
            f"autocorrelation at lag {lag} needs n >= {2 * lag + 1}, got n={n}"
        )
    if float(arr.min()) == float(arr.max()):
        raise ConstantInputError("autocorrelation requires a non-constant series")
    head = arr[:-lag]
    tail = arr[lag:]
    dh = head - head.mean()
    dt = tail - tail.mean()
    denom = math.sqrt(float(np.dot(dh, dh)) * float(np.dot(dt, dt)))
    if denom == 0.0:
        raise ConstantInputError("lagged slices are constant")
    r = _clamp_unit(float(np.dot(dh, dt)) / denom)
    return KernelResult(r, None, n)


def find_local_maxima(values) -> list[int]:
    """Indices of strict local maxima.

    Interior index i is a peak iff x[i] > both neighbors; an endpoint is a
    peak iff strictly greater than its single neighbor. Plateaus (equal
    neighbors) never produce a peak.
    """
    arr = _as_float_array(values)
    n = int(arr.size)
    if n < 3:
        raise InsufficientDataError(f"find_local_maxima needs n >= 3, got n={n}")
    peaks = []
    if arr[0] > arr[1]:
        peaks.append(0)
    for i in range(1, n - 1):
        if arr[i] > arr[i - 1] and arr[i] > arr[i + 1]:
            peaks.append(i)
    if arr[n - 1] > arr[n - 2]:
        peaks.append(n - 1)
    return peaks
