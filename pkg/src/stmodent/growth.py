"""Weight totals, log-log growth fits and partition counts."""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from functools import reduce

from .algebra import GradedAlgebra, poincare_series as algebra_series


class GrowthError(ValueError):
    pass


def weight_totals(table, n: int) -> int:
    """C(n) = Σ_s entry(s, n).

    Over a connected algebra with no degree-0 generators Ext^{s,t} vanishes
    for s > t, so the sum is complete once s_max >= n.
    """
    if n > table.t_max or n < 0:
        raise GrowthError(f"n={n} outside the window t<={table.t_max}")
    if table.s_max < n:
        raise GrowthError(f"s_max={table.s_max} too small to total weight {n}")
    return table.total(n)


def poincare_series(obj, t_max: int | None = None) -> list[int]:
    """Coefficients of Σ dim_t x^t for an algebra, a module or an Ext table (summed over s)."""
    if isinstance(obj, GradedAlgebra):
        out = algebra_series(obj)
    elif hasattr(obj, "entries"):
        top = obj.t_max if t_max is None else t_max
        out = [0] * (top + 1)
        for (s, t), d in obj.entries.items():
            if 0 <= t <= top:
                out[t] += d
        return out
    else:
        degs = obj.degrees
        lo = min(degs, default=0)
        if lo < 0:
            raise GrowthError("series with negative degrees; twist first")
        out = [0] * (max(degs, default=0) + 1)
        for d in degs:
            out[d] += 1
    if t_max is not None:
        out = (out + [0] * (t_max + 1))[: t_max + 1]
    return out


@dataclass
class GrowthFit:
    samples: list
    slope: float
    intercept: float
    residual: float
    window: tuple
    used: int
    zeros_excluded: int

    def to_json(self) -> str:
        doc = {
            "n": [n for n, _ in self.samples],
            "C": [c for _, c in self.samples],
            "slope": self.slope,
            "residual": self.residual,
            "window": list(self.window),
        }
        return json.dumps(doc, sort_keys=True)


def growth_fit(samples, window: tuple | None = None, min_points: int = 8) -> GrowthFit:
    """Least-squares slope of log C(n) against log n.

    The default window is the top half [n_max/2, n_max] of the sampled n.
    Samples with C(n) = 0 (or n <= 0) are excluded and counted.
    """
    samples = sorted((int(n), c) for n, c in samples)
    if not samples:
        raise GrowthError("no samples")
    if window is None:
        n_max = samples[-1][0]
        window = (n_max // 2, n_max)
    lo, hi = window
    inside = [(n, c) for n, c in samples if lo <= n <= hi]
    pos = [(n, c) for n, c in inside if c > 0 and n > 0]
    zeros = len(inside) - len(pos)
    if len(pos) < min_points:
        raise GrowthError(f"only {len(pos)} positive samples in window {window}, need {min_points}")
    xs = [math.log(n) for n, _ in pos]
    ys = [math.log(c) for _, c in pos]
    slope, intercept = statistics.linear_regression(xs, ys)
    res = math.sqrt(sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys)) / len(xs))
    return GrowthFit(samples, slope, intercept, res, (lo, hi), len(pos), zeros)


def partition_count(W, n: int) -> tuple[int, float | None]:
    """Number of partitions of n into parts from W, and the leading asymptote
    (∏ a)^{-1} n^{k-1} / (k-1)! when gcd(W) = 1 (None otherwise)."""
    W = sorted(set(int(w) for w in W))
    if not W or W[0] <= 0:
        raise GrowthError("W must be a nonempty set of positive integers")
    if n < 0:
        return 0, None
    ways = [1] + [0] * n
    for a in W:
        for m in range(a, n + 1):
            ways[m] += ways[m - a]
    exact = ways[n]
    if reduce(math.gcd, W) != 1:
        return exact, None
    k = len(W)
    asym = n ** (k - 1) / (math.prod(W) * math.factorial(k - 1))
    return exact, asym


def partition_asymptote(W, n: int) -> float:
    exact, asym = partition_count(W, n)
    if asym is None:
        raise GrowthError("asymptote needs gcd(W) = 1")
    return asym


def faulhaber_ratio(d: int, n: int) -> float:
    """Σ_{k<=n} k^d / n^{d+1}, which tends to 1/(d+1)."""
    return sum(k ** d for k in range(1, n + 1)) / n ** (d + 1)
