"""Penalized least-squares change-point detection.

`pelt_changepoints` minimizes sum of within-segment squared deviations plus
penalty * (number of change-points), exactly, with candidate pruning that
keeps the optimum intact. `changepoints_exhaustive` is the same dynamic
program without pruning and exists as an independent check: the two must
agree index-for-index on every input.

A change-point at index i means a new segment starts at i (0 and n are
never reported).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ChangePointSet:
    indices: tuple[int, ...]
    penalty: float

    def __post_init__(self) -> None:
        if any(b >= a for a, b in zip(self.indices[1:], self.indices)):
            raise ValidationError("change-point indices must be strictly increasing")


def default_penalty(values: Sequence[float]) -> float:
    """2 * sigma^2 * log(n), with sigma^2 estimated from first differences."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 2:
        raise ValidationError("need at least 2 values to estimate a penalty")
    diffs = np.diff(x)
    sigma2 = float(np.mean(diffs**2) / 2.0)
    return max(2.0 * sigma2 * math.log(n), 1e-8)


def _check_series(values: Sequence[float], penalty: float | None) -> tuple[np.ndarray, float]:
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValidationError("change-point detection needs a 1-D series of length >= 2")
    pen = default_penalty(x) if penalty is None else float(penalty)
    if pen <= 0:
        raise ValidationError(f"penalty must be > 0, got {pen}")
    return x, pen


def _prefix_sums(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.concatenate(([0.0], np.cumsum(x)))
    s2 = np.concatenate(([0.0], np.cumsum(x * x)))
    return s, s2


def _segment_costs(s: np.ndarray, s2: np.ndarray, starts: np.ndarray, end: int) -> np.ndarray:
    """Sum of squared deviations from the mean for segments [start, end)."""
    lengths = end - starts
    sums = s[end] - s[starts]
    return (s2[end] - s2[starts]) - sums * sums / lengths


def _backtrack(prev: np.ndarray, n: int) -> tuple[int, ...]:
    cps: list[int] = []
    t = n
    while t > 0:
        start = int(prev[t])
        if start > 0:
            cps.append(start)
        t = start
    return tuple(reversed(cps))


def changepoints_exhaustive(values: Sequence[float], penalty: float | None = None) -> ChangePointSet:
    """The unpruned O(n^2) dynamic program; independent of the PELT path."""
    x, pen = _check_series(values, penalty)
    n = len(x)
    s, s2 = _prefix_sums(x)
    f = np.empty(n + 1)
    f[0] = -pen
    prev = np.zeros(n + 1, dtype=int)
    for t in range(1, n + 1):
        starts = np.arange(t)
        candidates = f[:t] + _segment_costs(s, s2, starts, t) + pen
        best = int(np.argmin(candidates))
        f[t] = candidates[best]
        prev[t] = best
    return ChangePointSet(indices=_backtrack(prev, n), penalty=pen)


def pelt_changepoints(values: Sequence[float], penalty: float | None = None) -> ChangePointSet:
    """Exact penalized optimum with pruning of provably dominated candidates.

    Output is identical to `changepoints_exhaustive` (pruning uses <=, so
    tied candidates survive and the smallest start index wins ties in both).
    """
    x, pen = _check_series(values, penalty)
    n = len(x)
    s, s2 = _prefix_sums(x)
    f = np.empty(n + 1)
    f[0] = -pen
    prev = np.zeros(n + 1, dtype=int)
    candidates = np.array([0], dtype=int)
    for t in range(1, n + 1):
        costs = f[candidates] + _segment_costs(s, s2, candidates, t) + pen
        best = int(np.argmin(costs))
        f[t] = costs[best]
        prev[t] = int(candidates[best])
        # tiny slack so float noise never prunes a candidate the real-valued
        # dominance argument would keep
        slack = 1e-9 + 1e-12 * abs(f[t])
        keep = (costs - pen) <= f[t] + slack
        candidates = np.append(candidates[keep], t)
    return ChangePointSet(indices=_backtrack(prev, n), penalty=pen)
