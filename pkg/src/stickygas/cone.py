"""The cone of nondecreasing maps in weighted L2 and its metric projection.

A map on the grid is an ``n``-vector; it lies in the cone iff it is
nondecreasing. The metric projection is weighted isotonic regression,
computed by pool-adjacent-violators (PAVA).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numba
import numpy as np

from .grid import GridMeasure

BRUTEFORCE_MAX_N = 14


@dataclass(frozen=True)
class MonotoneMap:
    """Nondecreasing values plus the consecutive blocks they were pooled from.

    ``block_starts`` holds the first index of every block; block ``b`` spans
    ``block_starts[b]:block_starts[b+1]`` (the last one runs to ``n``).
    """

    values: np.ndarray
    block_starts: np.ndarray

    @classmethod
    def from_values(cls, values) -> "MonotoneMap":
        values = np.asarray(values, dtype=float)
        if np.any(values[1:] < values[:-1]):
            raise ValueError("values are not nondecreasing")
        return cls(values, np.arange(values.size))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def blocks(self) -> list[range]:
        ends = list(self.block_starts[1:]) + [self.n]
        return [range(int(s), int(e)) for s, e in zip(self.block_starts, ends)]

    def block_ids(self) -> np.ndarray:
        """Block index of every cell."""
        ids = np.zeros(self.n, dtype=np.int64)
        ids[self.block_starts[1:]] = 1
        return np.cumsum(ids)


@dataclass(frozen=True)
class ProjectionResult:
    map: MonotoneMap
    residual: np.ndarray


@numba.njit(cache=True, nogil=True)
def _pava(y, w):
    n = y.size
    sw = np.empty(n)
    swy = np.empty(n)
    val = np.empty(n)
    start = np.empty(n, dtype=np.int64)
    top = -1
    for i in range(n):
        top += 1
        sw[top] = w[i]
        swy[top] = w[i] * y[i]
        val[top] = y[i]
        start[top] = i
        # merge only on strict violation, exact comparison
        while top > 0 and val[top - 1] > val[top]:
            sw[top - 1] += sw[top]
            swy[top - 1] += swy[top]
            val[top - 1] = swy[top - 1] / sw[top - 1]
            top -= 1
    out = np.empty(n)
    for b in range(top + 1):
        end = start[b + 1] if b < top else n
        for i in range(start[b], end):
            out[i] = val[b]
    return out, start[: top + 1].copy()


def _check_vector(y, g: GridMeasure) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=float)
    if y.shape != (g.n,):
        raise ValueError(f"expected a vector of length {g.n}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("cannot project a non-finite vector")
    return y


def project(y, g: GridMeasure) -> ProjectionResult:
    """Metric projection of ``y`` onto the nondecreasing cone (O(n) PAVA)."""
    y = _check_vector(y, g)
    values, starts = _pava(y, np.ascontiguousarray(g.weights))
    return ProjectionResult(MonotoneMap(values, starts), y - values)


def project_bruteforce(y, g: GridMeasure) -> ProjectionResult:
    """Projection by enumerating all 2**(n-1) consecutive-block partitions.

    Each block gets its weighted mean; non-monotone candidates are dropped and
    the cheapest feasible one wins. Exponential, meant as a test oracle.
    """
    y = _check_vector(y, g)
    n = y.size
    if n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute-force projection limited to n <= {BRUTEFORCE_MAX_N}")
    w = g.weights.tolist()
    yl = y.tolist()
    # weighted mean and cost of every candidate block [s, e)
    mean = {}
    cost = {}
    for s in range(n):
        for e in range(s + 1, n + 1):
            ws = sum(w[s:e])
            mu = sum(wi * yi for wi, yi in zip(w[s:e], yl[s:e])) / ws
            mean[s, e] = mu
            cost[s, e] = sum(wi * (yi - mu) ** 2 for wi, yi in zip(w[s:e], yl[s:e]))
    best = None
    for cuts in itertools.product((False, True), repeat=n - 1):
        bounds = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [n]
        spans = list(zip(bounds, bounds[1:]))
        means = [mean[sp] for sp in spans]
        if any(a > b for a, b in zip(means, means[1:])):
            continue
        total = sum(cost[sp] for sp in spans)
        if best is None or total < best[0]:
            best = (total, bounds[:-1], means)
    _, starts, means = best
    z = np.repeat(means, np.diff(starts + [n]))
    return ProjectionResult(MonotoneMap(z, np.asarray(starts, dtype=np.int64)), y - z)


def tangent_membership(w, x: MonotoneMap) -> bool:
    """Whether ``w`` lies in the tangent cone of the monotone cone at ``x``.

    ``w`` must be nondecreasing across every adjacent pair where ``x`` is
    flat (in particular inside each pooled block); where ``x`` strictly
    increases it is unconstrained.
    """
    w = np.asarray(w, dtype=float)
    flat = np.diff(x.values) == 0
    return bool(np.all(np.diff(w)[flat] >= 0))
