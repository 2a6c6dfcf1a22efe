"""Exact lattice-point counts in the half-box [0, 1/2)^k and its slabs.

A point of the 1/n lattice inside the box is an integer vector b in
[0, (n-1)/2]^k (n odd, so b/n never reaches 1/2).  Counts are plain
integers; the only floating point is the cosine sum, evaluated with the
shared table and the same compensated order as :func:`spectra.tau`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DEFAULT_BUDGET, check_modulus, half
from .density import box_volume
from .errors import BadInterval, BudgetExceeded, DimensionMismatch, ValidationError
from .spectra import compensated_sum, cos_table, neumaier_add


@dataclass(frozen=True)
class RegionSpec:
    k: int
    interval: Optional[tuple[float, float]] = None
    distinct_coords: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be positive (got {self.k})")
        if self.interval is not None:
            c, d = self.interval
            if not c <= d:
                raise BadInterval(f"empty interval [{c}, {d}]")
            object.__setattr__(self, "interval", (float(c), float(d)))


def in_region(x, region: RegionSpec) -> bool:
    x = np.asarray(x, dtype=float).ravel()
    if len(x) != region.k:
        raise DimensionMismatch(f"point has {len(x)} coordinates, region has k={region.k}")
    if np.any(x < 0.0) or np.any(x >= 0.5):
        return False
    if region.distinct_coords and len(set(x.tolist())) < len(x):
        return False
    if region.interval is not None:
        c, d = region.interval
        s = float(compensated_sum(np.cos(2.0 * np.pi * x)))
        return c <= s <= d
    return True


def closed_form_count(n: int, k: int, distinct: bool = False) -> int:
    """#Omega_n (or its distinct-coordinate part) with no interval constraint."""
    side = half(n) + 1
    if distinct:
        return math.perm(side, k)
    return side**k


def _grid_blocks(values: np.ndarray, k: int):
    """Yield (prefix, sums) covering [0, len(values))^k in row-major order.

    ``sums`` is the compensated cosine sum over the prefix followed by the
    last coordinate (k == 1) or the last two coordinates as a matrix.
    """
    side = len(values)
    if k == 1:
        yield (), values.copy()
        return
    for prefix in itertools.product(range(side), repeat=k - 2):
        if prefix:
            s, comp = values[prefix[0]], 0.0
            for i in prefix[1:]:
                s, comp = neumaier_add(s, comp, values[i])
            s, comp = neumaier_add(s, comp, values[:, None])
            s, comp = neumaier_add(s, comp, values[None, :])
            yield prefix, s + comp
        else:
            # two-term compensated sum rounds back to the plain sum
            yield prefix, values[:, None] + values[None, :]


def _distinct_mask(prefix, side: int, k: int):
    """Mask over the trailing block selecting vectors with all-distinct entries."""
    if len(set(prefix)) < len(prefix):
        return None
    idx = np.arange(side)
    ok = np.ones(side, dtype=bool)
    ok[list(prefix)] = False
    if k == 1:
        return ok
    mask = ok[:, None] & ok[None, :]
    mask &= idx[:, None] != idx[None, :]
    return mask


def count_lattice(n: int, region: RegionSpec, budget: int = DEFAULT_BUDGET) -> int:
    """Exact #Omega_n(I) (or #Omega'_n(I) when ``distinct_coords``)."""
    n = check_modulus(n)
    k = region.k
    side = half(n) + 1
    if region.interval is None:
        return closed_form_count(n, k, region.distinct_coords)
    if side**k > budget:
        raise BudgetExceeded(f"{side}^{k} lattice points for n={n} exceed budget {budget}")
    values = cos_table(n)[:side]
    c, d = region.interval
    total = 0
    for prefix, sums in _grid_blocks(values, k):
        hit = (sums >= c) & (sums <= d)
        if region.distinct_coords:
            mask = _distinct_mask(prefix, side, k)
            if mask is None:
                continue
            hit &= mask
        total += int(np.count_nonzero(hit))
    return total


@dataclass
class ShiftReport:
    n: int
    k: int
    interval: tuple[float, float]
    enlarged: tuple[float, float]
    checked: int = 0
    box_exits: int = 0
    counterexample: Optional[tuple[int, ...]] = None
    max_move: float = 0.0

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def shift_check(n: int, k: int, interval, budget: int = DEFAULT_BUDGET) -> ShiftReport:
    """Shift every point of Omega_n(I) by (1/n, ..., 1/n) and test the slab.

    The shifted cosine sum must land in [c - 2 pi k/n, d + 2 pi k/n].  Points
    with a coordinate b_i = (n-1)/2 step out of the half-open box; those are
    tallied in ``box_exits`` and do not count as failures, since the cosine
    sum is unchanged by folding (b+1)/n back to (n-b-1)/n.
    """
    n = check_modulus(n)
    c, d = float(interval[0]), float(interval[1])
    if not c <= d:
        raise BadInterval(f"empty interval [{c}, {d}]")
    side = half(n) + 1
    if side**k > budget:
        raise BudgetExceeded(f"{side}^{k} lattice points for n={n} exceed budget {budget}")
    slack = 2.0 * math.pi * k / n
    report = ShiftReport(n, k, (c, d), (c - slack, d + slack))
    table = cos_table(n)
    base = table[:side]
    shifted = table[1 : side + 1]
    lo, hi = report.enlarged
    for (prefix, s0), (_, s1) in zip(_grid_blocks(base, k), _grid_blocks(shifted, k)):
        hit = (s0 >= c) & (s0 <= d)
        cnt = int(np.count_nonzero(hit))
        if not cnt:
            continue
        report.checked += cnt
        report.max_move = max(report.max_move, float(np.max(np.abs(s1 - s0)[hit])))
        # box exits: some coordinate equals side-1
        at_edge = (side - 1) in prefix
        if k == 1:
            edge = np.arange(side) == side - 1
        else:
            last = np.arange(side) == side - 1
            edge = last[:, None] | last[None, :]
        report.box_exits += cnt if at_edge else int(np.count_nonzero(hit & edge))
        bad = hit & ((s1 < lo) | (s1 > hi))
        if report.counterexample is None and np.any(bad):
            tail = np.unravel_index(int(np.flatnonzero(bad.ravel())[0]), bad.shape)
            report.counterexample = tuple(prefix) + tuple(int(t) for t in tail)
    return report


def volume_count_gap(n: int, k: int, interval, tolerance: float = 1e-10) -> float:
    """|#Omega_n(I)/n^k - Vol(B_k(I))|."""
    c, d = interval
    count = count_lattice(n, RegionSpec(k, (c, d)))
    vol = box_volume(k, max(c, -k), min(d, k), tolerance).value
    return abs(count / n**k - vol)
