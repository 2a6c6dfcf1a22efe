"""Character-sum spectra of circulant Cayley graphs.

All cosine sums go through one symmetric table per modulus and one
compensated (Neumaier) accumulation order, so scalar and vectorised code
paths return bit-identical floats.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .core import CayleySpec, GeneratorTuple, check_modulus, half
from .errors import BadInterval, JOutOfRange, MOutOfRange, TooLarge

DENSE_LIMIT = 4096


@functools.lru_cache(maxsize=64)
def cos_table(n: int) -> np.ndarray:
    """cos(2 pi j / n) for j in [0, n), with table[j] == table[n-j] exactly."""
    n = check_modulus(n)
    h = half(n)
    j = np.arange(h + 1)
    first = np.cos(2.0 * np.pi * j / n)
    table = np.empty(n)
    table[: h + 1] = first
    table[h + 1 :] = first[1:][::-1]
    table[0] = 1.0
    table.flags.writeable = False
    return table


def neumaier_add(s, comp, x):
    """One step of Neumaier summation; works elementwise with broadcasting."""
    t = s + x
    comp = comp + np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, comp


def compensated_sum(terms):
    """Neumaier sum of ``terms`` in the given order.

    Every term may be a scalar or an array; shapes broadcast.  For one or two
    terms the result equals the plain floating-point sum.
    """
    it = iter(terms)
    s = np.asarray(next(it), dtype=float)
    comp = np.zeros_like(s)
    for x in it:
        s, comp = neumaier_add(s, comp, np.asarray(x, dtype=float))
    return s + comp


def _check_m(n: int, m: int) -> None:
    if not 0 <= m <= n - 1:
        raise MOutOfRange(f"m={m} outside [0, {n - 1}]")


def tau(t: GeneratorTuple, m: int) -> float:
    """sum_i cos(2 pi m a_i / n)."""
    _check_m(t.n, m)
    table = cos_table(t.n)
    return float(compensated_sum([table[(m * a) % t.n] for a in t.a]))


def eigenvalue(spec: CayleySpec, m: int) -> float:
    tv = tau(spec.tuple, m)
    return 1.0 + 2.0 * tv if spec.includes_zero else 2.0 * tv


def tau_values(n: int, a: np.ndarray, m) -> np.ndarray:
    """Vectorised tau: ``a`` is a (..., k) generator array, ``m`` broadcasts."""
    table = cos_table(n)
    a = np.asarray(a)
    idx = (np.asarray(m)[..., None] * a) % n
    vals = table[idx]
    return compensated_sum(vals[..., i] for i in range(a.shape[-1]))


@dataclass(frozen=True)
class SpectrumMultiset:
    """Eigenvalues indexed by character index m (so values[0] == r)."""

    values: np.ndarray
    r: int

    @property
    def n(self) -> int:
        return len(self.values)

    def sorted(self) -> np.ndarray:
        return np.sort(self.values)

    def __len__(self):
        return len(self.values)


def spectrum(spec: CayleySpec) -> SpectrumMultiset:
    n = spec.n
    tv = tau_values(n, np.asarray(spec.tuple.a), np.arange(n))
    lam = 1.0 + 2.0 * tv if spec.includes_zero else 2.0 * tv
    lam.flags.writeable = False
    return SpectrumMultiset(lam, spec.r)


def adjacency_matrix(spec: CayleySpec) -> np.ndarray:
    """A[g, h] = 1 iff (g - h) mod n lies in S; a loop gives diagonal entry 1."""
    n = spec.n
    row = np.zeros(n, dtype=np.int8)
    row[list(spec.connection_set)] = 1
    g = np.arange(n)
    return row[(g[:, None] - g[None, :]) % n]


def spectrum_via_matrix(spec: CayleySpec) -> np.ndarray:
    """Sorted eigenvalues of the dense adjacency matrix (LAPACK ``eigvalsh``)."""
    if spec.n > DENSE_LIMIT:
        raise TooLarge(f"n={spec.n} exceeds dense eigensolver guard {DENSE_LIMIT}")
    return np.linalg.eigvalsh(adjacency_matrix(spec).astype(float))


@dataclass(frozen=True)
class IntervalPair:
    """Eigenvalue interval J and cosine-sum interval I for degree r.

    ``I`` follows the parity rule literally and may stick out below -k when r
    is odd; ``I_clamped`` is its intersection with [-k, k], which is what
    masses and counts consume.  Membership is equivalent for both.
    """

    J: tuple[float, float]
    I: tuple[float, float]
    r: int

    @property
    def k(self) -> int:
        return self.r // 2

    @property
    def I_clamped(self) -> tuple[float, float]:
        c, d = self.I
        return max(c, -self.k), min(d, self.k)


def interval_map(J, r: int) -> IntervalPair:
    a, b = float(J[0]), float(J[1])
    if r < 2:
        raise JOutOfRange(f"degree r must be at least 2 (got {r})")
    if not a <= b:
        raise BadInterval(f"empty interval [{a}, {b}]")
    if a < -r or b > r:
        raise JOutOfRange(f"J=[{a}, {b}] not inside [-{r}, {r}]")
    if r % 2 == 0:
        I = (a / 2.0, b / 2.0)
    else:
        I = ((a - 1.0) / 2.0, (b - 1.0) / 2.0)
    return IntervalPair((a, b), I, r)
