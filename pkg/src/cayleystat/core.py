"""Odd cyclic groups, generator tuples, m-slices and the folding map.

A circulant Cayley graph on Z/nZ (n odd) with symmetric connection set
S = T u (-T) [u {0}] is identified with the strictly increasing tuple
``a = (a_1 < ... < a_k)`` listing T inside [1, (n-1)/2].
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    EvenModulus,
    KTooLarge,
    MismatchedModulus,
    MOutOfRange,
    NotStrictlyIncreasing,
    OutOfRange,
    ValidationError,
    ZeroSlice,
)

#: default cap on tuple-slot evaluations for any single enumeration
DEFAULT_BUDGET = 500_000_000


def check_modulus(n: int) -> int:
    """Return ``n`` if it is a valid odd group order, raise otherwise."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValidationError(f"modulus must be an integer, got {n!r}")
    n = int(n)
    if n % 2 == 0:
        raise EvenModulus(f"modulus must be odd (got n={n})")
    if n <= 1:
        raise OutOfRange(f"modulus must exceed 1 (got n={n})")
    return n


def half(n: int) -> int:
    """(n-1)/2, the largest admissible generator."""
    return (n - 1) // 2


def check_k(n: int, k: int, *, allow_zero: bool = False) -> int:
    lo = 0 if allow_zero else 1
    if k < lo:
        raise KTooLarge(f"k must be at least {lo} (got k={k})")
    if k > half(n):
        raise KTooLarge(f"k={k} exceeds (n-1)/2={half(n)} for n={n}")
    return int(k)


@dataclass(frozen=True)
class GeneratorTuple:
    """A validated element of A_k(n)."""

    n: int
    a: tuple[int, ...]

    def __post_init__(self):
        check_modulus(self.n)
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if not a:
            raise KTooLarge("generator tuple must be non-empty")
        h = half(self.n)
        for x in a:
            if not 1 <= x <= h:
                raise OutOfRange(
                    f"generator out of range: {x} not in [1, {h}] for n={self.n}"
                )
        if any(x >= y for x, y in zip(a, a[1:])):
            raise NotStrictlyIncreasing(f"generators not strictly increasing: {a}")

    @property
    def k(self) -> int:
        return len(self.a)

    def __iter__(self):
        return iter(self.a)

    def __len__(self):
        return len(self.a)


def make_tuple(n: int, a: Sequence[int]) -> GeneratorTuple:
    return GeneratorTuple(n, tuple(a))


@dataclass(frozen=True)
class CayleySpec:
    """An r-regular circulant graph: generator tuple plus the optional 0 loop."""

    tuple: GeneratorTuple
    includes_zero: bool = False

    @classmethod
    def build(cls, n: int, a: Sequence[int], includes_zero: bool = False) -> "CayleySpec":
        return cls(make_tuple(n, a), bool(includes_zero))

    @property
    def n(self) -> int:
        return self.tuple.n

    @property
    def k(self) -> int:
        return self.tuple.k

    @property
    def r(self) -> int:
        return 2 * self.k + int(self.includes_zero)

    @property
    def connection_set(self) -> tuple[int, ...]:
        """S as sorted residues in [0, n)."""
        s = set(self.tuple.a) | {self.n - x for x in self.tuple.a}
        if self.includes_zero:
            s.add(0)
        return tuple(sorted(s))

    @property
    def is_connected(self) -> bool:
        return math.gcd(self.n, *self.tuple.a) == 1


def count_tuples(n: int, k: int) -> int:
    """#A_k(n) = C((n-1)/2, k) as an exact integer."""
    n = check_modulus(n)
    check_k(n, k, allow_zero=True)
    return math.comb(half(n), k)


def enumerate_tuples(n: int, k: int) -> Iterator[GeneratorTuple]:
    """Yield A_k(n) in lexicographic order."""
    n = check_modulus(n)
    check_k(n, k)
    for combo in itertools.combinations(range(1, half(n) + 1), k):
        yield GeneratorTuple(n, combo)


def tuple_array(n: int, k: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All of A_k(n) as a ``(C((n-1)/2,k), k)`` int64 array, lexicographic rows.

    Returns an empty ``(0, k)`` array when k > (n-1)/2 so that counts over an
    empty family come out as zero.
    """
    n = check_modulus(n)
    h = half(n)
    if k < 1:
        raise KTooLarge(f"k must be positive (got {k})")
    if k > h:
        return np.empty((0, k), dtype=np.int64)
    total = math.comb(h, k)
    if total * k > budget:
        raise BudgetExceeded(
            f"enumerating A_{k}({n}) needs {total * k} slots, budget {budget}"
        )
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(1, h + 1), k)),
        dtype=np.int64,
        count=total * k,
    )
    return flat.reshape(total, k)


@dataclass(frozen=True)
class SliceId:
    """Character index m with d = gcd(m, n), n = d*n1, m = d*m1."""

    n: int
    m: int
    d: int
    n1: int
    m1: int


def slice_params(n: int, m: int) -> SliceId:
    n = check_modulus(n)
    if not 0 <= m <= n - 1:
        raise MOutOfRange(f"m={m} outside [0, {n - 1}]")
    d = math.gcd(m, n)  # gcd(0, n) = n
    return SliceId(n, int(m), d, n // d, m // d)


class SliceClass(enum.Enum):
    PRIMED = "primed"
    DOUBLE_PRIMED = "double_primed"


def fold_residue(x: int, n1: int) -> int:
    """Representative of the class {x, -x} mod n1 inside [0, (n1-1)/2]."""
    r = x % n1
    return min(r, n1 - r)


def classify_tuple(t: GeneratorTuple, s: SliceId) -> SliceClass:
    if t.n != s.n:
        raise MismatchedModulus(f"tuple modulus {t.n} != slice modulus {s.n}")
    if s.m == 0:
        return SliceClass.DOUBLE_PRIMED
    classes = [fold_residue(a, s.n1) for a in t.a]
    if len(set(classes)) < len(classes):
        return SliceClass.DOUBLE_PRIMED
    return SliceClass.PRIMED


def kappa(x: float) -> float:
    """Fold the fractional part of x into [0, 1/2]; preserves cos(2 pi x)."""
    f = x - math.floor(x)
    return f if f <= 0.5 else 1.0 - f


@dataclass(frozen=True)
class LatticePoint:
    """Point (b_1/den, ..., b_k/den) with integer numerators in [0, (den-1)/2]."""

    numerators: tuple[int, ...]
    denominator: int

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(b, self.denominator) for b in self.numerators)

    def as_floats(self) -> np.ndarray:
        return np.asarray(self.numerators, dtype=float) / self.denominator

    @property
    def has_distinct_coords(self) -> bool:
        return len(set(self.numerators)) == len(self.numerators)


def lattice_point(t: GeneratorTuple, perm: Sequence[int], s: SliceId) -> LatticePoint:
    """Fold (m1 * a_perm(i) / n1) coordinatewise, exactly.

    ``perm`` is a 0-based permutation of ``range(k)``.
    """
    if t.n != s.n:
        raise MismatchedModulus(f"tuple modulus {t.n} != slice modulus {s.n}")
    if s.m == 0:
        raise ZeroSlice("the point map is undefined on the m=0 slice")
    if sorted(perm) != list(range(t.k)):
        raise ValidationError(f"{list(perm)} is not a permutation of range({t.k})")
    nums = tuple(fold_residue(s.m1 * t.a[i], s.n1) for i in perm)
    return LatticePoint(nums, s.n1)
