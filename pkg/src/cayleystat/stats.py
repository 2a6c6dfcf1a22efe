"""Exact spectral statistics over the family of circulant graphs of order n.

The family at height n is A_k(n) x [0, n): every generator tuple paired with
every character index m.  ``prob_exact`` counts this set directly;
``prob_fast`` replaces each slice by a lattice count grouped by gcd(m, n).
The remaining functions audit the counting identities that connect the two.
"""
from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .arith import divisor_count, divisors, totient
from .core import (
    DEFAULT_BUDGET,
    check_k,
    check_modulus,
    half,
    slice_params,
    tuple_array,
)
from .density import DEFAULT_TOLERANCE, cdf_values, conv_mass
from .errors import BadInterval, BudgetExceeded, MOutOfRange, ValidationError
from .lattice import RegionSpec, count_lattice
from .spectra import cos_table, interval_map, neumaier_add, tau_values

#: grid points with abs_error below this are left out of slope fits
NOISE_FLOOR = 1e-12

AUDIT_TAGS = ("slice_lift", "lattice_fibres", "slice_lattice")
# elements per block in the k >= 3 slice counter
_CUBE_ELEMS = 2_000_000


def bound_constant(k: int) -> int:
    """C_k = 4 C(k,2) 2^(k-1) + 1, the constant used for the S'' bounds."""
    return 4 * math.comb(k, 2) * 2 ** (k - 1) + 1


def _check_interval(interval) -> tuple[float, float]:
    c, d = float(interval[0]), float(interval[1])
    if not c <= d:
        raise BadInterval(f"empty interval [{c}, {d}]")
    return c, d


def _count_increasing(values: np.ndarray, k: int, c: float, d: float) -> int:
    """#{i_1 < ... < i_k : compensated sum of values[i_*] in [c, d]}."""
    h = len(values)
    if k > h:
        return 0
    if k == 1:
        return int(np.count_nonzero((values >= c) & (values <= d)))
    if k == 2:
        # two-term compensated sum rounds back to the plain sum, which is symmetric
        s = values[:, None] + values[None, :]
        hit = (s >= c) & (s <= d)
        return (int(np.count_nonzero(hit)) - int(np.count_nonzero(np.diagonal(hit)))) // 2
    # the last three coordinates are handled as blocks (rows i, then j, l past the
    # block start); terms are added in tuple order so every sum matches
    # spectra.tau bit for bit
    total = 0
    for prefix in itertools.combinations(range(h), k - 3):
        start = prefix[-1] + 1 if prefix else 0
        rest = values[start:]
        w = len(rest)
        if w < 3:
            continue
        head, head_comp = None, None
        if prefix:
            head, head_comp = values[prefix[0]], 0.0
            for i in prefix[1:]:
                head, head_comp = neumaier_add(head, head_comp, values[i])
        step = max(1, min(w // 8, _CUBE_ELEMS // (w * w)))
        for lo in range(0, w - 2, step):
            hi = min(lo + step, w - 2)
            tail = rest[lo + 1 :]
            first = rest[lo:hi, None, None]
            if prefix:
                s, comp = neumaier_add(head, head_comp, first)
            else:
                s, comp = first, 0.0
            s, comp = neumaier_add(s, comp, tail[None, :, None])
            s, comp = neumaier_add(s, comp, tail[None, None, :])
            sums = s + comp
            # positions: row i = lo + a, j = lo + 1 + b, l = lo + 1 + e; need i < j < l
            a = np.arange(hi - lo)[:, None, None]
            b = np.arange(len(tail))[None, :, None]
            e = np.arange(len(tail))[None, None, :]
            hit = (sums >= c) & (sums <= d) & (b >= a) & (e > b)
            total += int(np.count_nonzero(hit))
    return total


def count_slice(n: int, k: int, m: int, interval, budget: int = DEFAULT_BUDGET) -> int:
    """#{a in A_k(n) : tau_m(a) in I} by full enumeration of the slice."""
    n = check_modulus(n)
    check_k(n, k)
    if not 0 <= m <= n - 1:
        raise MOutOfRange(f"m={m} outside [0, {n - 1}]")
    c, d = _check_interval(interval)
    h = half(n)
    if math.comb(h, k) * k > budget:
        raise BudgetExceeded(f"slice of A_{k}({n}) exceeds budget {budget}")
    values = cos_table(n)[(m * np.arange(1, h + 1)) % n]
    return _count_increasing(values, k, c, d)


@dataclass
class SweepRecord:
    """One row of a probability experiment.

    ``count_in`` is the exact count for exact rows and the real-valued
    geometric estimate for fast rows.
    """

    n: int
    k: int
    r: int
    a: float
    b: float
    c: float
    d: float
    count_in: float
    count_total: int
    probability: float
    reference_mass: float
    abs_error: float
    method: str
    tolerance: float
    seed: int = 0
    m: Optional[int] = None
    exact_count: Optional[int] = None
    fast_count: Optional[float] = None
    fast_budget: Optional[int] = None
    slice_counts: Optional[list[int]] = field(default=None, repr=False)

    CSV_COLUMNS = ("n", "k", "r", "a", "b", "c", "d", "count_in", "count_total",
                   "probability", "reference_mass", "abs_error", "method",
                   "tolerance", "seed")

    def row(self) -> dict:
        return {col: getattr(self, col) for col in self.CSV_COLUMNS}


def _eigen_interval(k: int, c: float, d: float, odd: bool):
    r = 2 * k + int(odd)
    if odd:
        return r, 2 * c + 1, 2 * d + 1
    return r, 2 * c, 2 * d


def _reference(k, c, d, tolerance) -> float:
    lo, hi = max(c, -k), min(d, k)
    if lo > hi:
        return 0.0
    return conv_mass(k, lo, hi, tolerance).value


def prob_exact(n: int, k: int, interval, *, odd: bool = False, threads: int = 1,
               budget: int = DEFAULT_BUDGET, tolerance: float = DEFAULT_TOLERANCE,
               seed: int = 0) -> SweepRecord:
    """Exact Prob_I(n, k): pairs (tuple, m) with tau_m in I over all n*C((n-1)/2,k)."""
    n = check_modulus(n)
    check_k(n, k)
    c, d = _check_interval(interval)
    per_slice = math.comb(half(n), k)
    work = n * per_slice * k
    if work > budget:
        raise BudgetExceeded(f"n={n}, k={k}: {work} tuple-slot evaluations exceed budget {budget}")

    def one(m):
        return count_slice(n, k, m, (c, d), budget)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(one, range(n)))
    else:
        counts = [one(m) for m in range(n)]
    hits = sum(counts)
    total = n * per_slice
    prob = hits / total
    ref = _reference(k, c, d, tolerance)
    r, a, b = _eigen_interval(k, c, d, odd)
    return SweepRecord(n, k, r, a, b, c, d, hits, total, prob, ref, abs(prob - ref),
                       "exact/quadrature", tolerance, seed, exact_count=hits,
                       slice_counts=counts)


def fast_deviation_budget(n: int, k: int) -> int:
    """C_k d(n) n^k + C_k n^(k-1) sum_{d|n} d phi(n/d)."""
    ck = bound_constant(k)
    spread = sum(dd * totient(n // dd) for dd in divisors(n))
    return ck * divisor_count(n) * n**k + ck * n ** (k - 1) * spread


def prob_fast(n: int, k: int, interval, *, odd: bool = False,
              budget: int = DEFAULT_BUDGET, tolerance: float = DEFAULT_TOLERANCE,
              seed: int = 0) -> SweepRecord:
    """Geometric estimate: sum_{d|n} phi(n/d) ((d+1)/2)^k #Omega_{n/d}(I) / k!.

    Ignores the doubly-primed tuples and the lattice boundary, so it carries
    the deviation allowance ``fast_budget`` (in counts, not probability).
    """
    n = check_modulus(n)
    check_k(n, k)
    c, d = _check_interval(interval)
    numer = 0
    for dd in divisors(n):
        n1 = n // dd
        if n1 == 1:
            # the m = 0 slice: the only lattice point is the origin, cosine sum k
            lattice = int(c <= k <= d)
        else:
            lattice = count_lattice(n1, RegionSpec(k, (c, d)), budget)
        numer += totient(n1) * ((dd + 1) // 2) ** k * lattice
    fast = float(Fraction(numer, math.factorial(k)))
    total = n * math.comb(half(n), k)
    prob = fast / total
    ref = _reference(k, c, d, tolerance)
    r, a, b = _eigen_interval(k, c, d, odd)
    return SweepRecord(n, k, r, a, b, c, d, fast, total, prob, ref, abs(prob - ref),
                       "fast/quadrature", tolerance, seed, fast_count=fast,
                       fast_budget=fast_deviation_budget(n, k))


# --- the primed / doubly-primed split ---------------------------------------

@functools.lru_cache(maxsize=8)
def _tuples(n: int, k: int, budget: int) -> np.ndarray:
    arr = tuple_array(n, k, budget)
    arr.flags.writeable = False
    return arr


def _primed_mask(arr: np.ndarray, n1: int) -> np.ndarray:
    """Rows with a_i != +-a_j (mod n1) for all i < j."""
    r = arr % n1
    cls = np.minimum(r, n1 - r)
    k = arr.shape[1]
    clash = np.zeros(len(arr), dtype=bool)
    for i, j in itertools.combinations(range(k), 2):
        clash |= cls[:, i] == cls[:, j]
    return ~clash


@functools.lru_cache(maxsize=65536)
def _primed_count_plain(n: int, k: int, n1: int, budget: int) -> int:
    arr = _tuples(n, k, budget)
    if len(arr) == 0:
        return 0
    return int(np.count_nonzero(_primed_mask(arr, n1)))


def count_primed(n: int, k: int, m: int, interval=None,
                 budget: int = DEFAULT_BUDGET) -> int:
    """#S'(n,k,m), or #S'_I(n,k,m) when an interval is given; 0 if k > (n-1)/2."""
    s = slice_params(n, m)
    if s.m == 0 or k > half(n):
        return 0
    if interval is None:
        return _primed_count_plain(n, k, s.n1, budget)
    c, d = _check_interval(interval)
    arr = _tuples(n, k, budget)
    if len(arr) == 0:
        return 0
    mask = _primed_mask(arr, s.n1)
    tv = tau_values(n, arr, m)
    return int(np.count_nonzero(mask & (tv >= c) & (tv <= d)))


@dataclass
class DoublePrimeReport:
    n: int
    k: int
    per_slice: list[int]
    total: int
    constant: int
    slice_bound_ok: bool
    global_bound_ok: bool
    tight_slice_constant: float
    tight_global_constant: float


def count_doubleprime(n: int, k: int, budget: int = DEFAULT_BUDGET) -> DoublePrimeReport:
    """Exact #S''(n,k,m) for every m, with both bounds checked.

    Per slice: #S''(n,k,m) < C_k n^k / n1.  Globally: #S''(n,k) < C_k d(n) n^k.
    The tight constants are the smallest C for which each bound would hold.
    """
    n = check_modulus(n)
    check_k(n, k)
    full = math.comb(half(n), k)
    ck = bound_constant(k)
    per_n1 = {}
    per_slice = []
    slice_ok = True
    tight = 0.0
    for m in range(n):
        s = slice_params(n, m)
        if m == 0:
            cnt = full
        else:
            if s.n1 not in per_n1:
                per_n1[s.n1] = full - _primed_count_plain(n, k, s.n1, budget)
            cnt = per_n1[s.n1]
        per_slice.append(cnt)
        slice_ok &= cnt * s.n1 < ck * n**k
        tight = max(tight, cnt * s.n1 / n**k)
    total = sum(per_slice)
    dn = divisor_count(n)
    return DoublePrimeReport(n, k, per_slice, total, ck, bool(slice_ok),
                             total < ck * dn * n**k, tight, total / (dn * n**k))


# --- identity audits ---------------------------------------------------------

@dataclass
class DefectReport:
    """Both sides of a counting identity and how far apart they are.

    ``normalized`` = defect / (d n^(k-1)); it is the smallest C with
    defect <= C d n^(k-1) for this case.
    """

    tag: str
    n: int
    k: int
    m: int
    d: int
    measured: float
    claimed: float
    defect: float
    scale: int
    normalized: float
    interval: Optional[tuple[float, float]] = None


def distinct_lattice_count(n1: int, k: int, interval=None, budget: int = DEFAULT_BUDGET) -> int:
    iv = None if interval is None else _check_interval(interval)
    return count_lattice(n1, RegionSpec(k, iv, distinct_coords=True), budget)


def audit_lemma(tag: str, n: int, k: int, m: int, interval=None,
                budget: int = DEFAULT_BUDGET) -> DefectReport:
    """Measure one counting identity on slice m of A_k(n).

    slice_lift
        #S'(n,k,m) against ((d+1)/2)^k #S'(n1,k,m1)
    lattice_fibres
        #Omega'_{n1} against k! #S'(n1,k,m1)
    slice_lattice
        #S'(n,k,m) against ((d+1)/2)^k #Omega'_{n1} / k!

    With ``interval`` every count is restricted to tau_m (or the cosine sum)
    lying in I.
    """
    n = check_modulus(n)
    s = slice_params(n, m)
    if s.m == 0:
        raise MOutOfRange("identity audits need m >= 1")
    check_k(n, k)
    lift = ((s.d + 1) // 2) ** k
    if tag == "slice_lift":
        lhs = count_primed(n, k, m, interval, budget)
        rhs = lift * count_primed(s.n1, k, s.m1, interval, budget)
    elif tag == "lattice_fibres":
        lhs = distinct_lattice_count(s.n1, k, interval, budget)
        rhs = math.factorial(k) * count_primed(s.n1, k, s.m1, interval, budget)
    elif tag == "slice_lattice":
        lhs = count_primed(n, k, m, interval, budget)
        rhs = Fraction(lift * distinct_lattice_count(s.n1, k, interval, budget),
                       math.factorial(k))
    else:
        raise ValidationError(f"unknown audit tag {tag!r}; expected one of {AUDIT_TAGS}")
    defect = abs(Fraction(lhs) - Fraction(rhs))
    scale = s.d * n ** (k - 1)
    iv = None if interval is None else _check_interval(interval)
    return DefectReport(tag, n, k, m, s.d, float(lhs), float(rhs), float(defect), scale,
                        float(defect / scale), iv)


def audit_grid(n_values: Sequence[int], k_values: Sequence[int],
               tags: Sequence[str] = AUDIT_TAGS, interval=None,
               budget: int = DEFAULT_BUDGET) -> list[DefectReport]:
    out = []
    for n in n_values:
        for k in k_values:
            if k > half(n):
                continue
            for m in range(1, n):
                for tag in tags:
                    out.append(audit_lemma(tag, n, k, m, interval, budget))
    return out


# --- convergence harness -----------------------------------------------------

@dataclass
class ConvergenceResult:
    records: list[SweepRecord]
    slope: Optional[float]
    status: str  # "ok", "AllZero" or "Insufficient"


def fit_slope(ns: Sequence[int], errors: Sequence[float]) -> tuple[Optional[float], str]:
    pts = [(n, e) for n, e in zip(ns, errors) if e >= NOISE_FLOOR]
    if not pts:
        return None, "AllZero"
    if len(pts) < 2:
        return None, "Insufficient"
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope = float(np.polyfit(x, y, 1)[0])
    return slope, "ok"


def convergence_experiment(k: int, interval, n_grid: Sequence[int], *, odd: bool = False,
                           threads: int = 1, budget: int = DEFAULT_BUDGET,
                           tolerance: float = DEFAULT_TOLERANCE) -> ConvergenceResult:
    """prob_exact over ``n_grid`` and the least-squares log-log error slope."""
    grid = [check_modulus(n) for n in n_grid]

    def one(n):
        return prob_exact(n, k, interval, odd=odd, budget=budget, tolerance=tolerance)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(one, grid))
    else:
        records = [one(n) for n in grid]
    slope, status = fit_slope([r.n for r in records], [r.abs_error for r in records])
    return ConvergenceResult(records, slope, status)


# --- histogram ---------------------------------------------------------------

@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    predicted: np.ndarray
    r: int

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.total


def eigen_histogram(n: int, k: int, odd: bool = False, bins: int = 20,
                    budget: int = DEFAULT_BUDGET,
                    tolerance: float = DEFAULT_TOLERANCE) -> Histogram:
    """Histogram of every eigenvalue in the family at height n.

    Bins split [-r, r] evenly and are half-open except the last.  ``predicted``
    holds the limiting mass of each bin.
    """
    n = check_modulus(n)
    check_k(n, k)
    if bins < 1:
        raise ValidationError("bins must be at least 1")
    r = 2 * k + int(odd)
    if n * math.comb(half(n), k) * k > budget:
        raise BudgetExceeded(f"histogram for n={n}, k={k} exceeds budget {budget}")
    arr = _tuples(n, k, budget)
    edges = np.linspace(-r, r, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    for m in range(n):
        tv = tau_values(n, arr, m)
        lam = 1.0 + 2.0 * tv if odd else 2.0 * tv
        idx = np.clip(np.searchsorted(edges, lam, side="right") - 1, 0, bins - 1)
        counts += np.bincount(idx, minlength=bins)
    # map each eigenvalue edge to the cosine-sum axis, then clamp into [-k, k]
    cos_edges = np.array([interval_map((e, e), r).I[0] for e in edges])
    F = cdf_values(k, np.clip(cos_edges, -k, k), tolerance)
    return Histogram(edges, counts, np.diff(F), r)
