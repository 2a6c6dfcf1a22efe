"""Ihara zeta data for circulant graphs and the Ramanujan fraction of the family.

For an r-regular graph with adjacency spectrum {lambda_m}

    h_X(u) = prod_m (1 - lambda_m u + (r-1) u^2),
    1 / zeta_X(u) = (1 - u^2)^(rank - 1) * h_X(u),

with rank = |E| - |V| + 1.  A loop at 0 (odd r) contributes one edge per
vertex, so |E| = n k + n [r odd].  The rank formula assumes X connected.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_BUDGET, CayleySpec, check_k, check_modulus, tuple_array
from .density import DEFAULT_TOLERANCE, conv_mass
from .errors import BudgetExceeded, ValidationError
from .spectra import interval_map, spectrum, tau_values

# coefficients are bounded by prod(1 + |lambda| + r - 1) <= (2r)^n; stay well inside float range
_LOG_COEFF_LIMIT = 600.0


@dataclass(frozen=True)
class IharaPolynomial:
    """Polynomial in u with ascending coefficients."""

    n: int
    r: int
    coefficients: np.ndarray
    rank: int

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, u):
        return np.polynomial.polynomial.polyval(u, self.coefficients)


def graph_rank(spec: CayleySpec) -> int:
    edges = spec.n * spec.k + (spec.n if spec.includes_zero else 0)
    return edges - spec.n + 1


def _guard(n: int, r: int) -> None:
    if n * math.log(2.0 * r) > _LOG_COEFF_LIMIT:
        raise BudgetExceeded(f"Ihara coefficients for n={n}, r={r} may overflow a float")


def _leja_order(lam: np.ndarray, r: int) -> np.ndarray:
    """Factor order that keeps partial products well scaled.

    Greedy Leja sequence on the roots: each step takes the factor whose two
    roots lie farthest (in product of distances) from the roots already used.
    Multiplying in index order instead lets intermediate coefficients grow far
    beyond the final ones, which costs many digits for long cycles.
    """
    q = r - 1.0
    disc = np.sqrt((lam * lam - 4.0 * q).astype(complex))
    up, lo = (lam + disc) / (2.0 * q), (lam - disc) / (2.0 * q)
    score = np.zeros(len(lam))
    used = np.zeros(len(lam), dtype=bool)
    order = []
    cur = int(np.argmax(np.abs(up)))
    while True:
        order.append(cur)
        used[cur] = True
        if used.all():
            return np.asarray(order)
        for z in (up[cur], lo[cur]):
            # coincident roots get a huge penalty, so repeated factors come late
            score += np.log(np.abs(up - z) + 1e-300) + np.log(np.abs(lo - z) + 1e-300)
        cur = int(np.argmax(np.where(used, -np.inf, score)))


def ihara_polynomial(spec: CayleySpec) -> IharaPolynomial:
    """h_X(u) as a product of the n quadratic factors (degree 2n)."""
    r = spec.r
    _guard(spec.n, r)
    lam = spectrum(spec).values
    coeffs = np.array([1.0])
    for i in _leja_order(lam, r):
        coeffs = np.convolve(coeffs, [1.0, -lam[i], r - 1.0])
    return IharaPolynomial(spec.n, r, coeffs, graph_rank(spec))


def zeta_inverse(spec: CayleySpec) -> IharaPolynomial:
    """1/zeta_X(u) = (1 - u^2)^(rank - 1) h_X(u)."""
    h = ihara_polynomial(spec)
    extra = h.rank - 1
    if extra < 0:
        raise ValidationError("rank below 1: graph is a forest")
    _guard(spec.n + extra, spec.r)
    coeffs = h.coefficients
    for _ in range(extra):
        coeffs = np.convolve(coeffs, [1.0, 0.0, -1.0])
    return IharaPolynomial(spec.n, spec.r, coeffs, h.rank)


@dataclass(frozen=True)
class PolePair:
    """Roots of 1 - alpha u + (r-1) u^2."""

    alpha: float
    r: int
    u_plus: complex
    u_minus: complex

    @property
    def product(self) -> complex:
        return self.u_plus * self.u_minus

    @property
    def on_circle(self) -> bool:
        """True when the discriminant is non-positive, i.e. |alpha| <= 2 sqrt(r-1)."""
        return self.alpha * self.alpha <= 4.0 * (self.r - 1)


def pole_pair(alpha: float, r: int) -> PolePair:
    """(alpha +- sqrt(alpha^2 - 4(r-1))) / (2(r-1))."""
    if r < 2:
        raise ValidationError(f"degree must be at least 2 (got {r})")
    q = r - 1.0
    root = cmath.sqrt(alpha * alpha - 4.0 * q)
    return PolePair(float(alpha), r, (alpha + root) / (2.0 * q), (alpha - root) / (2.0 * q))


def is_ramanujan(spec: CayleySpec) -> bool:
    """Every eigenvalue except lambda_0 = r has |lambda| <= 2 sqrt(r-1)."""
    bound = 2.0 * math.sqrt(spec.r - 1)
    vals = spectrum(spec).values[1:]
    return bool(np.all(np.abs(vals) <= bound))


@dataclass(frozen=True)
class RamanujanFraction:
    n: int
    k: int
    r: int
    inside: int
    total: int
    predicted: float

    @property
    def fraction(self) -> float:
        return self.inside / self.total


def ramanujan_fraction(n: int, k: int, odd: bool = False, budget: int = DEFAULT_BUDGET,
                       tolerance: float = DEFAULT_TOLERANCE) -> RamanujanFraction:
    """Share of pairs (tuple, m != 0) with |lambda_m| <= 2 sqrt(r-1).

    ``predicted`` is the limiting mass of the matching cosine-sum interval.
    """
    n = check_modulus(n)
    check_k(n, k)
    r = 2 * k + int(odd)
    if r < 2:
        raise ValidationError("degree must be at least 2")
    arr = tuple_array(n, k, budget)
    if (n - 1) * len(arr) * k > budget:
        raise BudgetExceeded(f"Ramanujan fraction for n={n}, k={k} exceeds budget {budget}")
    bound = 2.0 * math.sqrt(r - 1)
    inside = 0
    for m in range(1, n):
        tv = tau_values(n, arr, m)
        lam = 1.0 + 2.0 * tv if odd else 2.0 * tv
        inside += int(np.count_nonzero(np.abs(lam) <= bound))
    J = (max(-bound, -r), min(bound, r))
    c, d = interval_map(J, r).I_clamped
    predicted = conv_mass(k, c, d, tolerance).value if c <= d else 0.0
    return RamanujanFraction(n, k, r, inside, (n - 1) * len(arr), predicted)
