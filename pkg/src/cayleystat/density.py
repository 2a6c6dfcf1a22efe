"""Arcsine law, its k-fold convolution, and interval masses.

Masses are computed in angle space: with u_i = cos(theta_i) and theta_i
uniform on [0, pi], the mass of delta^(k) on [c, d] is the probability that
cos(theta_1) + ... + cos(theta_k) lands in [c, d].  The CDF of that sum obeys

    F_j(s) = (1/pi) * integral_0^pi F_{j-1}(s - cos(theta)) dtheta,

with F_1 the arcsine CDF in closed form.  F_{j-1} is only non-smooth at the
points -(j-1), -(j-1)+2, ..., j-1, so each outer integral is split where
s - cos(theta) crosses one of them.  On every piece a sigmoidal change of
variable clusters nodes at both ends, after which composite Gauss-Legendre
converges fast despite the square-root and logarithmic end behaviour.
"""
from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadInterval, ToleranceNotMet, ValidationError

DEFAULT_TOLERANCE = 1e-8
MAX_PANELS = 2**22
MAX_EVALUATIONS = 400_000_000
GL_ORDER = 16
SIGMOID_POWER = 4
# integrand values held in memory at once during nested evaluation
_CHUNK_EVALS = 4_000_000
MC_CHUNK = 1 << 20


def arcsine_pdf(u):
    """1/(pi sqrt(1-u^2)) on (-1, 1), zero elsewhere (including u = +-1)."""
    u_arr = np.asarray(u, dtype=float)
    inside = np.abs(u_arr) < 1.0
    safe = np.where(inside, u_arr, 0.0)
    out = np.where(inside, 1.0 / (np.pi * np.sqrt(1.0 - safe * safe)), 0.0)
    return float(out) if out.ndim == 0 else out


def arcsine_cdf(x):
    x_arr = np.asarray(x, dtype=float)
    out = 0.5 + np.arcsin(np.clip(x_arr, -1.0, 1.0)) / np.pi
    out = np.where(x_arr <= -1.0, 0.0, np.where(x_arr >= 1.0, 1.0, out))
    return float(out) if out.ndim == 0 else out


class Method(enum.Enum):
    QUADRATURE = "quadrature"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class DensityQuery:
    k: int
    c: float
    d: float
    method: Method = Method.QUADRATURE
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    samples: int = 1_000_000

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be positive (got {self.k})")
        if not self.c <= self.d:
            raise BadInterval(f"empty interval [{self.c}, {self.d}]")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")


@dataclass(frozen=True)
class MassEstimate:
    value: float
    error_bound: Optional[float] = None
    standard_error: Optional[float] = None
    method: str = "quadrature"
    panels: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None

    @property
    def uncertainty(self) -> float:
        if self.standard_error is not None:
            return self.standard_error
        return self.error_bound or 0.0


@functools.lru_cache(maxsize=32)
def _panel_rule(panels: int, order: int = GL_ORDER):
    """Nodes/weights on [0, 1] after the sigmoidal map t^p / (t^p + (1-t)^p)."""
    x, w = np.polynomial.legendre.leggauss(order)
    left = np.arange(panels) / panels
    t = (left[:, None] + (x[None, :] + 1.0) / (2.0 * panels)).ravel()
    wt = np.tile(w / (2.0 * panels), panels)
    p = SIGMOID_POWER
    tp, up = t**p, (1.0 - t) ** p
    den = tp + up
    psi = tp / den
    dpsi = p * t ** (p - 1) * (1.0 - t) ** (p - 1) / den**2
    psi.flags.writeable = False
    wts = wt * dpsi
    wts.flags.writeable = False
    return psi, wts


def _evals_per_point(j: int, nodes: int) -> int:
    # F_j at one point touches (j-1)! * nodes^(j-1) arcsine evaluations
    return math.factorial(j - 1) * nodes ** (j - 1)


def _cdf(j: int, s: np.ndarray, psi: np.ndarray, w: np.ndarray) -> np.ndarray:
    if j == 1:
        return arcsine_cdf(s)
    per_point = _evals_per_point(j, len(psi))
    step = max(1, _CHUNK_EVALS // per_point)
    if len(s) > step:
        return np.concatenate([_cdf(j, s[i : i + step], psi, w) for i in range(0, len(s), step)])
    sing = -(j - 1) + 2.0 * np.arange(j)
    theta = np.arccos(np.clip(s[:, None] - sing[None, :], -1.0, 1.0))
    lo, hi = theta[:, :-1], theta[:, 1:]
    width = hi - lo
    nodes = lo[..., None] + width[..., None] * psi
    inner = _cdf(j - 1, (s[:, None, None] - np.cos(nodes)).ravel(), psi, w)
    inner = inner.reshape(nodes.shape)
    pieces = (width * (inner * w).sum(-1)).sum(-1)
    # beyond the last crossing the integrand is identically 1
    out = (np.pi - theta[:, -1] + pieces) / np.pi
    out = np.where(s <= -j, 0.0, np.where(s >= j, 1.0, out))
    return out


def sum_cdf(k: int, points, panels: int) -> np.ndarray:
    """CDF of cos(theta_1)+...+cos(theta_k) at ``points`` with a fixed rule."""
    psi, w = _panel_rule(panels)
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    return _cdf(k, pts, psi, w)


def _refine(k, points, tolerance, max_panels, max_evals):
    """Double the panel count until two successive CDF vectors agree."""
    if k == 1:
        return arcsine_cdf(np.asarray(points, dtype=float)), 0.0, 0
    panels, prev, diff = 1, None, math.inf
    while True:
        cost = len(points) * _evals_per_point(k, panels * GL_ORDER)
        if panels > max_panels or cost > max_evals:
            raise ToleranceNotMet(
                f"k={k}: no convergence to {tolerance:g} before the panel cap "
                f"(last change {diff:.3g} at {panels // 2} panels)"
            )
        vals = sum_cdf(k, points, panels)
        if prev is not None:
            diff = float(np.max(np.abs(np.diff(vals) - np.diff(prev)))) if len(vals) > 1 \
                else float(np.max(np.abs(vals - prev)))
            if diff < tolerance:
                return vals, diff, panels
        prev = vals
        panels *= 2


@functools.lru_cache(maxsize=4096)
def _mass_cached(k, c, d, tolerance, max_panels, max_evals):
    vals, err, panels = _refine(k, np.array([c, d]), tolerance, max_panels, max_evals)
    value = float(min(1.0, max(0.0, vals[1] - vals[0])))
    return MassEstimate(value, error_bound=err, method="quadrature", panels=panels)


def conv_mass(k: int, c: float, d: float, tolerance: float = DEFAULT_TOLERANCE,
              max_panels: Optional[int] = None, max_evals: Optional[int] = None) -> MassEstimate:
    """Mass of the k-fold arcsine convolution on [c, d] by nested quadrature.

    ``error_bound`` is the change between the last two refinements.  The caps
    default to MAX_PANELS and MAX_EVALUATIONS.
    """
    DensityQuery(k, c, d, tolerance=tolerance)
    max_panels = MAX_PANELS if max_panels is None else max_panels
    max_evals = MAX_EVALUATIONS if max_evals is None else max_evals
    return _mass_cached(int(k), float(c), float(d), float(tolerance), max_panels, max_evals)


def cdf_values(k: int, points, tolerance: float = DEFAULT_TOLERANCE) -> np.ndarray:
    """Refined CDF of the k-fold sum at sorted ``points``.

    Differences of the result are interval masses that telescope exactly.
    """
    pts = np.asarray(points, dtype=float)
    vals, _, _ = _refine(int(k), pts, tolerance, MAX_PANELS, MAX_EVALUATIONS)
    return vals


def _mc_chunk(child: np.random.SeedSequence, size: int, k: int, c: float, d: float) -> int:
    rng = np.random.Generator(np.random.PCG64(child))
    theta = rng.random((size, k)) * np.pi
    s = np.cos(theta).sum(axis=1)
    return int(np.count_nonzero((s >= c) & (s <= d)))


def conv_mass_mc(k: int, c: float, d: float, samples: int = 1_000_000, seed: int = 0,
                 threads: int = 1) -> MassEstimate:
    """Hit fraction of seeded uniform angles; chunk i always uses child stream i."""
    DensityQuery(k, c, d, method=Method.MONTE_CARLO, seed=seed, samples=samples)
    if samples < 1:
        raise ValidationError("samples must be positive")
    nchunks = -(-samples // MC_CHUNK)
    children = np.random.SeedSequence(seed).spawn(nchunks)
    sizes = [min(MC_CHUNK, samples - i * MC_CHUNK) for i in range(nchunks)]
    args = [(ch, sz, k, c, d) for ch, sz in zip(children, sizes)]
    if threads > 1 and nchunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(lambda a: _mc_chunk(*a), args))
    else:
        hits = sum(_mc_chunk(*a) for a in args)
    p = hits / samples
    se = math.sqrt(p * (1.0 - p) / samples)
    return MassEstimate(p, standard_error=se, method="mc", samples=samples, seed=seed)


def estimate(query: DensityQuery) -> MassEstimate:
    if query.method is Method.MONTE_CARLO:
        return conv_mass_mc(query.k, query.c, query.d, query.samples, query.seed)
    return conv_mass(query.k, query.c, query.d, query.tolerance)


def box_volume(k: int, c: float, d: float, tolerance: float = DEFAULT_TOLERANCE) -> MassEstimate:
    """Volume of {x in [0,1/2)^k : sum cos(2 pi x_i) in [c, d]} = 2^-k * mass."""
    if c < -k or d > k:
        raise BadInterval(f"[{c}, {d}] not inside [-{k}, {k}]")
    m = conv_mass(k, c, d, tolerance)
    scale = 2.0**-k
    return MassEstimate(m.value * scale, error_bound=(m.error_bound or 0.0) * scale,
                        method=m.method, panels=m.panels)
