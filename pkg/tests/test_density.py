import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from cayleystat import density
from cayleystat.errors import BadInterval, ToleranceNotMet, ValidationError


def _mp_mass2(c, d):
    """k=2 mass by mpmath: (1/pi) int_0^pi [F1(d - cos t) - F1(c - cos t)] dt."""
    def F1(x):
        if x <= -1:
            return mpmath.mpf(0)
        if x >= 1:
            return mpmath.mpf(1)
        return mpmath.mpf(1) / 2 + mpmath.asin(x) / mpmath.pi

    def g(t):
        ct = mpmath.cos(t)
        return F1(d - ct) - F1(c - ct)

    # split where d - cos t or c - cos t crosses +-1
    cuts = {mpmath.mpf(0), mpmath.pi}
    for s in (c, d):
        for e in (-1, 1):
            v = s - e
            if -1 < v < 1:
                cuts.add(mpmath.acos(v))
    pts = sorted(cuts)
    with mpmath.workdps(30):
        return float(mpmath.quad(g, pts) / mpmath.pi)


def test_arcsine_pdf_and_cdf():
    assert density.arcsine_pdf(0.0) == pytest.approx(1 / math.pi)
    assert density.arcsine_pdf(1.0) == 0.0
    assert density.arcsine_cdf(-1.0) == 0.0 and density.arcsine_cdf(1.0) == 1.0
    assert density.arcsine_cdf(0.0) == 0.5


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_normalization(k):
    assert abs(density.conv_mass(k, -k, k).value - 1.0) <= 1e-9


@pytest.mark.parametrize("c,d", [(-1, 1), (-2, 0), (0.3, 1.7), (-0.25, 0.25), (1.0, 1.9), (-1.95, -1.0)])
def test_k2_against_mpmath(c, d):
    ours = density.conv_mass(2, c, d, tolerance=1e-10).value
    assert abs(ours - _mp_mass2(c, d)) <= 1e-9


def test_known_k2_value():
    # mass of the two-fold law on [-1, 1]
    assert density.conv_mass(2, -1, 1).value == pytest.approx(0.6304369411, abs=1e-9)


@pytest.mark.parametrize("k,c,d", [(2, -1, 1), (3, -1, 1), (3, 0.5, 2.5), (4, -1, 1)])
def test_quadrature_against_monte_carlo(k, c, d):
    q = density.conv_mass(k, c, d).value
    mc = density.conv_mass_mc(k, c, d, samples=2_000_000, seed=11)
    assert abs(q - mc.value) <= 4 * mc.standard_error


def test_mc_reproducible_and_thread_independent():
    a = density.conv_mass_mc(2, -1, 1, samples=3_000_000, seed=7, threads=1)
    b = density.conv_mass_mc(2, -1, 1, samples=3_000_000, seed=7, threads=4)
    assert a.value == b.value
    c = density.conv_mass_mc(2, -1, 1, samples=3_000_000, seed=8)
    assert c.value != a.value


def test_cdf_values_telescope():
    pts = np.linspace(-2, 2, 9)
    F = density.cdf_values(2, pts)
    assert F[0] == 0.0 and F[-1] == 1.0
    assert np.all(np.diff(F) >= 0)


def test_box_volume():
    v = density.box_volume(1, -1, 1).value
    assert v == pytest.approx(0.5)
    with pytest.raises(BadInterval):
        density.box_volume(1, -2, 1)


def test_tolerance_not_met_when_capped():
    with pytest.raises(ToleranceNotMet):
        density.conv_mass(3, -1.0, 0.123, tolerance=1e-15, max_panels=2)


def test_query_validation():
    with pytest.raises(ValidationError):
        density.DensityQuery(0, -1, 1)
    with pytest.raises(BadInterval):
        density.DensityQuery(2, 1, -1)
    q = density.DensityQuery(2, -1, 1, method=density.Method.MONTE_CARLO, samples=10_000, seed=3)
    assert density.estimate(q).method == "mc"


@given(st.integers(1, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_additivity_and_symmetry(k, x, y, z):
    a, b, c = sorted((max(-k, min(k, v)) for v in (x, y, z)))
    tol = density.DEFAULT_TOLERANCE
    whole = density.conv_mass(k, a, c).value
    parts = density.conv_mass(k, a, b).value + density.conv_mass(k, b, c).value
    assert abs(whole - parts) <= 2 * tol
    mirror = density.conv_mass(k, -c, -a).value
    assert abs(whole - mirror) <= 2 * tol
    assert 0.0 <= whole <= 1.0
