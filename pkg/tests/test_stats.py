import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cayleystat import core, spectra, stats
from cayleystat.errors import BudgetExceeded, MOutOfRange, ValidationError


def _brute_slice(n, k, m, c, d):
    # scalar route: one GeneratorTuple at a time
    return sum(c <= spectra.tau(t, m) <= d for t in core.enumerate_tuples(n, k))


@pytest.mark.parametrize("n,k,m,iv,want", [
    (5, 1, 0, (0, 1), 2), (5, 1, 1, (0, 1), 1), (9, 1, 3, (0, 1), 1),
])
def test_count_slice_examples(n, k, m, iv, want):
    assert stats.count_slice(n, k, m, iv) == want


@pytest.mark.parametrize("n", [9, 15, 21, 27])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_count_slice_against_scalar_route(n, k):
    for iv in [(0.0, 1.0), (-1.0, 1.0), (-0.7, 0.2)]:
        for m in range(n):
            assert stats.count_slice(n, k, m, iv) == _brute_slice(n, k, m, *iv)


def test_prob_exact_anchors():
    assert stats.prob_exact(5, 1, (0, 1)).probability == 0.6
    rec = stats.prob_exact(9, 1, (0, 1))
    assert rec.probability == 0.5 and rec.exact_count == 18 and rec.count_total == 36
    assert rec.abs_error == abs(rec.probability - rec.reference_mass)


@pytest.mark.parametrize("n,k", [(5, 1), (9, 2), (21, 3), (15, 4)])
def test_full_interval_gives_one(n, k):
    assert stats.prob_exact(n, k, (-k, k)).probability == 1.0


def test_prob_exact_threads_agree():
    a = stats.prob_exact(45, 2, (-1, 1), threads=1)
    b = stats.prob_exact(45, 2, (-1, 1), threads=4)
    assert a.slice_counts == b.slice_counts and a.probability == b.probability


def test_prob_exact_budget():
    with pytest.raises(BudgetExceeded):
        stats.prob_exact(201, 2, (0, 1), budget=10_000)


@pytest.mark.parametrize("n,k,iv", [(5, 1, (-1, 1)), (9, 1, (0, 1)), (225, 2, (-1, 1))])
def test_prob_fast_within_budget(n, k, iv):
    f = stats.prob_fast(n, k, iv)
    e = stats.prob_exact(n, k, iv)
    assert abs(f.fast_count - e.exact_count) <= f.fast_budget


def test_fast_lift_undercounts_composite_slices():
    # on a slice with d = gcd(m, n) > 1 each residue class mod n1 holds d generators,
    # while the lift factor is (d+1)/2
    n, m = 15, 3
    exact = stats.count_slice(n, 1, m, (-1, 1))
    lift = (3 + 1) // 2 * stats.count_slice(5, 1, 1, (-1, 1))
    assert exact == 7 and lift == 4


def test_prob_fast_prime_modulus_k1():
    # n prime, k=1: slices m >= 1 are exact up to the b=0 point; m=0 counts (n+1)/2 vs (n-1)/2
    n = 101
    f = stats.prob_fast(n, 1, (-1.0, 1.0))
    assert f.fast_count == (n - 1) * ((n - 1) // 2 + 1) + (n + 1) // 2


def test_count_doubleprime_examples():
    rep = stats.count_doubleprime(9, 2)
    assert rep.per_slice[3] == 3 and rep.per_slice[6] == 3 and rep.per_slice[1] == 0
    assert rep.per_slice[0] == math.comb(4, 2)
    assert rep.slice_bound_ok and rep.global_bound_ok
    assert rep.constant == 4 * 1 * 2 + 1


def test_count_doubleprime_matches_classifier():
    n, k = 45, 3
    rep = stats.count_doubleprime(n, k)
    tuples = list(core.enumerate_tuples(n, k))
    for m in (0, 1, 3, 5, 9, 15, 30):
        s = core.slice_params(n, m)
        want = sum(core.classify_tuple(t, s) is core.SliceClass.DOUBLE_PRIMED for t in tuples)
        assert rep.per_slice[m] == want


def test_audit_examples():
    r = stats.audit_lemma("slice_lift", 15, 1, 3)
    assert (r.measured, r.claimed, r.defect, r.scale) == (7, 4, 3, 3)
    r = stats.audit_lemma("slice_lift", 9, 2, 3)
    assert (r.measured, r.claimed, r.defect) == (3, 0, 3)
    for p in (3, 5, 7, 11, 101):
        r = stats.audit_lemma("lattice_fibres", p, 1, 1)
        assert (r.measured, r.claimed, r.defect) == ((p + 1) // 2, (p - 1) // 2, 1)


def test_audit_errors():
    with pytest.raises(MOutOfRange):
        stats.audit_lemma("slice_lift", 9, 1, 0)
    with pytest.raises(ValidationError):
        stats.audit_lemma("no_such_identity", 9, 1, 1)


def test_audit_with_interval_counts_subsets():
    full = stats.audit_lemma("slice_lattice", 45, 2, 5)
    sub = stats.audit_lemma("slice_lattice", 45, 2, 5, interval=(-1, 1))
    assert sub.measured <= full.measured
    assert sub.defect >= 0


def test_convergence_experiment():
    res = stats.convergence_experiment(1, (0, 1), [5, 9, 21, 45, 101, 225])
    assert res.records[0].abs_error == pytest.approx(0.1)
    assert res.status == "ok" and res.slope < -0.5
    zero = stats.convergence_experiment(2, (-2, 2), [9, 15, 21])
    assert zero.status == "AllZero" and zero.slope is None


def test_histogram_examples():
    h = stats.eigen_histogram(5, 1, False, 4)
    assert h.counts.tolist() == [4, 0, 4, 2]
    assert np.allclose(h.frequencies, [0.4, 0, 0.4, 0.2])
    assert abs(h.predicted.sum() - 1) <= 1e-8
    one = stats.eigen_histogram(9, 2, True, 1)
    assert one.counts.tolist() == [9 * 6]
    with pytest.raises(ValidationError):
        stats.eigen_histogram(5, 1, bins=0)


def test_histogram_overlay_close_for_large_n():
    h = stats.eigen_histogram(301, 2, False, 8)
    assert np.max(np.abs(h.frequencies - h.predicted)) < 0.02


@given(st.integers(2, 30).map(lambda h: 2 * h + 1), st.integers(1, 3), st.data())
def test_prob_monotone_and_decomposes(n, k, data):
    if k > (n - 1) // 2:
        return
    x = data.draw(st.floats(-k, k))
    y = data.draw(st.floats(-k, k))
    c, d = sorted((x, y))
    inner = stats.prob_exact(n, k, (c, d))
    outer = stats.prob_exact(n, k, (max(-k, c - 0.25), min(k, d + 0.25)))
    assert 0 <= inner.probability <= outer.probability <= 1
    m = data.draw(st.integers(0, n - 1))
    dp = stats.count_doubleprime(n, k).per_slice[m]
    assert stats.count_primed(n, k, m) + dp == math.comb((n - 1) // 2, k)


@given(st.integers(1, 30).map(lambda h: 2 * h + 1), st.integers(1, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_slices_m_and_minus_m_agree(n, k, x, y):
    if k > (n - 1) // 2:
        return
    c, d = sorted((x, y))
    for m in range(1, n):
        assert stats.count_slice(n, k, m, (c, d)) == stats.count_slice(n, k, n - m, (c, d))
