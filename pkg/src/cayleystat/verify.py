"""Invariant suites behind ``cayley verify``.

Each suite yields ``Check`` results; INFO lines carry measurements that
have no pass/fail threshold (for example the audit defect constants).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import arith, core, density, ihara, lattice, spectra, stats


@dataclass
class Check:
    name: str
    passed: bool | None  # None for INFO lines
    detail: str = ""

    def line(self) -> str:
        tag = "INFO" if self.passed is None else ("PASS" if self.passed else "FAIL")
        return f"{tag} {self.name}" + (f" {self.detail}" if self.detail else "")


def _odd(lo, hi):
    return range(lo | 1, hi + 1, 2)


def suite_core() -> Iterator[Check]:
    for n in _odd(3, 41):
        for k in range(1, min(3, core.half(n)) + 1):
            listed = sum(1 for _ in core.enumerate_tuples(n, k))
            ok = listed == core.count_tuples(n, k) == len(core.tuple_array(n, k))
            if not ok:
                yield Check("tuple_count", False, f"n={n} k={k} listed={listed}")
    yield Check("tuple_count", True, "odd n<=41 k<=3")

    bad = 0
    for n in _odd(3, 31):
        for k in (1, 2, 3):
            if k > core.half(n):
                continue
            tuples = list(core.enumerate_tuples(n, k))
            dp = stats.count_doubleprime(n, k).per_slice
            for m in range(n):
                s = core.slice_params(n, m)
                primed = sum(core.classify_tuple(t, s) is core.SliceClass.PRIMED for t in tuples)
                if primed != stats.count_primed(n, k, m) or primed + dp[m] != len(tuples):
                    bad += 1
    yield Check("slice_decomposition", bad == 0, "odd n<=31 k<=3 all m")

    cases = [((4, [1]), "EvenModulus"), ((5, [3]), "OutOfRange"), ((9, [2, 1]), "NotStrictlyIncreasing")]
    for (n, a), want in cases:
        try:
            core.make_tuple(n, a)
            got = "none"
        except core.ValidationError as exc:  # noqa: PERF203
            got = type(exc).__name__
        yield Check("tuple_validation", got == want, f"n={n} a={a} raised={got}")

    ok = all(math.isclose(math.cos(2 * math.pi * core.kappa(x)), math.cos(2 * math.pi * x),
                          abs_tol=1e-12) for x in np.linspace(-3, 3, 241))
    yield Check("kappa_preserves_cos", ok)


def suite_spectra() -> Iterator[Check]:
    worst, trace_worst, count = 0.0, 0.0, 0
    for n in _odd(3, 41):
        for k in range(1, min(3, core.half(n)) + 1):
            for t in itertools.islice(core.enumerate_tuples(n, k), 6):
                for odd in (False, True):
                    spec = core.CayleySpec(t, odd)
                    sp = spectra.spectrum(spec)
                    dense = spectra.spectrum_via_matrix(spec)
                    worst = max(worst, float(np.max(np.abs(sp.sorted() - dense))) / spec.r)
                    tr1 = abs(sp.values.sum() - n * int(odd))
                    tr2 = abs((sp.values**2).sum() - n * spec.r)
                    trace_worst = max(trace_worst, tr1 / n, tr2 / n)
                    count += 1
    yield Check("spectrum_vs_dense", worst <= 1e-8, f"{count} specs max/r={worst:.3g}")
    yield Check("trace_identities", trace_worst <= 1e-10, f"max/n={trace_worst:.3g}")
    sym = all(np.array_equal(spectra.cos_table(n)[1:], spectra.cos_table(n)[1:][::-1])
              for n in _odd(3, 101))
    yield Check("cos_table_symmetric", sym)
    pair = spectra.interval_map((0, 2), 2)
    yield Check("interval_map", pair.I == (0.0, 1.0), f"J=[0,2] r=2 -> I={pair.I}")


def suite_density() -> Iterator[Check]:
    for k in range(1, 5):
        v = density.conv_mass(k, -k, k).value
        yield Check("normalization", abs(v - 1) <= 1e-9, f"k={k} mass={v!r}")
    err = max(abs(density.conv_mass(1, c, d).value
                  - (density.arcsine_cdf(d) - density.arcsine_cdf(c)))
              for c, d in [(-1, 0), (-0.5, 0.3), (0.2, 0.9), (-0.99, 0.99)])
    yield Check("arcsine_closed_form", err <= 1e-9, f"max_err={err:.3g}")
    tol = density.DEFAULT_TOLERANCE
    for k in (2, 3):
        a = density.conv_mass(k, -1.0, 0.5).value
        b = density.conv_mass(k, -0.5, 1.0).value
        yield Check("symmetry", abs(a - b) <= 2 * tol, f"k={k} diff={abs(a - b):.3g}")
        whole = density.conv_mass(k, -1.0, 1.0).value
        parts = density.conv_mass(k, -1.0, 0.25).value + density.conv_mass(k, 0.25, 1.0).value
        yield Check("additivity", abs(whole - parts) <= 2 * tol, f"k={k} diff={abs(whole - parts):.3g}")
    half_mass = density.conv_mass(2, -2, 0).value
    yield Check("half_mass", abs(half_mass - 0.5) <= 2 * tol, f"k=2 [-2,0] -> {half_mass!r}")


def suite_lattice() -> Iterator[Check]:
    ok = True
    for n in _odd(3, 31):
        for k in (1, 2, 3):
            for distinct in (False, True):
                full = lattice.count_lattice(n, lattice.RegionSpec(k, (-k, k), distinct))
                ok &= full == lattice.closed_form_count(n, k, distinct)
    yield Check("closed_form_counts", ok, "odd n<=31 k<=3")
    c = lattice.count_lattice(5, lattice.RegionSpec(1, (0, 1)))
    yield Check("omega_anchor", c == 2, f"#Omega_5([0,1])={c}")
    for n, k, iv in [(21, 1, (0, 1)), (21, 2, (-1, 1)), (15, 3, (-0.5, 0.5))]:
        rep = lattice.shift_check(n, k, iv)
        yield Check("shift_slab", rep.passed, f"n={n} k={k} checked={rep.checked} exits={rep.box_exits}")
    for k, iv in [(1, (0.0, 1.0)), (2, (-1.0, 1.0))]:
        scaled = max(n * lattice.volume_count_gap(n, k, iv) for n in (101, 201, 401, 1001))
        yield Check("volume_rate", scaled <= 10 * k, f"k={k} I={iv} max n*gap={scaled:.3g}")


def suite_stats() -> Iterator[Check]:
    for n, want in [(5, 0.6), (9, 0.5)]:
        p = stats.prob_exact(n, 1, (0, 1)).probability
        yield Check("prob_anchor", p == want, f"n={n} k=1 I=[0,1] -> {p!r}")
    for n, k in [(9, 2), (15, 3), (21, 2)]:
        p = stats.prob_exact(n, k, (-k, k)).probability
        yield Check("prob_full_interval", p == 1.0, f"n={n} k={k}")
    dp = stats.count_doubleprime(9, 2)
    yield Check("doubleprime_anchor", dp.per_slice[3] == 3 and dp.per_slice[1] == 0,
                f"#S''(9,2,3)={dp.per_slice[3]} #S''(9,2,1)={dp.per_slice[1]}")
    ok, tight = True, 0.0
    for n in _odd(5, 51):
        for k in (2, 3):
            if k > core.half(n):
                continue
            rep = stats.count_doubleprime(n, k)
            ok &= rep.slice_bound_ok and rep.global_bound_ok
            tight = max(tight, rep.tight_slice_constant)
    yield Check("doubleprime_bounds", ok, f"odd n<=51 k=2,3 tightest per-slice C={tight:.3g}")

    ok = True
    for n in _odd(5, 45):
        for k in (1, 2):
            if k > core.half(n):
                continue
            for iv in [(0, 1), (-1, 1), (-0.5, 0.25)]:
                e = stats.prob_exact(n, k, iv)
                f = stats.prob_fast(n, k, iv)
                ok &= abs(f.fast_count - e.exact_count) <= f.fast_budget
    yield Check("fast_path_budget", ok, "odd n<=45 k<=2")

    yield Check("pillai_anchors", arith.pillai(9) == 21 and arith.pillai(15) == 45,
                f"g(9)={arith.pillai(9)} g(15)={arith.pillai(15)}")
    bad = arith.broughan_sweep(10_000)
    yield Check("broughan_bound", not bad, "2<=n<=10^4" + (f" violators={bad[:5]}" if bad else ""))

    yield Check("audit_table", None, "tag n k m d measured claimed defect normalized")
    anchors = [("slice_lift", 15, 1, 3, 3.0), ("slice_lift", 9, 2, 3, 3.0), ("lattice_fibres", 7, 1, 1, 1.0)]
    for tag, n, k, m, want in anchors:
        r = stats.audit_lemma(tag, n, k, m)
        yield Check("audit_anchor", r.defect == want,
                    f"{tag} {n} {k} {m} {r.d} {r.measured:g} {r.claimed:g} {r.defect:g} {r.normalized:.4g}")
    reports = stats.audit_grid(_odd(3, 61), (1, 2))
    yield Check("audit_defects_nonnegative", all(r.defect >= 0 for r in reports), f"{len(reports)} cases")
    for tag in stats.AUDIT_TAGS:
        worst = max((r for r in reports if r.tag == tag), key=lambda r: r.normalized)
        yield Check("audit_constant", None,
                    f"{tag} odd n<=61 k<=2 C={worst.normalized:.4g} at n={worst.n} k={worst.k} m={worst.m}")


def suite_ihara() -> Iterator[Check]:
    for n in (3, 5, 7, 9):
        z = ihara.zeta_inverse(core.CayleySpec.build(n, [1]))
        want = np.zeros(2 * n + 1)
        want[0], want[n], want[2 * n] = 1.0, -2.0, 1.0
        err = float(np.max(np.abs(z.coefficients - want)))
        yield Check("cycle_zeta", err <= 1e-9, f"n={n} max_err={err:.3g}")
    prod_err, circ_err, h1 = 0.0, 0.0, 0.0
    for n in _odd(3, 25):
        for k in range(1, min(2, core.half(n)) + 1):
            for t in core.enumerate_tuples(n, k):
                for odd in (False, True):
                    spec = core.CayleySpec(t, odd)
                    r = spec.r
                    for lam in spectra.spectrum(spec).values:
                        pp = ihara.pole_pair(lam, r)
                        prod_err = max(prod_err, abs(pp.product - 1 / (r - 1)))
                        if pp.on_circle:
                            rad = 1 / math.sqrt(r - 1)
                            circ_err = max(circ_err, abs(abs(pp.u_plus) - rad), abs(abs(pp.u_minus) - rad))
                    if n <= 15:
                        h = ihara.ihara_polynomial(spec)
                        h1 = max(h1, abs(h(1.0)) / np.abs(h.coefficients).sum())
    yield Check("pole_product", prod_err <= 1e-12, f"max_err={prod_err:.3g}")
    yield Check("pole_circle", circ_err <= 1e-12, f"max_err={circ_err:.3g}")
    yield Check("h_at_one", h1 <= 1e-8, f"max_rel={h1:.3g}")
    rf = ihara.ramanujan_fraction(5, 1)
    yield Check("ramanujan_cycle", rf.fraction == 1.0, f"n=5 k=1 fraction={rf.fraction}")


SUITES: dict[str, Callable[[], Iterator[Check]]] = {
    "core": suite_core,
    "spectra": suite_spectra,
    "density": suite_density,
    "lattice": suite_lattice,
    "stats": suite_stats,
    "ihara": suite_ihara,
}


def run(name: str) -> Iterator[Check]:
    names = list(SUITES) if name == "all" else [name]
    for s in names:
        for check in SUITES[s]():
            check.name = f"{s}.{check.name}"
            yield check
