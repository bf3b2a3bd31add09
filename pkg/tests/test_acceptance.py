"""Acceptance criteria.

Each criterion is a function returning ``(passed, detail)``.  Under pytest every
criterion is one test and prints a PASS/FAIL line; run the file directly to get
just the ten lines.
"""
import cmath
import math
import random
import sys
import time

import numpy as np
import pytest
from scipy.integrate import quad

from gmahler.laurent import LaurentPoly, evaluate, family_q, parse
from gmahler.measure import mahler_direct, roots_of
from gmahler.q4 import arg_integral_closed, q4_closed, q4_poly
from gmahler.quad import GridSpec
from gmahler.region import build_region, cached_region, agreement_rate, ellipse_conditions
from gmahler.special import bloch_wigner, catalan
from gmahler.theorems import (
    bounded_component_value,
    cassaigne_maillot,
    linear_poly,
    series_coefficients,
    series_coefficients_exact,
    series_coefficients_torus,
    series_mtilde,
    verify_main_relation,
)
from gmahler.winding import index_in_disc, inside_count, rho_constancy

Q = family_q(2)

# mpmath, 30 digits
CATALAN = 0.915965594177219015054603514932
ZETA3 = 1.20205690315959428539973816151


def criterion_1():
    ref = bloch_wigner(cmath.exp(1j * math.pi / 3)) / math.pi
    t0 = time.perf_counter()
    v = mahler_direct(parse("x + y + 1")).value
    dt = time.perf_counter() - t0
    err = abs(v - ref)
    return err <= 1e-6 and abs(ref - 0.3230659) <= 1e-7 and dt <= 10, f"|err|={err:.2e} time={dt:.2f}s"


def criterion_2():
    ref = 7 * ZETA3 / (2 * math.pi ** 2)
    t0 = time.perf_counter()
    v = mahler_direct(parse("1 + x + y + z"), None, GridSpec.uniform(3, 128)).value
    dt = time.perf_counter() - t0
    err = abs(v - ref)
    return err <= 1e-3 and dt <= 300, f"|err|={err:.2e} time={dt:.2f}s"


def criterion_3():
    rng = random.Random(2024)
    worst, tri, non = 0.0, 0, 0
    for _ in range(20):
        # log-uniform moduli reach both sides of the triangle inequality
        a, b, c = (cmath.rect(math.exp(rng.uniform(-1.5, 1.5)), rng.uniform(-math.pi, math.pi)) for _ in range(3))
        A, B, C = sorted((abs(a), abs(b), abs(c)))
        if C < A + B:
            tri += 1
        else:
            non += 1
        worst = max(worst, abs(cassaigne_maillot(a, b, c) - mahler_direct(linear_poly(a, b, c)).value))
    return worst <= 1e-5 and tri > 0 and non > 0, f"max|err|={worst:.2e} triangle={tri} non-triangle={non}"


def criterion_4():
    worst = 0.0
    for a in (0.5, 1, 1.5, 2):
        for b in (0.5, 1, 1.5, 2):
            worst = max(worst, abs(q4_closed(a, b) - mahler_direct(q4_poly(), (a, b)).value))
    unit = abs(q4_closed(1, 1) - 4 * CATALAN / math.pi)
    return worst <= 1e-4 and unit <= 1e-10, f"max|err|={worst:.2e} |q4(1,1)-4G/pi|={unit:.1e}"


def criterion_5():
    worst, nus = 0.0, set()
    ok = True
    for r in (5, 6, 8, 10, 6 + 2j):
        rep = verify_main_relation(Q, r, (1.2, 1.1), tol=1e-5)
        ok &= rep.passed
        nus.add(rep.nu)
        worst = max(worst, rep.discrepancy)
    for a in (0.5, 1.5, 3.5):
        rep = verify_main_relation(Q, 8, (a, a), tol=1e-5)
        ok &= rep.passed and rep.nu == (0, 0)
        worst = max(worst, rep.discrepancy)
    return ok and nus == {(0, 0)}, f"max discrepancy={worst:.2e} nu={sorted(nus)}"


def criterion_6():
    worst, ok = 0.0, True
    for r in (0, 1, 2, 3j):
        v = bounded_component_value(Q, r, (10, 4))
        worst = max(worst, abs(v.value - math.log(10)))
        ok &= v.nu == 1
    return ok and worst <= 1e-6, f"max|value-log 10|={worst:.2e}"


def criterion_7():
    c1 = ellipse_conditions(10, 4)
    rate, n = agreement_rate(cached_region(Q, 10, 4), 10, 4, n=200)
    c2 = ellipse_conditions(1.5, 1.07)
    rng = np.random.default_rng(52)
    counts = [len(build_region(Q, a, b).bounded) for a, b in rng.uniform(0.3, 3, size=(20, 2))]
    ok = c1.outer_ok and c1.inner_ok and rate >= 0.99 and not c2.outer_ok and not c2.inner_ok and max(counts) <= 1
    return ok, f"agreement={rate:.4f} over {n} points, max bounded components={max(counts)}"


def criterion_8():
    series_err = abs(series_mtilde(Q, 10, 40).real - mahler_direct(Q + 10).value)
    exact = series_coefficients(Q, 10).coeffs
    torus = series_coefficients_torus(Q, (1.7, 0.6), 10)
    coeff_err = max(abs(e - t) for e, t in zip(exact, torus))
    ex = series_coefficients_exact(Q, 12)
    binom = all(ex[2 * m - 1] == (math.comb(2 * m, m) ** 2, 0) for m in range(1, 7))
    ok = series_err <= 1e-8 and coeff_err <= 1e-9 and binom
    return ok, f"series |err|={series_err:.1e} coeff |err|={coeff_err:.1e} exact C(2m,m)^2={binom}"


def _random_nonvanishing(rng):
    while True:
        terms = {(int(i), int(j)): complex(*rng.normal(size=2)) for i, j in rng.integers(-2, 3, size=(5, 2))}
        p = LaurentPoly(terms, 2)
        a, b = rng.uniform(0.5, 2, size=2)
        th = np.linspace(0, 2 * np.pi, 128, endpoint=False)
        vals = np.abs([evaluate(p, [a * cmath.exp(1j * s), b * cmath.exp(1j * t)]) for s in th for t in th])
        if vals.min() > 0.05 * vals.max() and len({j for _, j in p.terms}) > 1:
            return p, float(a), float(b)


def criterion_9():
    rng = np.random.default_rng(9)
    matched = 0
    while matched < 50:
        lo = int(rng.integers(-3, 1))
        span = int(rng.integers(1, 7))
        p = LaurentPoly({(lo + k,): complex(*rng.uniform(-2, 2, 2)) for k in range(span + 1)}, 1)
        radius = float(rng.uniform(0.3, 3))
        roots = roots_of(p)
        if np.min(np.abs(np.abs(roots) - radius)) < 1e-3:
            continue
        pole = -min(e[0] for e in p.terms)
        if index_in_disc(p, radius).nu != inside_count(roots, radius) - pole:
            return False, f"mismatch on {p} at radius {radius}"
        matched += 1
    constant = 0
    for _ in range(10):
        p, a, b = _random_nonvanishing(rng)
        rep = rho_constancy(p, a, b, 64)
        constant += rep.constant and not rep.flagged
    return constant == 10, f"index matches census 50/50, rho constant {constant}/10"


def _arc_derivative(c, t):
    w = c * cmath.exp(1j * t)
    return (1j * w * (1j / (1 + 1j * w) + 1j / (1 - 1j * w))).imag


def criterion_10():
    rng = random.Random(10)
    sym = real = 0.0
    for _ in range(1000):
        z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        sym = max(sym, abs(bloch_wigner(z.conjugate()) + bloch_wigner(z)))
        real = max(real, abs(bloch_wigner(complex(rng.uniform(-10, 10), 0))))
    cat = abs(bloch_wigner(1j) - CATALAN)
    arc = 0.0
    for _ in range(20):
        c = rng.uniform(0.2, 3)
        a, b = rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi)
        num = quad(lambda t: _arc_derivative(c, t), a, b, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        arc = max(arc, abs(num - arg_integral_closed(c, a, b)))
    ok = sym <= 1e-13 and real <= 1e-13 and cat <= 1e-12 and catalan() == pytest.approx(CATALAN, abs=1e-15) and arc <= 1e-9
    return ok, f"|D(conj z)+D(z)|={sym:.1e} |D(x)|={real:.1e} |D(i)-G|={cat:.1e} arc |err|={arc:.1e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def report(k: int) -> tuple[bool, str]:
    ok, detail = CRITERIA[k - 1]()
    return bool(ok), f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k, capsys):
    ok, line = report(k)
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    results = [report(k) for k in range(1, 11)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
