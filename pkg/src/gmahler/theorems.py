"""Checks and evaluators built on the engines.

* ``verify_main_relation``: on the unbounded component of the complement of the
  vanishing region, ``m_a(Q + r) = m(Q + r) + sum_j nu_j log a_j``.
* ``bounded_component_value``: on a bounded component, the measure collapses to
  a one-variable measure of the leading or constant coefficient.
* ``series_mtilde``: the large-``r`` expansion ``log r - sum a_n / (n r^n)``.
* ``cassaigne_maillot``: closed form of ``m(a x + b y + c)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DivergentSeries, MixedRoots, PreconditionNotMet, UsageError
from .laurent import (
    LaurentPoly,
    constant_term,
    exact_constant_term_of_power,
    factor_in_variable,
    mul,
    slice_variable,
    univariate_coefficients,
)
from .measure import (
    MeasureResult,
    Method,
    Torus,
    as_torus,
    mahler_1d,
    mahler_direct,
    mahler_jensen,
    power_tables,
    roots_complex,
)
from . import _backend
from .quad import GridSpec
from .region import Kind, cached_region, classify_point
from .special import bloch_wigner
from .winding import nu_vector

ROOT_MARGIN = 1e-9
SERIES_GRID = 64


# ---------------------------------------------------------------------------
# Series expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesCoeffs:
    """``coeffs[n-1] = a_n``, the constant term of ``(-Q)**n``, for ``n = 1..N``."""

    coeffs: tuple[complex, ...]

    @property
    def N(self) -> int:
        return len(self.coeffs)


def series_coefficients(Q: LaurentPoly, N: int) -> SeriesCoeffs:
    if N < 0:
        raise UsageError("N must be non-negative")
    neg = -Q
    acc = LaurentPoly.constant(1, Q.n_vars)
    out = []
    for _ in range(N):
        acc = mul(acc, neg)
        out.append(constant_term(acc))
    return SeriesCoeffs(tuple(out))


def series_coefficients_exact(Q: LaurentPoly, N: int) -> list[tuple[Fraction, Fraction]]:
    """Exact Gaussian-rational ``a_n`` for ``n = 1..N``."""
    return [exact_constant_term_of_power(-Q, n) for n in range(1, N + 1)]


def series_coefficients_torus(Q: LaurentPoly, radii: Sequence[float], N: int, nodes: int | None = None) -> list[complex]:
    """``a_n`` as torus averages of ``(-Q)**n`` over the given radii.

    The trapezoid rule is exact for trigonometric polynomials of degree below the
    node count, so the default grid has ``2 * N * max|exponent| + 8`` nodes
    rounded up to a power of two per dimension.
    """
    exps, coeffs = Q.arrays()
    span = int(np.abs(exps).max()) if len(exps) else 0
    n = nodes or 1 << math.ceil(math.log2(2 * N * max(span, 1) + 8))
    axes = [2 * np.pi * np.arange(n) / n] * Q.n_vars
    vals = -_backend.eval_tensor(power_tables(exps, radii, axes), coeffs)
    out = []
    acc = np.ones_like(vals)
    for _ in range(N):
        acc = acc * vals
        out.append(complex(acc.mean()))
    return out


def series_radius_bound(Q: LaurentPoly) -> float:
    """Heuristic ``max |Q|`` on the unit torus from a 64-point-per-axis grid."""
    exps, coeffs = Q.arrays()
    n = SERIES_GRID if Q.n_vars <= 3 else 16
    axes = [2 * np.pi * np.arange(n) / n] * Q.n_vars
    vals = _backend.eval_tensor(power_tables(exps, [1.0] * Q.n_vars, axes), coeffs)
    return float(np.abs(vals).max())


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    truncation_bound: float
    radius_bound: float
    terms: int

    def as_measure(self) -> MeasureResult:
        return MeasureResult(self.value.real, self.truncation_bound, Method.SERIES,
                             {"terms": self.terms, "radius_bound": self.radius_bound})


def series_expansion(Q: LaurentPoly, r: complex, N: int) -> SeriesResult:
    """``log r - sum_{n=1}^N a_n / (n r^n)`` with a geometric truncation bound."""
    r = complex(r)
    if any(not any(e) for e in Q.terms):
        raise UsageError("Q must have no constant term")
    if r.imag == 0 and r.real <= 0:
        raise UsageError("r must not lie on the non-positive real axis")
    M = series_radius_bound(Q)
    if abs(r) <= M:
        raise DivergentSeries(f"|r| = {abs(r):.6g} does not exceed max|Q| ~ {M:.6g}")
    a = series_coefficients(Q, N).coeffs
    total = cmath.log(r)
    rn = 1
    for n, an in enumerate(a, start=1):
        rn *= r
        total -= an / (n * rn)
    q = M / abs(r)
    bound = q ** (N + 1) / ((N + 1) * (1 - q))
    return SeriesResult(total, bound, M, N)


def series_mtilde(Q: LaurentPoly, r: complex, N: int) -> complex:
    """Truncated expansion of ``m(Q + r)``; its real part approximates the measure."""
    return series_expansion(Q, r, N).value


# ---------------------------------------------------------------------------
# Unbounded component relation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationReport:
    lhs: MeasureResult
    rhs_base: MeasureResult
    nu: tuple[int, ...]
    radii: tuple[float, ...]
    rhs: float
    discrepancy: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs.to_dict(),
            "rhs_base": self.rhs_base.to_dict(),
            "nu": list(self.nu),
            "radii": list(self.radii),
            "rhs": self.rhs,
            "discrepancy": self.discrepancy,
            "tol": self.tol,
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RelationReport":
        return cls(MeasureResult.from_dict(d["lhs"]), MeasureResult.from_dict(d["rhs_base"]),
                   tuple(d["nu"]), tuple(d["radii"]), d["rhs"], d["discrepancy"], d["tol"], d["pass"])


def component_of(Q: LaurentPoly, r: complex, radii: Sequence[float], region_res: int = 1024):
    """Classify ``r`` against the vanishing region of ``Q`` over ``radii``.

    Anything beyond ``sup |Q|`` is unbounded without building a raster.
    """
    if abs(r) > Q.sup_bound(radii) * (1 + 1e-12):
        return Kind.UNBOUNDED, None
    if Q.n_vars != 2:
        return None, None
    c = classify_point(cached_region(Q, float(radii[0]), float(radii[1]), 256, region_res), r)
    return c.kind, c.index


def _engine(p: LaurentPoly, torus: Torus, spec: GridSpec | None) -> MeasureResult:
    if p.n_vars == 2:
        return mahler_jensen(p, torus, spec if spec and spec.n_dims == 1 else None)
    if p.n_vars == 1:
        return mahler_1d(p, torus.radii[0])
    return mahler_direct(p, torus, spec if spec and spec.n_dims == p.n_vars else None)


def verify_main_relation(Q: LaurentPoly, r: complex, torus, tol: float = 1e-5,
                         spec: GridSpec | None = None, region_res: int = 1024) -> RelationReport:
    """Compare ``m_a(Q + r)`` with ``m(Q + r) + sum nu_j log a_j``.

    Raises
    ------
    PreconditionNotMet
        ``r`` is not shown to lie in the unbounded component for both the given
        torus and the unit torus.
    """
    r = complex(r)
    torus = as_torus(torus, Q.n_vars)
    unit = Torus.unit(Q.n_vars)
    for t in (torus, unit):
        kind, _ = component_of(Q, r, t.radii, region_res)
        if kind is not Kind.UNBOUNDED:
            where = "undetermined" if kind is None else kind.value
            raise PreconditionNotMet(f"r = {r} is {where} for radii {t.radii}, not in the unbounded component")
    p = Q + r
    lhs = _engine(p, torus, spec)
    base = _engine(p, unit, spec)
    nus = tuple(c.nu for c in nu_vector(p, torus.radii))
    rhs = base.value + math.fsum(n * math.log(a) for n, a in zip(nus, torus.radii))
    disc = abs(lhs.value - rhs)
    return RelationReport(lhs, base, nus, torus.radii, rhs, disc, tol, disc <= tol)


# ---------------------------------------------------------------------------
# Bounded components
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundedValue:
    value: float
    branch: str  # "leading" or "constant"
    nu: int
    role: str
    component: int | None = None

    def to_dict(self) -> dict:
        return {"value": self.value, "branch": self.branch, "nu": self.nu, "role": self.role,
                "component": self.component}


def bounded_component_value(Q: LaurentPoly, r: complex, torus, role: str = "x",
                            region_res: int = 1024, check_component: bool = True) -> BoundedValue:
    """Measure of ``Q + r`` on a bounded complement component from one-variable data.

    ``role="x"``: the roots of ``(Q + r)(x, b)`` must all lie inside or all outside
    ``|x| = a``; the value is ``nu1 log a + m_b`` of the leading (inside) or
    constant (outside) coefficient in ``x``.  ``role="y"`` swaps the variables.

    Raises
    ------
    PreconditionNotMet
        ``r`` is not in a bounded component.
    MixedRoots
        Roots on both sides of the circle, or within ``1e-9`` of it.
    """
    if Q.n_vars != 2:
        raise UsageError("bounded_component_value handles two-variable polynomials")
    if role not in ("x", "y"):
        raise UsageError("role must be 'x' or 'y'")
    r = complex(r)
    torus = as_torus(torus, 2)
    a, b = torus.radii
    index = None
    if check_component:
        kind, index = component_of(Q, r, (a, b), region_res)
        if kind is not Kind.BOUNDED:
            raise PreconditionNotMet(f"r = {r} is not in a bounded component for radii {(a, b)}")
    p = Q + r
    var, other = (0, 1) if role == "x" else (1, 0)
    test_radius, rest_radius = torus.radii[var], torus.radii[other]
    fac = factor_in_variable(p, var)
    pole, coeffs = univariate_coefficients(slice_variable(p, other, rest_radius))
    roots = roots_complex(coeffs)
    mods = np.abs(roots)
    if np.any(np.abs(mods - test_radius) <= ROOT_MARGIN * test_radius):
        raise MixedRoots("a root lies on the test circle")
    inside = int((mods < test_radius).sum())
    if inside not in (0, len(roots)):
        raise MixedRoots(f"{inside} of {len(roots)} roots inside the test circle")
    all_inside = inside == len(roots)
    coeff = fac.leading if all_inside else fac.constant
    nu = inside - pole
    tail = mahler_1d(coeff, rest_radius).value
    value = nu * math.log(test_radius) + tail
    return BoundedValue(value, "leading" if all_inside else "constant", nu, role, index)


# ---------------------------------------------------------------------------
# Linear forms
# ---------------------------------------------------------------------------


def triangle_angles(A: float, B: float, C: float) -> tuple[float, float, float]:
    """Angles opposite sides ``A, B, C`` by the law of cosines."""
    def opp(x, y, z):
        return math.acos(max(-1.0, min(1.0, (y * y + z * z - x * x) / (2 * y * z))))

    alpha = opp(A, B, C)
    beta = opp(B, C, A)
    return alpha, beta, math.pi - alpha - beta


def cassaigne_maillot(a: complex, b: complex, c: complex) -> float:
    """``m(a x + b y + c)`` in closed form.

    If ``|a|, |b|, |c|`` are the sides of a non-degenerate triangle with opposite
    angles ``alpha, beta, gamma``, the value is
    ``(alpha log|a| + beta log|b| + gamma log|c| + D(|a|/|b| e^{i gamma})) / pi``,
    otherwise ``log max(|a|, |b|, |c|)``.
    """
    A, B, C = abs(complex(a)), abs(complex(b)), abs(complex(c))
    if min(A, B, C) == 0:
        raise UsageError("coefficients must be nonzero")
    if not (A < B + C and B < A + C and C < A + B):
        return math.log(max(A, B, C))
    alpha, beta, gamma = triangle_angles(A, B, C)
    return (alpha * math.log(A) + beta * math.log(B) + gamma * math.log(C)
            + bloch_wigner(A / B * cmath.exp(1j * gamma))) / math.pi


def linear_poly(a: complex, b: complex, c: complex) -> LaurentPoly:
    return LaurentPoly({(1, 0): a, (0, 1): b, (0, 0): c}, 2)
