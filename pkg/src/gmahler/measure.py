"""Mahler-measure engines.

``mahler_direct`` averages ``log|p|`` over a tensor grid on the torus.
``mahler_jensen`` (two variables) factors ``p`` in ``y``, solves for the roots
``y_j(x)`` at every node on ``|x| = a`` and applies Jensen's formula in ``y``
exactly, leaving a one-dimensional average.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend
from .errors import DegeneracyError, NumericalFailure, UsageError
from .laurent import LaurentPoly, factor_in_variable, univariate_coefficients
from .quad import GridSpec, QuadResult, periodic_integral_1d, periodic_integral_nd

NOISE_FLOOR = 64 * np.finfo(float).eps
ROOT_TOL = 1e-12


class Method(str, enum.Enum):
    DIRECT = "direct"
    JENSEN = "jensen"
    SERIES = "series"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class Torus:
    radii: tuple[float, ...]

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii:
            raise UsageError("a torus needs at least one radius")
        for r in radii:
            if not (r > 0 and math.isfinite(r)):
                raise UsageError(f"radii must be positive and finite, got {r}")

    @classmethod
    def unit(cls, n: int) -> "Torus":
        return cls((1.0,) * n)

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def log_radii(self) -> tuple[float, ...]:
        return tuple(math.log(r) for r in self.radii)

    def __iter__(self):
        return iter(self.radii)


def as_torus(t, n: int | None = None) -> Torus:
    if t is None:
        if n is None:
            raise UsageError("torus or arity required")
        return Torus.unit(n)
    if not isinstance(t, Torus):
        t = Torus(tuple(t))
    if n is not None and t.n != n:
        raise UsageError(f"torus has {t.n} radii but the polynomial has {n} variables")
    return t


@dataclass(frozen=True)
class MeasureResult:
    value: float
    est_error: float
    method: Method
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "est_error": self.est_error, "method": self.method.value,
                "detail": dict(self.detail)}

    @classmethod
    def from_dict(cls, data: dict) -> "MeasureResult":
        return cls(float(data["value"]), float(data["est_error"]), Method(data["method"]),
                   dict(data.get("detail", {})))


@dataclass(frozen=True)
class RootSlice:
    at_angle: float
    roots: tuple[complex, ...]
    leading_abs: float
    degree_drop: bool = False


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------


def _sort_roots(roots: np.ndarray) -> np.ndarray:
    arg = np.angle(roots)
    arg = np.where(arg == np.pi, -np.pi, arg)
    return roots[np.lexsort((np.abs(roots), arg))]


def roots_complex(coeffs: Sequence[complex], tol: float = ROOT_TOL) -> np.ndarray:
    """All roots of ``sum_k coeffs[k] * u**k`` (ascending powers).

    Aberth-Ehrlich from staggered-circle starting points, one Newton polish per
    root.  Output is sorted by argument in ``[-pi, pi)``, then by modulus.

    Raises
    ------
    NumericalFailure
        Some root's backward error exceeds ``tol`` after 200 sweeps.
    """
    c = np.asarray(coeffs, dtype=np.complex128).ravel()
    nz = np.flatnonzero(c)
    if len(nz) == 0:
        raise DegeneracyError("the zero polynomial has no roots")
    c = c[: nz[-1] + 1]
    zeros = int(nz[0])
    c = c[zeros:]
    if len(c) + zeros < 2:
        raise DegeneracyError("a constant polynomial has no roots")
    out = [np.zeros(zeros, dtype=np.complex128)]
    if len(c) > 1:
        roots, conv, _ = _backend.aberth(c[None, :])
        roots = roots[0]
        if not conv[0]:
            resid = _backward_error(c, roots)
            if (resid > tol).any():
                raise NumericalFailure("root iteration did not converge", residuals=resid.tolist())
        out.append(roots)
    return _sort_roots(np.concatenate(out))


def _backward_error(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    p = np.polyval(c[::-1], z)
    scale = np.polyval(np.abs(c[::-1]), np.abs(z))
    return np.abs(p) / np.maximum(scale, 1e-300)


def roots_of(p: LaurentPoly, tol: float = ROOT_TOL) -> np.ndarray:
    """Roots in ``C*`` of a one-variable Laurent polynomial (zero roots included)."""
    _, coeffs = univariate_coefficients(p)
    return roots_complex(coeffs, tol)


# ---------------------------------------------------------------------------
# Grid evaluation helpers
# ---------------------------------------------------------------------------


def power_tables(exps: np.ndarray, radii: Sequence[float], axes: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Per-dimension tables ``(a_d e^{i theta})**e`` of shape ``(T, N_d)``."""
    tables = []
    for d, (r, th) in enumerate(zip(radii, axes)):
        e = exps[:, d][:, None].astype(float)
        tables.append(np.exp(e * (math.log(r) + 1j * np.asarray(th, dtype=float)[None, :])))
    return tables


def log_abs_integrand(p: LaurentPoly, torus: Torus):
    """``log|p|`` on tensor grids, with values inside the rounding noise sent to ``-inf``.

    ``|x^e|`` is constant on a torus, so ``sum |c_t| a^{e_t}`` bounds the
    cancellation error of every node; anything below ``64 eps`` times that is an
    unresolved zero and is handed to the quadrature's singular-node refinement.
    """
    exps, coeffs = p.arrays()
    floor = math.log(NOISE_FLOOR * p.sup_bound(torus.radii))

    def f(*axes):
        vals = _backend.log_abs_tensor(power_tables(exps, torus.radii, axes), coeffs)
        vals[vals < floor] = -np.inf
        return vals

    return f


def eval_on_circle(p: LaurentPoly, radius: float, theta: np.ndarray) -> np.ndarray:
    exps, coeffs = p.arrays()
    return _backend.eval_tensor(power_tables(exps, [radius], [theta]), coeffs)


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------


def _check(p: LaurentPoly):
    if p.is_zero():
        raise UsageError("the Mahler measure of the zero polynomial is undefined")


def mahler_direct(p: LaurentPoly, torus=None, spec: GridSpec | None = None) -> MeasureResult:
    """Average of ``log|p|`` over the torus on a tensor trapezoid grid."""
    _check(p)
    torus = as_torus(torus, p.n_vars)
    spec = spec or GridSpec.uniform(p.n_vars)
    if spec.n_dims != p.n_vars:
        raise UsageError("grid dimension does not match the polynomial")
    q = periodic_integral_nd(log_abs_integrand(p, torus), spec)
    return MeasureResult(q.value, q.est_error, Method.DIRECT, q.to_dict())


def jensen_circle(z0: complex, radius: float) -> float:
    """``(1/2pi) * integral of log|R e^{it} - z0| dt = log max(|z0|, R)``."""
    if not radius > 0:
        raise UsageError("radius must be positive")
    return math.log(max(abs(z0), radius))


def mahler_1d(p: LaurentPoly, radius: float = 1.0) -> MeasureResult:
    """Exact one-variable measure on ``|u| = radius`` from the roots."""
    _check(p)
    if p.n_vars == 0:
        (c,) = p.terms.values()
        return MeasureResult(math.log(abs(c)), 0.0, Method.JENSEN, {"degree": 0})
    pole, coeffs = univariate_coefficients(p)
    lead = coeffs[-1]
    if len(coeffs) == 1:
        value = math.log(abs(lead)) - pole * math.log(radius)
        return MeasureResult(value, 0.0, Method.JENSEN, {"degree": 0})
    roots = roots_complex(coeffs)
    value = math.log(abs(lead)) - pole * math.log(radius) + math.fsum(
        jensen_circle(z, radius) for z in roots)
    err = 64 * np.finfo(float).eps * (1 + abs(value)) * len(roots)
    return MeasureResult(value, err, Method.JENSEN, {"degree": len(roots)})


def _coefficient_values(fac, radius: float, theta: np.ndarray) -> np.ndarray:
    """``(len(theta), d+1)`` matrix of ``c_k(a e^{i theta})``."""
    cols = []
    for coeff in fac.coefficients():
        if coeff.is_zero():
            cols.append(np.zeros(len(theta), dtype=np.complex128))
        elif coeff.n_vars == 0:
            cols.append(np.full(len(theta), complex(next(iter(coeff.terms.values())))))
        else:
            cols.append(eval_on_circle(coeff, radius, theta))
    return np.stack(cols, axis=1)


def _sum_log_max(coeffs: np.ndarray, b: float) -> np.ndarray:
    """Row-wise ``log|c_d| + sum_j log max(|y_j|, b)`` without dividing by a small ``c_d``.

    When ``|c_0| > |c_d|`` the reversed polynomial (roots ``u_j = 1/y_j``) is
    solved instead and the sum becomes ``log|c_0| + sum_j log max(1, b|u_j|)``.
    Rows with ``c_0 = c_d = 0`` give ``-inf`` and are left to the quadrature's
    singular-node refinement.
    """
    m, d1 = coeffs.shape
    out = np.full(m, -np.inf)
    lead = np.abs(coeffs[:, -1])
    const = np.abs(coeffs[:, 0])
    direct = (lead >= const) & (lead > 0)
    rev = lead < const
    if direct.any():
        rows = coeffs[direct]
        roots, conv, _ = _backend.aberth(rows)
        _raise_unconverged(rows, roots, conv)
        out[direct] = np.log(lead[direct]) + np.log(np.maximum(np.abs(roots), b)).sum(axis=1)
    if rev.any():
        rows = np.ascontiguousarray(coeffs[rev][:, ::-1])
        roots, conv, _ = _backend.aberth(rows)
        _raise_unconverged(rows, roots, conv)
        out[rev] = np.log(const[rev]) + np.log(np.maximum(1.0, b * np.abs(roots))).sum(axis=1)
    return out


def _raise_unconverged(rows, roots, conv):
    if conv.all():
        return
    bad = np.flatnonzero(~conv)
    resid = [float(_backward_error(rows[i], roots[i]).max()) for i in bad]
    if max(resid) > 1e-9:
        raise NumericalFailure(f"root iteration failed at {len(bad)} nodes", residuals=resid)


def jensen_integrand(p: LaurentPoly, torus: Torus):
    """``theta -> log|Q_F(x)| + sum_j log max(|y_j(x)|, b)`` at ``x = a e^{i theta}``."""
    fac = factor_in_variable(p, 1)
    a, b = torus.radii

    def g(theta):
        theta = np.asarray(theta, dtype=float)
        return _sum_log_max(_coefficient_values(fac, a, theta), b)

    return fac, g


def mahler_jensen(p: LaurentPoly, torus=None, spec: GridSpec | None = None) -> MeasureResult:
    """Two-variable measure with the ``y`` integral done exactly by Jensen's formula.

    ``detail`` holds the raw quadrature of the integrand; the reported value is
    that minus ``detail["pole_shift"]`` (pole order in ``y`` times ``log b``).
    """
    _check(p)
    if p.n_vars != 2:
        raise UsageError("mahler_jensen handles two-variable polynomials")
    torus = as_torus(torus, 2)
    fac, g = jensen_integrand(p, torus)
    spec = spec or GridSpec.uniform(1)
    q = periodic_integral_1d(g, spec)
    shift = fac.pole_order * math.log(torus.radii[1])
    return MeasureResult(q.value - shift, q.est_error, Method.JENSEN, {**q.to_dict(), "pole_shift": shift})


def root_slices(p: LaurentPoly, torus, n_probes: int, role: str = "y") -> list[RootSlice]:
    """Roots ``y_j(x)`` at ``n_probes`` equally spaced points on ``|x| = a`` (or the x-role mirror)."""
    torus = as_torus(torus, 2)
    var, other = (1, 0) if role == "y" else (0, 1)
    fac = factor_in_variable(p, var)
    radius = torus.radii[other]
    theta = 2 * np.pi * np.arange(n_probes) / n_probes
    vals = _coefficient_values(fac, radius, theta)
    scale = np.abs(vals).sum(axis=1)
    out = []
    for k in range(n_probes):
        row = vals[k]
        lead = abs(row[-1])
        drop = lead <= 1e-12 * scale[k]
        roots = roots_complex(row if not drop else _trim(row))
        out.append(RootSlice(float(theta[k]), tuple(complex(z) for z in roots), float(lead), bool(drop)))
    return out


def _trim(row: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(row) > 1e-12 * np.abs(row).sum())
    return row[: nz[-1] + 1]


def mahler_measure(p: LaurentPoly, torus=None, method: str | Method = "direct",
                   spec: GridSpec | None = None) -> MeasureResult:
    method = Method(method)
    if method is Method.DIRECT:
        return mahler_direct(p, torus, spec)
    if method is Method.JENSEN:
        if p.n_vars == 1:
            return mahler_1d(p, as_torus(torus, 1).radii[0])
        return mahler_jensen(p, torus, spec)
    raise UsageError(f"method {method.value!r} is not a grid engine")


def quad_detail(result: MeasureResult) -> QuadResult:
    return QuadResult.from_dict(result.detail)
