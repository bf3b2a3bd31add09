"""Winding indices by the argument principle and the root census they replace."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonIntegral, NumericalFailure, UsageError, ZeroOnContour
from .laurent import LaurentPoly, log_derivative_numerator, slice_variable
from .measure import as_torus, eval_on_circle, root_slices

ZERO_THRESHOLD = 1e-8
MAX_RESIDUAL = 0.1


@dataclass(frozen=True)
class IndexCount:
    """``nu`` = zeros inside the circle minus the pole order at 0."""

    nu: int
    raw: complex
    residual: float

    def to_dict(self) -> dict:
        return {"nu": self.nu, "raw": [self.raw.real, self.raw.imag], "residual": self.residual}

    @classmethod
    def from_dict(cls, data: dict) -> "IndexCount":
        re, im = data["raw"]
        return cls(int(data["nu"]), complex(re, im), float(data["residual"]))


def index_in_disc(p: LaurentPoly, radius: float, n_nodes: int = 4096) -> IndexCount:
    """``(1/2 pi i)`` times the contour integral of ``p'/p`` over ``|u| = radius``.

    Raises
    ------
    ZeroOnContour
        ``min |p| < 1e-8 * max |p|`` on the nodes.
    NonIntegral
        The trapezoid sum is not within 0.1 of an integer.
    """
    if p.n_vars == 0:
        if p.is_zero():
            raise ZeroOnContour("the zero polynomial vanishes everywhere")
        return IndexCount(0, 0j, 0.0)
    if p.n_vars != 1:
        raise UsageError("index_in_disc needs a one-variable polynomial")
    if not radius > 0:
        raise UsageError("radius must be positive")
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    vals = eval_on_circle(p, radius, theta)
    mods = np.abs(vals)
    if not mods.max() > 0 or mods.min() < ZERO_THRESHOLD * mods.max():
        raise ZeroOnContour(f"polynomial (nearly) vanishes on |u| = {radius}")
    num = log_derivative_numerator(p, 0)
    dvals = eval_on_circle(num, radius, theta) if not num.is_zero() else np.zeros_like(vals)
    raw = complex(np.mean(dvals / vals))
    nu = int(round(raw.real))
    residual = abs(raw - nu)
    if residual >= MAX_RESIDUAL:
        raise NonIntegral(f"contour sum {raw} is not close to an integer")
    return IndexCount(nu, raw, residual)


def nu_pair(p: LaurentPoly, a: float, b: float, n_nodes: int = 4096) -> tuple[IndexCount, IndexCount]:
    """``(nu1, nu2)``: count in ``|x| < a`` on the slice ``y = b``, and in ``|y| < b`` on ``x = a``."""
    if p.n_vars != 2:
        raise UsageError("nu_pair needs a two-variable polynomial")
    return nu_vector(p, (a, b), n_nodes)  # type: ignore[return-value]


def nu_vector(p: LaurentPoly, radii: Sequence[float], n_nodes: int = 4096) -> tuple[IndexCount, ...]:
    """Index in each variable with the others fixed at their (positive real) radii."""
    radii = as_torus(radii, p.n_vars).radii
    out = []
    for j in range(p.n_vars):
        q = p
        for k in range(p.n_vars - 1, -1, -1):
            if k != j:
                q = slice_variable(q, k, radii[k])
        out.append(index_in_disc(q, radii[j], n_nodes))
    return tuple(out)


@dataclass(frozen=True)
class RhoReport:
    counts: tuple[int, ...]
    constant: bool
    flagged: tuple[int, ...] = ()
    degree_drops: tuple[int, ...] = ()

    @property
    def count(self) -> int | None:
        return self.counts[0] if self.constant and self.counts else None

    def to_dict(self) -> dict:
        return {"counts": list(self.counts), "constant": self.constant,
                "flagged": list(self.flagged), "degree_drops": list(self.degree_drops)}


def rho_constancy(p: LaurentPoly, a: float, b: float, probes: int = 64, role: str = "y") -> RhoReport:
    """Census of roots inside the test circle at ``probes`` points of the other circle.

    ``role="y"``: roots ``y_j(x)`` with ``|y_j| < b`` for ``x`` on ``|x| = a``.
    ``role="x"``: roots ``x_j(y)`` with ``|x_j| < a`` for ``y`` on ``|y| = b``.
    Probes where the solver fails are flagged and left out of the verdict.
    """
    if role not in ("x", "y"):
        raise UsageError("role must be 'x' or 'y'")
    radius = b if role == "y" else a
    counts, flagged, drops = [], [], []
    theta = 2 * np.pi * np.arange(probes) / probes
    for k in range(probes):
        try:
            # one probe at a time so a failure only costs that probe
            sl = _single_slice(p, a, b, float(theta[k]), role)
        except NumericalFailure:
            flagged.append(k)
            continue
        if sl.degree_drop:
            drops.append(k)
        counts.append(sum(1 for z in sl.roots if abs(z) < radius))
    constant = len(set(counts)) <= 1 and bool(counts)
    return RhoReport(tuple(counts), constant, tuple(flagged), tuple(drops))


def _single_slice(p, a, b, angle, role):
    # rotate the probe angle into the polynomial so root_slices can use its node 0
    other = 0 if role == "y" else 1
    exps, coeffs = p.arrays()
    rot = np.exp(1j * angle * exps[:, other])
    q = LaurentPoly({tuple(int(v) for v in e): c * w for e, c, w in zip(exps, coeffs, rot)}, p.n_vars)
    return root_slices(q, (a, b), 1, role)[0]


def inside_count(roots: Sequence[complex], radius: float) -> int:
    return sum(1 for z in roots if abs(z) < radius)


def log_radius_combination(nus: Sequence[int], radii: Sequence[float]) -> float:
    return math.fsum(n * math.log(r) for n, r in zip(nus, radii))
