"""Closed form for the measure of ``x + 1/x + y + 1/y + 4`` over any torus.

After ``x = w/z``, ``y = wz`` the polynomial factors as
``(1 + iw + iz + wz)(1 - iw - iz + wz) / (wz)`` over the torus with radii
``c = sqrt(ab)``, ``d = sqrt(b/a)``.  Each linear factor has the same measure,
computed by splitting ``|w| = c`` into the arc where the root ``z(w)`` lies
outside ``|z| = d`` and the arc where it lies inside.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .laurent import LaurentPoly, family_q
from .special import bloch_wigner


@dataclass(frozen=True)
class Q4Params:
    a: float
    b: float
    c: float
    d: float
    A: float
    mu: float | None

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "A": self.A, "mu": self.mu}


def _cd_A(c: float, d: float) -> float:
    return (1 - d * d) / (1 + d * d) * (1 + c * c) / (2 * c)


def q4_params(a: float, b: float) -> Q4Params:
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    c = math.sqrt(a * b)
    d = math.sqrt(b / a)
    A = _cd_A(c, d)
    mu = math.asin(A) if abs(A) < 1 else None
    return Q4Params(a, b, c, d, A, mu)


def _dilog_pair(c: float, mu: float) -> float:
    return bloch_wigner(1j * c * complex(math.cos(-mu), math.sin(-mu))) + bloch_wigner(
        1j * c * complex(math.cos(mu), math.sin(mu)))


def _atan_ratio(num: float, den: float) -> float:
    """``atan(num / den)`` with ``den -> 0`` taken as the signed limit."""
    if den == 0:
        return math.copysign(math.pi / 2, num) if num else 0.0
    return math.atan(num / den)


def q4_dilog_branch(c: float, d: float, mu: float) -> float:
    """The dilogarithm expression, valid when ``|A| < 1``."""
    lc = math.log(c)
    tail = lc * _atan_ratio(c - 1 / c, 2 * math.cos(mu)) if lc else 0.0
    return 2 / math.pi * (_dilog_pair(c, mu) - mu * math.log(d) + tail)


def q4_branch(a: float, b: float) -> str:
    return "elementary" if q4_params(a, b).mu is None else "dilog"


def q4_closed(a: float, b: float) -> float:
    """``m_{a,b}(x + 1/x + y + 1/y + 4)``.

    ``|log c| + |log d|`` when ``|A| >= 1``; otherwise, with ``mu = asin A``,
    ``(2/pi) [D(ic e^{-i mu}) + D(ic e^{i mu}) - mu log d + log c atan((c - 1/c) / (2 cos mu))]``.
    """
    p = q4_params(a, b)
    if p.mu is None:
        return abs(math.log(p.c)) + abs(math.log(p.d))
    return q4_dilog_branch(p.c, p.d, p.mu)


def linear_factor_measure(c: float, d: float) -> float:
    """``m_{c,d}(1 + iw + iz + wz)``."""
    if not (c > 0 and d > 0):
        raise ValueError("c and d must be positive")
    base = max(math.log(c), 0.0)
    A = _cd_A(c, d)
    if abs(A) >= 1:
        return base + max(math.log(d), 0.0)
    mu = math.asin(A)
    lc = math.log(c)
    tail = lc * _atan_ratio(2 * math.cos(mu), c - 1 / c) if lc else 0.0
    return base + (_dilog_pair(c, mu) - tail + (math.pi / 2 - mu) * math.log(d)) / math.pi


class ArcCase(str, enum.Enum):
    ALL_BELOW = "all_below"  # |z(w)| <= d on the whole circle
    ALL_ABOVE = "all_above"  # |z(w)| > d on the whole circle
    SPLIT = "split"


@dataclass(frozen=True)
class ArcSplit:
    """Where ``|z(w)| > d`` on ``w = c e^{i theta}``: the arc ``sin theta < A``.

    For ``SPLIT`` the arc runs counter-clockwise from ``endpoints[0] = -pi - mu``
    to ``endpoints[1] = mu``.
    """

    case: ArcCase
    A: float
    endpoints: tuple[float, float] | None

    def contains(self, theta: float) -> bool:
        return math.sin(theta) < self.A


def arc_split(c: float, d: float) -> ArcSplit:
    A = _cd_A(c, d)
    if A <= -1:
        return ArcSplit(ArcCase.ALL_BELOW, A, None)
    if A >= 1:
        return ArcSplit(ArcCase.ALL_ABOVE, A, None)
    mu = math.asin(A)
    return ArcSplit(ArcCase.SPLIT, A, (-math.pi - mu, mu))


def arg_integral_closed(c: float, alpha: float, beta: float) -> float:
    """Change of ``arg((1 + iw)/(1 - iw))`` along ``w = c e^{i theta}`` from ``alpha`` to ``beta``."""
    if not c > 0:
        raise ValueError("c must be positive")
    if c == 1:
        return 0.0
    k = c - 1 / c
    return math.atan(2 * math.cos(alpha) / k) - math.atan(2 * math.cos(beta) / k)


def arg_integrand(c: float, psi: float) -> float:
    """``d arg((1 + iw)/(1 - iw)) / d psi`` with ``psi = theta + pi/2``."""
    k = 1 / c - c
    return 2 * k * math.cos(psi) / (k * k + 4 * math.sin(psi) ** 2)


def q4_poly() -> LaurentPoly:
    return family_q(2) + 4


def linear_factor_poly() -> LaurentPoly:
    """``1 + i w + i z + w z`` in variables ``(w, z)``."""
    return LaurentPoly({(0, 0): 1, (1, 0): 1j, (0, 1): 1j, (1, 1): 1}, 2)
