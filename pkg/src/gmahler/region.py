"""The vanishing region of the family ``Q + r`` over a torus.

For a base polynomial ``Q`` and radii ``(a, b)`` the region is the set of
``r`` for which ``Q + r`` has a zero on the torus, i.e. the image ``-Q(T)``.
It is sampled, rasterized and its complement split into connected components;
the component touching the bounding box is the unbounded one.

For ``Q = x + 1/x + y + 1/y`` there are closed-form extremes and, under
explicit conditions on ``log a`` and ``log b``, two ellipses that bound the
region exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage

from . import _backend
from .errors import UsageError
from .laurent import LaurentPoly
from .measure import as_torus, power_tables

MAX_ANGLES = 8192
NOISE_PIXELS = 9
FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


class Kind(str, enum.Enum):
    IN_REGION = "in_region"
    UNBOUNDED = "unbounded"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    index: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "index": self.index}


@dataclass(frozen=True)
class Component:
    label: int
    kind: Kind
    pixels: int
    representative: complex


@dataclass(frozen=True)
class RegionModel:
    """Rasterized region and labeled complement.

    ``raster[i, j]`` covers ``re = lo + (j + 1/2) * pixel`` and
    ``im = lo + (i + 1/2) * pixel``.  ``labels`` is 0 on the region and the
    ``scipy.ndimage.label`` id elsewhere.
    """

    radii: tuple[float, float]
    lo: float
    hi: float
    res: int
    raster: np.ndarray
    labels: np.ndarray
    components: tuple[Component, ...]
    samples: np.ndarray
    angles_used: tuple[int, int]

    @property
    def pixel(self) -> float:
        return (self.hi - self.lo) / self.res

    @property
    def bounded(self) -> tuple[Component, ...]:
        return tuple(c for c in self.components if c.kind is Kind.BOUNDED)

    @property
    def unbounded(self) -> Component:
        return next(c for c in self.components if c.kind is Kind.UNBOUNDED)

    def pixel_of(self, r: complex) -> tuple[int, int] | None:
        j = math.floor((r.real - self.lo) / self.pixel)
        i = math.floor((r.imag - self.lo) / self.pixel)
        if 0 <= i < self.res and 0 <= j < self.res:
            return i, j
        return None

    def centre(self, i: int, j: int) -> complex:
        return complex(self.lo + (j + 0.5) * self.pixel, self.lo + (i + 0.5) * self.pixel)

    def label_grid(self) -> np.ndarray:
        """Per-pixel code: -1 region, 0 unbounded, k >= 1 the k-th bounded component."""
        code = np.full(self.labels.shape, -1, dtype=np.int32)
        for k, comp in enumerate(self.components):
            code[self.labels == comp.label] = 0 if comp.kind is Kind.UNBOUNDED else k
        return code

    def summary(self) -> dict:
        return {
            "radii": list(self.radii),
            "box": [self.lo, self.hi],
            "res": self.res,
            "angles": list(self.angles_used),
            "bounded_components": len(self.bounded),
            "components": [
                {"kind": c.kind.value, "pixels": c.pixels,
                 "representative": [c.representative.real, c.representative.imag]}
                for c in self.components
            ],
        }


def _lipschitz(exps: np.ndarray, coeffs: np.ndarray, radii) -> list[float]:
    mags = np.abs(coeffs) * np.prod(np.asarray(radii, dtype=float)[None, :] ** exps, axis=1)
    return [float((mags * np.abs(exps[:, d])).sum()) for d in range(exps.shape[1])]


def _next_pow2(n: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


MIN_ANGLES, MIN_RES = 256, 512


def build_region(Q: LaurentPoly, a: float, b: float, n_angles: int = 256, raster_res: int = 1024) -> RegionModel:
    """Sample ``-Q`` on the torus, rasterize with a 1-pixel dilation and label the complement.

    The angular grid is refined beyond ``n_angles`` per dimension when needed so
    that consecutive samples land at most one pixel apart.
    """
    if Q.n_vars != 2:
        raise UsageError("the region is defined for two-variable polynomials")
    if n_angles < MIN_ANGLES or raster_res < MIN_RES:
        raise UsageError(f"need n_angles >= {MIN_ANGLES} and raster_res >= {MIN_RES}")
    radii = as_torus((a, b), 2).radii
    exps, coeffs = Q.arrays()
    reach = Q.sup_bound(radii) + 1.0
    hi = 1.05 * reach
    lo = -hi
    pixel = (hi - lo) / raster_res
    lips = _lipschitz(exps, coeffs, radii)
    n = [min(MAX_ANGLES, max(n_angles, _next_pow2(2 * math.pi * L / pixel))) for L in lips]
    th = [2 * np.pi * np.arange(k) / k for k in n]
    raster = np.zeros((raster_res, raster_res), dtype=bool)
    ytab = power_tables(exps, radii, [np.zeros(1), th[1]])[1]
    chunk = max(1, (1 << 21) // n[1])
    for start in range(0, n[0], chunk):
        xs = th[0][start:start + chunk]
        xtab = power_tables(exps, radii, [xs, np.zeros(1)])[0]
        vals = -_backend.eval_tensor([xtab, ytab], coeffs).ravel()
        j = np.clip(((vals.real - lo) / pixel).astype(np.int64), 0, raster_res - 1)
        i = np.clip(((vals.imag - lo) / pixel).astype(np.int64), 0, raster_res - 1)
        raster[i, j] = True
    raster = ndimage.binary_dilation(raster, structure=np.ones((3, 3), dtype=bool))
    labels, count = ndimage.label(~raster, structure=FOUR_CONNECTED)
    # specks left by rasterization are folded into the region
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))) - {0}
    noise = [k for k in range(1, count + 1) if sizes[k] < NOISE_PIXELS and k not in border]
    if noise:
        speck = np.isin(labels, noise)
        raster = raster | speck
        labels[speck] = 0
    components = []
    for k in range(1, count + 1):
        if k in noise:
            continue
        mask = labels == k
        kind = Kind.UNBOUNDED if k in border else Kind.BOUNDED
        if kind is Kind.UNBOUNDED:
            rep = complex(hi - pixel / 2, 0.0)
        else:
            dist = ndimage.distance_transform_edt(mask)
            i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
            rep = complex(lo + (j + 0.5) * pixel, lo + (i + 0.5) * pixel)
        components.append(Component(k, kind, int(sizes[k]), rep))
    coarse = [2 * np.pi * np.arange(n_angles) / n_angles] * 2
    samples = -_backend.eval_tensor(power_tables(exps, radii, coarse), coeffs)
    for arr in (raster, labels, samples):
        arr.setflags(write=False)
    return RegionModel(radii, lo, hi, raster_res, raster, labels, tuple(components), samples, tuple(n))


@lru_cache(maxsize=32)
def cached_region(Q: LaurentPoly, a: float, b: float, n_angles: int = 256, raster_res: int = 1024) -> RegionModel:
    return build_region(Q, a, b, n_angles, raster_res)


def classify_point(model: RegionModel, r: complex) -> Classification:
    r = complex(r)
    px = model.pixel_of(r)
    if px is None:
        return Classification(Kind.UNBOUNDED)
    if model.raster[px]:
        return Classification(Kind.IN_REGION)
    label = model.labels[px]
    bounded = [c.label for c in model.bounded]
    if label in bounded:
        return Classification(Kind.BOUNDED, bounded.index(label))
    return Classification(Kind.UNBOUNDED)


# ---------------------------------------------------------------------------
# Closed-form geometry for x + 1/x + y + 1/y
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyExtremes:
    r_max: float
    r_min: float
    im_max: float


def family_extremes(a: float, b: float) -> FamilyExtremes:
    if not (a > 0 and b > 0):
        raise UsageError("radii must be positive")
    sa, sb = a + 1 / a, b + 1 / b
    return FamilyExtremes(sa + sb, abs(sa - sb), abs(a - 1 / a) + abs(b - 1 / b))


@dataclass(frozen=True)
class EllipseConditions:
    outer_ok: bool
    inner_ok: bool
    inner_defined: bool
    x: float
    y: float

    def to_dict(self) -> dict:
        return {"outer_ok": self.outer_ok, "inner_ok": self.inner_ok,
                "inner_defined": self.inner_defined, "x": self.x, "y": self.y}


def ellipse_conditions(a: float, b: float) -> EllipseConditions:
    """Sufficient conditions for the outer and inner ellipse descriptions.

    The region is unchanged under ``a -> 1/a`` and ``b -> 1/b``, so the
    predicates are evaluated at ``x = |log a|``, ``y = |log b|``.  The inner
    condition needs ``a != b``; for ``a == b`` it is reported as not holding
    with ``inner_defined = False``.
    """
    if not (a > 0 and b > 0):
        raise UsageError("radii must be positive")
    x, y = abs(math.log(a)), abs(math.log(b))
    big = max(math.sinh(x) ** 2, math.sinh(y) ** 2)
    outer = math.sinh((x + y) / 2) ** 2 * (1 + math.cosh(x) * math.cosh(y)) >= big
    defined = x != y
    inner = defined and (
        min(abs(math.tanh(y) * math.cosh(x)), abs(math.tanh(x) * math.cosh(y))) > 1
        and math.cosh((x + y) / 2) ** 2 * (math.cosh(x) * math.cosh(y) - 1) >= big
    )
    return EllipseConditions(bool(outer), bool(inner), defined, x, y)


class Membership(str, enum.Enum):
    IN_REGION = "in_region"
    OUTSIDE = "outside"
    INSIDE = "inside"
    UNDECIDABLE = "undecidable"


def _ellipse_value(r: complex, u: float, v: float) -> float:
    # (Re r / u)^2 + (Im r / v)^2 with the degenerate axes handled as limits
    def term(t, s):
        if s == 0:
            return 0.0 if t == 0 else math.inf
        return (t / s) ** 2

    return term(r.real, u) + term(r.imag, v)


def ellipse_membership(r: complex, a: float, b: float) -> Membership:
    """Decide membership from the two ellipses where their conditions allow it.

    Outside the outer ellipse is decided when the outer condition holds, inside
    the inner one when the inner condition holds, and the annulus between them
    only when both hold.
    """
    r = complex(r)
    cond = ellipse_conditions(a, b)
    x, y = cond.x, cond.y
    outer = _ellipse_value(r, 2 * (math.cosh(x) + math.cosh(y)), 2 * (math.sinh(x) + math.sinh(y)))
    if cond.outer_ok and outer > 1:
        return Membership.OUTSIDE
    if cond.inner_ok:
        inner = _ellipse_value(r, 2 * abs(math.cosh(x) - math.cosh(y)), 2 * abs(math.sinh(x) - math.sinh(y)))
        if inner < 1:
            return Membership.INSIDE
        if cond.outer_ok:
            return Membership.IN_REGION
    return Membership.UNDECIDABLE


def near_ellipse_boundary(r: complex, a: float, b: float, margin: float) -> bool:
    """True when moving ``r`` by ``margin`` in one of 8 directions changes its membership."""
    base = ellipse_membership(r, a, b)
    for k in range(8):
        if ellipse_membership(r + margin * complex(math.cos(k * math.pi / 4), math.sin(k * math.pi / 4)), a, b) != base:
            return True
    return False


_MEMBERSHIP_TO_KIND = {
    Membership.IN_REGION: Kind.IN_REGION,
    Membership.OUTSIDE: Kind.UNBOUNDED,
    Membership.INSIDE: Kind.BOUNDED,
}


def agreement_rate(model: RegionModel, a: float, b: float, n: int = 200, margin_pixels: float = 2.0) -> tuple[float, int]:
    """Fraction of an ``n x n`` grid over the box where raster and ellipses agree.

    Points within ``margin_pixels`` of either ellipse, and undecidable points,
    are excluded.  Returns ``(rate, points_compared)``.
    """
    pts = model.lo + (np.arange(n) + 0.5) * (model.hi - model.lo) / n
    margin = margin_pixels * model.pixel
    agree = total = 0
    for im in pts:
        for re in pts:
            r = complex(re, im)
            mem = ellipse_membership(r, a, b)
            if mem is Membership.UNDECIDABLE or near_ellipse_boundary(r, a, b, margin):
                continue
            total += 1
            agree += classify_point(model, r).kind is _MEMBERSHIP_TO_KIND[mem]
    return (agree / total if total else float("nan")), total
