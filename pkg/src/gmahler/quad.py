"""Trapezoidal averages over one or more angle variables.

Integrands are vectorized tensor-grid callables: ``f(theta_1, ..., theta_n)``
receives one 1-D array of angles per dimension and returns the values on their
tensor product (shape ``(len(theta_1), ..., len(theta_n))``).

Nodes whose value is non-finite or below ``log(singular_threshold)`` are
treated as sitting on a log singularity.  Such a node's cell is subdivided into
``2**L`` sub-cells per dimension and replaced by the mean over their midpoints,
ignoring midpoints that are themselves singular.  A node whose sub-cells are all
singular is skipped (contributes 0).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import SingularityDominated, UsageError

DEFAULT_NODES = {1: 4096, 2: 1024, 3: 128}
MAX_SKIPPED_FRACTION = 0.01


def default_nodes(n_dims: int) -> int:
    return DEFAULT_NODES.get(n_dims, 32)


@dataclass(frozen=True)
class GridSpec:
    """Grid sizes and singular-node policy.

    ``richardson`` (off by default) extrapolates ``v_N + (v_N - v_{N/2}) / 3``.
    It helps when the error really is ``O(h**2)``, as for transversal point
    zeros in two variables, and hurts when the error oscillates.
    """

    nodes_per_dim: tuple[int, ...]
    refinement_levels: int = 6
    singular_threshold: float = 1e-300
    richardson: bool = False

    def __post_init__(self):
        nodes = tuple(int(n) for n in self.nodes_per_dim)
        object.__setattr__(self, "nodes_per_dim", nodes)
        if not nodes:
            raise UsageError("nodes_per_dim must not be empty")
        for n in nodes:
            if n < 8 or n & (n - 1):
                raise UsageError(f"node counts must be powers of two >= 8, got {n}")
        if self.refinement_levels < 0:
            raise UsageError("refinement_levels must be non-negative")
        if not self.singular_threshold > 0:
            raise UsageError("singular_threshold must be positive")

    @classmethod
    def uniform(cls, n_dims: int, nodes: int | None = None, **kw) -> "GridSpec":
        return cls((nodes or default_nodes(n_dims),) * n_dims, **kw)

    @property
    def n_dims(self) -> int:
        return len(self.nodes_per_dim)

    @property
    def total_nodes(self) -> int:
        return math.prod(self.nodes_per_dim)


@dataclass(frozen=True)
class QuadResult:
    value: float
    est_error: float
    nodes_used: int
    skipped_nodes: int

    @property
    def low_confidence(self) -> bool:
        return self.skipped_nodes > MAX_SKIPPED_FRACTION * self.nodes_used

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "QuadResult":
        return cls(**{k: data[k] for k in ("value", "est_error", "nodes_used", "skipped_nodes")})


def angles(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def _singular_mask(values: np.ndarray, floor: float) -> np.ndarray:
    return ~np.isfinite(values) | (values < floor)


def _refine_cell(f, centre, widths, levels, floor) -> tuple[float, bool]:
    """Mean of ``f`` over ``2**levels`` midpoints per dimension of one cell."""
    k = 1 << levels
    offsets = (np.arange(k) + 0.5) / k - 0.5
    axes = [c + w * offsets for c, w in zip(centre, widths)]
    vals = np.asarray(f(*axes), dtype=float)
    good = ~_singular_mask(vals, floor)
    if not good.any():
        return 0.0, False
    return float(vals[good].mean()), True


def _trapezoid(f: Callable, spec: GridSpec) -> QuadResult:
    axes = [angles(n) for n in spec.nodes_per_dim]
    vals = np.array(f(*axes), dtype=float)
    if vals.shape != tuple(spec.nodes_per_dim):
        raise UsageError(f"integrand returned shape {vals.shape}, expected {spec.nodes_per_dim}")
    floor = math.log(spec.singular_threshold)
    bad = np.argwhere(_singular_mask(vals, floor))
    skipped = 0
    total = spec.total_nodes
    if len(bad) > MAX_SKIPPED_FRACTION * total and spec.refinement_levels == 0:
        raise SingularityDominated(f"{len(bad)} of {total} nodes are singular")
    widths = [2 * np.pi / n for n in spec.nodes_per_dim]
    for idx in bad:
        centre = [axes[d][i] for d, i in enumerate(idx)]
        ok = False
        value = 0.0
        if spec.refinement_levels:
            value, ok = _refine_cell(f, centre, widths, spec.refinement_levels, floor)
        vals[tuple(idx)] = value
        skipped += not ok
    if skipped > MAX_SKIPPED_FRACTION * total:
        raise SingularityDominated(f"{skipped} of {total} nodes remain singular after refinement")
    fine = float(vals.mean())
    coarse = float(vals[tuple(slice(None, None, 2) for _ in axes)].mean())
    err = abs(fine - coarse)
    value = fine + (fine - coarse) / 3 if spec.richardson else fine
    return QuadResult(value, err, total, skipped)


def periodic_integral_1d(f: Callable[[np.ndarray], np.ndarray], spec: GridSpec | None = None) -> QuadResult:
    """Average of ``f`` over ``[0, 2 pi)``; ``f`` maps an angle array to a value array."""
    spec = spec or GridSpec.uniform(1)
    if spec.n_dims != 1:
        raise UsageError("periodic_integral_1d needs a one-dimensional GridSpec")
    return _trapezoid(f, spec)


def periodic_integral_nd(f: Callable[..., np.ndarray], spec: GridSpec) -> QuadResult:
    """Average of ``f`` over the n-torus of angles, ``f(*axes)`` returning a tensor grid."""
    return _trapezoid(f, spec)


def grid_from_budget(n_dims: int, budget: int | None, nodes: int | None = None) -> int:
    """Largest power-of-two node count per dimension within ``budget`` total nodes."""
    n = nodes or default_nodes(n_dims)
    if budget is None:
        return n
    while n > 8 and n ** n_dims > budget:
        n //= 2
    return n
