"""Kernel selection and thread fan-out.

The batched root solver comes from the compiled module when it imports;
``GMAHLER_PURE_PYTHON=1`` forces the numpy fallback.  Tensor-grid evaluation
always runs through numpy, whose BLAS path beat hand-written loops (see
``benchmarks/bench_kernels.py``).  ``GMAHLER_THREADS`` sets the worker count
for grid evaluation (default: CPU count, capped at 8).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

_kernels = _pykernels
if not os.environ.get("GMAHLER_PURE_PYTHON"):
    try:
        from . import _ckernels as _kernels  # type: ignore[no-redef]
    except ImportError:
        _kernels = _pykernels

BACKEND = "compiled" if _kernels is not _pykernels else "python"


def default_threads() -> int:
    env = os.environ.get("GMAHLER_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def _chunked(fn, tables, coeffs, threads):
    n0 = tables[0].shape[1]
    if threads <= 1 or n0 < 64 or (len(tables) == 1 and n0 < 1 << 16):
        return fn(tables, coeffs)
    bounds = np.linspace(0, n0, threads + 1).astype(int)
    jobs = [
        ([tables[0][:, lo:hi], *tables[1:]], coeffs)
        for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
    ]
    with ThreadPoolExecutor(len(jobs)) as pool:
        parts = list(pool.map(lambda job: fn(*job), jobs))
    return np.concatenate(parts, axis=0)


def eval_tensor(tables, coeffs, threads: int | None = None):
    return _chunked(_pykernels.eval_tensor, tables, coeffs, threads or default_threads())


def log_abs_tensor(tables, coeffs, threads: int | None = None):
    return _chunked(_pykernels.log_abs_tensor, tables, coeffs, threads or default_threads())


def aberth(coeffs, max_sweeps: int = 200, kernels=None):
    return (kernels or _kernels).aberth(coeffs, max_sweeps)


def get_kernels(name: str):
    """``"python"`` or ``"compiled"`` root-solver module (for benchmarks and parity tests)."""
    if name == "python":
        return _pykernels
    from . import _ckernels
    return _ckernels
