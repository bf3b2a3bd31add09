"""Pure numpy kernels.  Same signatures as the compiled ``_ckernels`` module."""

from __future__ import annotations

import numpy as np

EPS = np.finfo(float).eps


def eval_tensor(tables, coeffs):
    """Evaluate ``sum_t coeffs[t] * prod_d tables[d][t, k_d]`` on the full tensor grid.

    ``tables[d]`` has shape ``(T, N_d)`` and holds the per-term powers of the
    d-th coordinate at each node.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    n = len(tables)
    if n == 1:
        return coeffs @ tables[0]
    if n == 2:
        return (tables[0] * coeffs[:, None]).T @ tables[1]
    letters = "abcdefghijklmnopqrs"[:n]
    spec = ",".join(f"t{c}" for c in letters)
    return np.einsum(f"t,{spec}->{letters}", coeffs, *tables, optimize=True)


def log_abs_tensor(tables, coeffs):
    vals = eval_tensor(tables, coeffs)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(vals))


def _horner(coeffs, z):
    # coeffs (M, d+1) ascending, z (M, K)
    d = coeffs.shape[1] - 1
    p = np.broadcast_to(coeffs[:, d:d + 1], z.shape).astype(np.complex128)
    dp = np.zeros_like(p)
    scale = np.broadcast_to(np.abs(coeffs[:, d:d + 1]), z.shape).astype(float)
    az = np.abs(z)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(d - 1, -1, -1):
            dp = dp * z + p
            p = p * z + coeffs[:, k:k + 1]
            scale = scale * az + np.abs(coeffs[:, k:k + 1])
    return p, dp, scale


def newton_radii(coeffs):
    """Per-root starting moduli from the upper concave hull of ``(k, log|c_k|)``.

    Slopes of the hull bracket the root moduli even when they span hundreds of
    orders of magnitude, where a single geometric-mean circle stalls.
    """
    logs = np.log(np.maximum(np.abs(coeffs), 1e-300))
    m, d1 = logs.shape
    k = np.arange(d1)
    hull = logs.copy()
    for i in range(d1):
        for j in range(i + 2, d1):
            t = (k[i + 1:j] - i) / (j - i)
            chord = logs[:, i:i + 1] * (1 - t) + logs[:, j:j + 1] * t
            hull[:, i + 1:j] = np.maximum(hull[:, i + 1:j], chord)
    return np.exp(hull[:, :-1] - hull[:, 1:])


def initial_guesses(coeffs):
    d = coeffs.shape[1] - 1
    angles = 2 * np.pi * np.arange(d) / d + 0.4
    return newton_radii(coeffs) * np.exp(1j * angles)[None, :]


def aberth(coeffs, max_sweeps=200):
    """Aberth-Ehrlich iteration on a batch of polynomials.

    ``coeffs`` is ``(M, d+1)`` complex, ascending powers, with a nonzero leading
    column.  Returns ``(roots (M, d), converged (M,) bool, sweeps)``.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    m, d1 = coeffs.shape
    d = d1 - 1
    if d == 1:
        roots = (-coeffs[:, 0] / coeffs[:, 1])[:, None]
        return roots, np.ones(m, dtype=bool), 1
    z = initial_guesses(coeffs)
    done = np.zeros((m, d), dtype=bool)
    eye = np.eye(d, dtype=bool)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        p, dp, scale = _horner(coeffs, z)
        small = (np.abs(p) <= 4 * EPS * scale) & np.isfinite(scale)
        done |= small
        if done.all():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, :, None] - z[:, None, :]
            diff[:, eye] = 1.0
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            s = inv.sum(axis=2)
            w = ratio / (1 - ratio * s)
        finite = np.isfinite(w)
        w = np.where(finite & ~done, w, 0)
        z = z - w
        done |= finite & (np.abs(w) <= EPS * np.abs(z))
    p, dp, scale = _horner(coeffs, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = p / dp
    cand = z - np.where(np.isfinite(step), step, 0)
    p2, _, scale2 = _horner(coeffs, cand)
    better = np.abs(p2) < np.abs(p)
    z = np.where(better, cand, z)
    with np.errstate(invalid="ignore"):
        resid = np.minimum(np.abs(p2), np.abs(p)) / np.maximum(np.where(better, scale2, scale), 1e-300)
    converged = ((done | (resid <= 64 * EPS)) & np.isfinite(scale)).all(axis=1)
    return z, converged, sweeps
