import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gmahler import _backend, _pykernels
from gmahler.laurent import evaluate, family_q, parse
from gmahler.measure import power_tables

try:
    from gmahler import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def random_batch(seed, m, d):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(m, d + 1)) + 1j * rng.normal(size=(m, d + 1))
    c[:, d] += 0.5 * np.sign(c[:, d].real)
    return c


def residuals(coeffs, roots):
    vals = np.array([np.polyval(c[::-1], r) for c, r in zip(coeffs, roots)])
    scale = np.array([np.polyval(np.abs(c[::-1]), np.abs(r)) for c, r in zip(coeffs, roots)])
    return np.abs(vals) / scale


@pytest.mark.parametrize("d", [1, 2, 5, 12])
def test_python_aberth_backward_error(d):
    c = random_batch(d, 200, d)
    roots, conv, _ = _pykernels.aberth(c)
    assert conv.all()
    assert residuals(c, roots).max() < 1e-13


def test_python_aberth_matches_numpy_roots():
    c = random_batch(3, 50, 6)
    roots, _, _ = _pykernels.aberth(c)
    for row, r in zip(c, roots):
        ref = np.sort_complex(np.roots(row[::-1]))
        assert np.allclose(np.sort_complex(r), ref, atol=1e-9)


@needs_ext
@pytest.mark.parametrize("d", [1, 2, 6, 20])
def test_compiled_matches_python(d):
    c = random_batch(10 + d, 300, d)
    rp, cp, _ = _pykernels.aberth(c)
    rc, cc, _ = _ckernels.aberth(c)
    assert cp.all() and cc.all()
    for a, b in zip(rp, rc):
        assert np.allclose(np.sort_complex(a), np.sort_complex(b), atol=1e-10)
    assert residuals(c, rc).max() < 1e-13


@needs_ext
def test_compiled_handles_zero_constant():
    c = np.array([[0, 0, 1, 1]], dtype=complex)
    roots, conv, _ = _ckernels.aberth(c)
    assert conv.all()
    assert np.allclose(np.sort_complex(roots[0]), [-1, 0, 0], atol=1e-7)


def test_get_kernels():
    assert _backend.get_kernels("python") is _pykernels
    if _ckernels is not None:
        assert _backend.get_kernels("compiled") is _ckernels


def test_backend_label():
    assert _backend.BACKEND in ("compiled", "python")
    if _ckernels is None:
        assert _backend.BACKEND == "python"


def test_pure_python_switch():
    env = dict(os.environ, GMAHLER_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import gmahler; print(gmahler.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_threads_env(monkeypatch):
    monkeypatch.setenv("GMAHLER_THREADS", "3")
    assert _backend.default_threads() == 3
    monkeypatch.setenv("GMAHLER_THREADS", "0")
    assert _backend.default_threads() == 1


@pytest.mark.parametrize("text,radii", [
    ("x + 1/x + y + 1/y + 3", (1.3, 0.7)),
    ("(1+2i)*x^2*y^-1 - 3*y + 0.5", (0.9, 1.6)),
    ("x + y + z + 1", (1.0, 2.0, 0.5)),
])
def test_eval_tensor_brute_force(text, radii):
    p = parse(text)
    n = p.n_vars
    axes = [np.linspace(0, 2 * np.pi, 8, endpoint=False) + 0.1 * k for k in range(n)]
    exps, coeffs = p.arrays()
    grid = _backend.eval_tensor(power_tables(exps, radii, axes), coeffs)
    for idx in np.ndindex(*grid.shape):
        pt = [r * np.exp(1j * axes[d][i]) for d, (r, i) in enumerate(zip(radii, idx))]
        assert abs(grid[idx] - evaluate(p, pt)) < 1e-12


@given(st.integers(1, 8))
def test_threaded_eval_matches_serial(threads):
    p = family_q(2) + 2
    axes = [np.linspace(0, 2 * np.pi, 128, endpoint=False)] * 2
    exps, coeffs = p.arrays()
    tables = power_tables(exps, (1.1, 0.9), axes)
    serial = _backend.eval_tensor(tables, coeffs, threads=1)
    par = _backend.eval_tensor(tables, coeffs, threads=threads)
    assert np.array_equal(serial, par)


def test_log_abs_tensor_zero_is_minus_inf():
    p = parse("x + 1")
    axes = [np.array([0.0, np.pi / 2])]
    exps, coeffs = p.arrays()
    tables = power_tables(exps, (1.0,), axes)
    tables[0][:, 0] = [1, -1]
    out = _backend.log_abs_tensor(tables, coeffs)
    assert out[0] == -np.inf


@pytest.mark.parametrize("zs", [[1, 7.874808125078668e-237], [1, 1e-100], [1e60, 1, 1e-60, 3]])
@pytest.mark.parametrize("name", ["python", "compiled"])
def test_widely_spread_moduli(zs, name):
    if name == "compiled" and _ckernels is None:
        pytest.skip("compiled extension not built")
    c = np.poly(zs)[::-1].astype(complex)
    roots, conv, _ = _backend.get_kernels(name).aberth(c[None])
    assert conv.all()
    got = sorted(roots[0], key=abs)
    for g, z in zip(got, sorted(zs)):
        assert abs(g - z) <= 1e-12 * abs(z)


def test_newton_radii_bracket_roots():
    zs = [1e-8, 1e-3, 1, 50, 1e6]
    c = np.poly(zs)[::-1][None].astype(complex)
    est = _pykernels.newton_radii(c)[0]
    assert np.all(np.abs(np.log10(est) - np.log10(zs)) < 0.5)


@pytest.mark.parametrize("name", ["python", "compiled"])
def test_overflowing_root_not_reported_converged(name):
    if name == "compiled" and _ckernels is None:
        pytest.skip("compiled extension not built")
    c = np.poly([1e200, 1, 1e-200, 3])[::-1].astype(complex)
    _, conv, _ = _backend.get_kernels(name).aberth(c[None])
    assert not conv.any()
