import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gmahler.errors import SingularityDominated, UsageError
from gmahler.quad import (
    GridSpec,
    QuadResult,
    angles,
    default_nodes,
    grid_from_budget,
    periodic_integral_1d,
    periodic_integral_nd,
)
from gmahler.special import smyth_constant

ZETA3 = 1.2020569031595942854


def log_abs(g):
    # integrand-side noise floor: values at rounding level count as exact zeros
    a = np.abs(g)
    with np.errstate(divide="ignore"):
        return np.where(a < 1e-13, -np.inf, np.log(a))


class TestGridSpec:
    def test_defaults(self):
        assert GridSpec.uniform(1).nodes_per_dim == (4096,)
        assert GridSpec.uniform(2).nodes_per_dim == (1024, 1024)
        assert GridSpec.uniform(3).nodes_per_dim == (128, 128, 128)
        assert default_nodes(5) == 32

    @pytest.mark.parametrize("n", [4, 12, 0, 1000])
    def test_power_of_two(self, n):
        with pytest.raises(UsageError):
            GridSpec((n,))

    def test_bad_threshold(self):
        with pytest.raises(UsageError):
            GridSpec((64,), singular_threshold=0)

    def test_total(self):
        assert GridSpec((16, 32)).total_nodes == 512

    def test_budget(self):
        assert grid_from_budget(2, None) == 1024
        assert grid_from_budget(2, 100_000) == 256
        assert grid_from_budget(3, 10) == 8
        assert grid_from_budget(1, 10**9, 512) == 512


class TestOneDimensional:
    def test_cosine(self):
        r = periodic_integral_1d(np.cos)
        assert abs(r.value) < 1e-15
        assert r.skipped_nodes == 0 and r.nodes_used == 4096

    def test_jensen_outside(self):
        r = periodic_integral_1d(lambda t: np.log(np.abs(np.exp(1j * t) - 2)))
        assert r.value == pytest.approx(math.log(2), abs=1e-15)

    def test_jensen_inside(self):
        r = periodic_integral_1d(lambda t: np.log(np.abs(np.exp(1j * t) - 0.5)))
        assert abs(r.value) < 1e-15

    def test_spectral_convergence(self):
        f = lambda t: np.log(np.abs(np.exp(1j * t) - 2))
        errs = [abs(periodic_integral_1d(f, GridSpec((n,))).value - math.log(2)) for n in (8, 16, 32)]
        # error(2N) <= C error(N)^2 with a modest constant
        assert errs[1] <= 10 * errs[0] ** 2
        assert errs[2] <= 10 * errs[1] ** 2

    def test_error_estimate_bounds_error(self):
        f = lambda t: np.log(np.abs(np.exp(1j * t) - 1.1))
        r = periodic_integral_1d(f, GridSpec((64,)))
        assert abs(r.value - math.log(1.1)) <= r.est_error

    def test_refinement_converges_monotonically(self):
        f = lambda t: log_abs(np.exp(1j * t) + 1)
        vals = [periodic_integral_1d(f, GridSpec((64,), refinement_levels=L)).value for L in range(1, 6)]
        steps = np.abs(np.diff(vals))
        assert np.all(np.diff(steps) < 0)

    def test_boundary_zero_integrates(self):
        r = periodic_integral_1d(lambda t: log_abs(np.exp(1j * t) + 1))
        assert abs(r.value) < 1e-3
        assert r.skipped_nodes == 0

    def test_unrefined_singularities_dominate(self):
        with pytest.raises(SingularityDominated):
            periodic_integral_1d(lambda t: log_abs(np.exp(1j * t) + 1), GridSpec((64,), refinement_levels=0))

    def test_everywhere_singular(self):
        with pytest.raises(SingularityDominated):
            periodic_integral_1d(lambda t: np.full_like(t, -np.inf), GridSpec((64,)))

    def test_wrong_shape(self):
        with pytest.raises(UsageError):
            periodic_integral_1d(lambda t: np.zeros(3), GridSpec((64,)))

    def test_wrong_dimension(self):
        with pytest.raises(UsageError):
            periodic_integral_1d(np.cos, GridSpec((8, 8)))

    def test_richardson_option(self):
        f = lambda t: log_abs(np.exp(1j * t) + 1)
        plain = periodic_integral_1d(f, GridSpec((256,)))
        extra = periodic_integral_1d(f, GridSpec((256,), richardson=True))
        assert extra.value != plain.value
        assert extra.est_error == plain.est_error

    @given(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
    def test_jensen_property(self, r, phase):
        # (1/2pi) int log|e^{it} - z0| = log max(|z0|, 1)
        z0 = r * np.exp(1j * phase)
        for z in (z0, 1 / z0):
            v = periodic_integral_1d(lambda t: np.log(np.abs(np.exp(1j * t) - z))).value
            assert v == pytest.approx(math.log(max(abs(z), 1)), abs=1e-10)


class TestMultiDimensional:
    def test_constant(self):
        r = periodic_integral_nd(lambda a, b: np.ones((len(a), len(b))), GridSpec((16, 16)))
        assert r.value == 1

    def test_smyth_two(self):
        f = lambda a, b: log_abs(np.exp(1j * a)[:, None] + np.exp(1j * b)[None, :] + 1)
        r = periodic_integral_nd(f, GridSpec.uniform(2))
        assert r.value == pytest.approx(smyth_constant(), abs=1e-6)

    def test_smyth_three(self):
        def f(a, b, c):
            x = np.exp(1j * a)[:, None, None]
            y = np.exp(1j * b)[None, :, None]
            z = np.exp(1j * c)[None, None, :]
            return log_abs(1 + x + y + z)

        r = periodic_integral_nd(f, GridSpec.uniform(3))
        assert r.value == pytest.approx(7 * ZETA3 / (2 * math.pi ** 2), abs=1e-3)

    def test_separable(self):
        f = lambda a, b: np.cos(a)[:, None] ** 2 + np.sin(b)[None, :] ** 2
        assert periodic_integral_nd(f, GridSpec((32, 64))).value == pytest.approx(1.0, abs=1e-15)


class TestQuadResult:
    def test_round_trip(self):
        r = QuadResult(0.5, 1e-9, 1024, 3)
        assert QuadResult.from_dict(r.to_dict()) == r

    def test_low_confidence(self):
        assert QuadResult(0, 0, 100, 2).low_confidence
        assert not QuadResult(0, 0, 1000, 2).low_confidence


def test_angles():
    a = angles(8)
    assert a[0] == 0 and len(a) == 8
    assert a[-1] == pytest.approx(7 * math.pi / 4)
