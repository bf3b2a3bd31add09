import math

import numpy as np
import pytest

from gmahler.errors import UsageError
from gmahler.laurent import family_q, parse
from gmahler.region import (
    Kind,
    Membership,
    agreement_rate,
    build_region,
    cached_region,
    classify_point,
    ellipse_conditions,
    ellipse_membership,
    family_extremes,
)
from gmahler.winding import nu_pair

Q = family_q(2)


class TestExtremes:
    def test_unit(self):
        e = family_extremes(1, 1)
        assert (e.r_max, e.r_min, e.im_max) == (4, 0, 0)

    def test_ten_four(self):
        e = family_extremes(10, 4)
        assert e.r_max == pytest.approx(14.35)
        assert e.r_min == pytest.approx(5.85)
        assert e.im_max == pytest.approx(13.65)

    def test_reciprocal_pair(self):
        assert family_extremes(2, 0.5).r_min == 0

    def test_small_gap(self):
        expected = (1.5 + 1 / 1.5) - (1.07 + 1 / 1.07)
        assert family_extremes(1.5, 1.07).r_min == pytest.approx(expected, abs=1e-15)
        assert 0.162 < expected < 0.1621

    def test_rejects(self):
        with pytest.raises(UsageError):
            family_extremes(0, 1)


class TestEllipseConditions:
    def test_ten_four(self):
        c = ellipse_conditions(10, 4)
        assert c.outer_ok and c.inner_ok and c.inner_defined

    def test_close_radii(self):
        c = ellipse_conditions(1.5, 1.07)
        assert not c.outer_ok and not c.inner_ok

    def test_equal_radii_flagged(self):
        c = ellipse_conditions(2, 2)
        assert not c.inner_defined and not c.inner_ok

    def test_reciprocal_invariance(self):
        a, b = ellipse_conditions(10, 4), ellipse_conditions(0.1, 0.25)
        assert (a.outer_ok, a.inner_ok) == (b.outer_ok, b.inner_ok)
        assert a.x == pytest.approx(b.x) and a.y == pytest.approx(b.y)

    def test_to_dict(self):
        assert set(ellipse_conditions(3, 2).to_dict()) == {"outer_ok", "inner_ok", "inner_defined", "x", "y"}


class TestMembership:
    @pytest.mark.parametrize("r,expected", [
        (20, Membership.OUTSIDE),
        (0, Membership.INSIDE),
        (10, Membership.IN_REGION),
    ])
    def test_ten_four(self, r, expected):
        assert ellipse_membership(r, 10, 4) is expected

    def test_undecidable(self):
        assert ellipse_membership(0.05, 1.5, 1.07) is Membership.UNDECIDABLE


@pytest.fixture(scope="module")
def model_10_4():
    return build_region(Q, 10, 4)


class TestBuildRegion:
    def test_unit_torus_has_no_hole(self):
        m = build_region(Q, 1, 1)
        assert len(m.bounded) == 0
        assert classify_point(m, 0).kind is Kind.IN_REGION

    def test_ten_four_one_hole(self, model_10_4):
        assert len(model_10_4.bounded) == 1
        assert classify_point(model_10_4, 0).kind is Kind.BOUNDED
        assert classify_point(model_10_4, 0).index == 0

    def test_small_gap_hole(self):
        m = build_region(Q, 1.5, 1.07)
        assert len(m.bounded) == 1
        assert classify_point(m, 0).kind is Kind.BOUNDED

    def test_classify_far_point(self):
        m = cached_region(Q, 1.2, 1.1)
        assert classify_point(m, 6).kind is Kind.UNBOUNDED
        assert classify_point(m, 1e6).kind is Kind.UNBOUNDED

    def test_box_contains_extreme_disc(self, model_10_4):
        assert model_10_4.hi > family_extremes(10, 4).r_max + 1
        assert model_10_4.lo == -model_10_4.hi

    def test_exactly_one_unbounded(self, model_10_4):
        kinds = [c.kind for c in model_10_4.components]
        assert kinds.count(Kind.UNBOUNDED) == 1

    def test_samples_lie_in_region(self, model_10_4):
        s = model_10_4.samples.ravel()[::97]
        assert all(classify_point(model_10_4, z).kind is Kind.IN_REGION for z in s)

    def test_label_grid(self, model_10_4):
        g = model_10_4.label_grid()
        assert set(np.unique(g)) == {-1, 0, 1}

    def test_summary(self, model_10_4):
        s = model_10_4.summary()
        assert s["bounded_components"] == 1 and s["res"] == 1024

    def test_preconditions(self):
        with pytest.raises(UsageError):
            build_region(Q, 1, 1, n_angles=64)
        with pytest.raises(UsageError):
            build_region(parse("x + 1"), 1, 1)

    def test_immutable(self, model_10_4):
        with pytest.raises(ValueError):
            model_10_4.raster[0, 0] = True


def test_agreement_with_ellipses(model_10_4):
    rate, n = agreement_rate(model_10_4, 10, 4)
    assert n > 10_000
    assert rate >= 0.99


def test_at_most_one_bounded_component():
    rng = np.random.default_rng(5)
    for a, b in rng.uniform(0.3, 3, size=(20, 2)):
        assert len(build_region(Q, a, b, raster_res=512).bounded) <= 1


@pytest.mark.parametrize("a,b", [(10, 4), (3, 1.5), (1.5, 1.07)])
def test_representatives_match_winding(a, b):
    m = cached_region(Q, a, b)
    n1, n2 = nu_pair(Q + m.unbounded.representative, a, b)
    assert (n1.nu, n2.nu) == (0, 0)
    for comp in m.bounded:
        assert nu_pair(Q + comp.representative, a, b)[0].nu == 1


def test_general_polynomial():
    m = build_region(parse("x + y"), 2, 0.5)
    # -(x + y) covers the annulus 1.5 <= |r| <= 2.5
    assert len(m.bounded) == 1
    assert classify_point(m, 0).kind is Kind.BOUNDED
    assert classify_point(m, 2).kind is Kind.IN_REGION
    assert math.isclose(abs(m.bounded[0].representative), 0, abs_tol=3 * m.pixel)
