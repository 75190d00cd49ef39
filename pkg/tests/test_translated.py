import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geomapprox import (GeometricLaw, TranslatedBoundInputs, bound_via_mean_coupling,
                        bound_via_tv_coupling, convolve, exact_translated_tv, geometric_pmf,
                        point_mass)
from geomapprox import horizon


class TestCombiners:
    def test_mean_coupling_vanishes_when_p_is_one(self):
        b = bound_via_mean_coupling(TranslatedBoundInputs(0.0, 1.0, 0.7))
        assert b == 0.0

    def test_mean_coupling_arithmetic(self):
        b = bound_via_mean_coupling(TranslatedBoundInputs(0.1, 0.5, 0.2))
        assert b == pytest.approx(0.2, abs=1e-15)

    def test_mean_coupling_clamps_at_one(self):
        assert bound_via_mean_coupling(TranslatedBoundInputs(0.9, 0.5, 1.0)) == 1.0

    def test_tv_coupling_zero_term(self):
        assert bound_via_tv_coupling(TranslatedBoundInputs(0.0, 0.5, 0.0)) == 0.0

    def test_tv_coupling_arithmetic(self):
        b = bound_via_tv_coupling(TranslatedBoundInputs(0.0, 0.5, 0.1))
        assert b == pytest.approx(0.1, abs=1e-15)

    def test_tv_coupling_clamps_at_one(self):
        assert bound_via_tv_coupling(TranslatedBoundInputs(0.0, 0.1, 0.5)) == 1.0

    def test_rejects_invalid_p(self):
        with pytest.raises(ValueError):
            TranslatedBoundInputs(0.0, 0.0, 0.1)
        with pytest.raises(ValueError):
            TranslatedBoundInputs(0.0, 1.2, 0.1)

    @given(st.floats(0.0, 1.0), st.floats(0.05, 1.0), st.floats(0.0, 3.0),
           st.floats(0.0, 0.2), st.floats(0.0, 0.2), st.floats(0.0, 0.2))
    def test_monotone_in_every_field(self, q, p, term, dq, dp, dterm):
        base = TranslatedBoundInputs(q, p, term)
        bigger = TranslatedBoundInputs(min(1.0, q + dq), p, term + dterm)
        for fn in (bound_via_mean_coupling, bound_via_tv_coupling):
            assert fn(bigger) >= fn(base) - 1e-12
        # decreasing p can only increase the tv-combiner value
        smaller_p = TranslatedBoundInputs(q, max(0.05, p - dp), term)
        assert bound_via_tv_coupling(smaller_p) >= bound_via_tv_coupling(base) - 1e-12


class TestExactOracle:
    def test_exact_match_gives_zero(self):
        t = point_mass(3)
        w = convolve(geometric_pmf(GeometricLaw(0.4)), t)
        r = exact_translated_tv(w, t, 0.4)
        assert r.value <= 1e-12

    def test_zero_translation_reduces_to_geometric(self):
        w = geometric_pmf(GeometricLaw(0.3))
        r = exact_translated_tv(w, point_mass(0), 0.3)
        assert r.value <= 1e-12

    def test_gamma_count_within_horizon_bound(self):
        # cross-module: the exact distance obeys the gamma-horizon bound
        h = horizon.GammaUnitMean(2.0)
        lam = 1.0
        w = horizon.exact_count_pmf(h, lam)
        p = horizon.geom_param(h, lam)
        bound = horizon.gamma_bound_curve(lam, [2.0])[0][1]
        r = exact_translated_tv(w, point_mass(0), p)
        assert r.value <= bound + r.slack + 1e-12
