import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomapprox import (GeometricLaw, Pmf, compound_pmf, convolve, geometric_pmf,
                        hazard_order_vs_geometric, point_mass, poisson_pmf, shift_tv,
                        stochastically_larger, tv_distance, uniform_pmf)


def weights_strategy(max_len=8):
    return st.lists(st.floats(0.01, 1.0), min_size=1, max_size=max_len)


def pmf_from_weights(weights):
    arr = np.asarray(weights)
    return Pmf(arr / arr.sum())


pmfs = weights_strategy().map(pmf_from_weights)


class TestPmfInvariants:
    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            Pmf(np.array([0.5, -0.1, 0.6]))

    def test_rejects_bad_normalisation(self):
        with pytest.raises(ValueError):
            Pmf(np.array([0.5, 0.4]))

    def test_rejects_negative_tail(self):
        with pytest.raises(ValueError):
            Pmf(np.array([1.0]), tail_mass=-1e-3)

    def test_probs_are_frozen(self):
        p = point_mass(2)
        with pytest.raises(ValueError):
            p.probs[0] = 1.0

    def test_json_round_trip(self):
        p = geometric_pmf(GeometricLaw(0.37))
        q = Pmf.from_json(p.to_json())
        assert np.array_equal(p.probs, q.probs)
        assert q.tail_mass == p.tail_mass

    @given(pmfs)
    def test_survival_matches_suffix_sums(self, p):
        surv = p.survival()
        for j in range(len(p)):
            assert surv[j] == pytest.approx(p.probs[j + 1:].sum() + p.tail_mass, abs=1e-14)


class TestGeometricPmf:
    def test_degenerate_parameter_is_point_mass(self):
        g = geometric_pmf(GeometricLaw(1.0))
        assert g.probs.tolist() == [1.0]
        assert g.tail_mass == 0.0

    def test_entry_value(self):
        g = geometric_pmf(GeometricLaw(0.5))
        assert g.probs[2] == pytest.approx(0.125, rel=1e-15)

    def test_explicit_horizon_records_exact_tail(self):
        g = geometric_pmf(GeometricLaw(0.3), horizon=200)
        assert g.tail_mass == pytest.approx(0.7**201, rel=1e-13)
        assert g.probs.sum() == pytest.approx(1.0 - 0.7**201, rel=1e-12)

    def test_auto_horizon_meets_budget(self):
        g = geometric_pmf(GeometricLaw(0.3), eps_tail=1e-12)
        assert g.tail_mass <= 1e-12

    def test_rejects_bad_parameter(self):
        for p in (0.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                GeometricLaw(p)


class TestTvDistance:
    def test_identical_laws(self):
        g = geometric_pmf(GeometricLaw(0.4))
        r = tv_distance(g, g)
        assert r.value == 0.0
        assert r.slack <= 2 * g.tail_mass

    def test_disjoint_point_masses(self):
        r = tv_distance(point_mass(0), point_mass(1))
        assert r.value == 1.0
        assert r.slack == 0.0

    def test_geometric_pair_against_direct_summation(self):
        a = geometric_pmf(GeometricLaw(0.5), horizon=400)
        b = geometric_pmf(GeometricLaw(0.25), horizon=400)
        # independent oracle: plain-python direct summation of the defining series
        oracle = 0.5 * sum(abs(0.5 * 0.5**k - 0.25 * 0.75**k) for k in range(401))
        r = tv_distance(a, b)
        assert r.value == pytest.approx(oracle, abs=1e-12)
        # single crossing at k in {1,2}: tv = (0.5 + 0.25) - (0.25 + 0.1875) = 5/16
        assert r.value == pytest.approx(0.3125, abs=1e-12)

    @given(pmfs, pmfs)
    def test_symmetry(self, a, b):
        assert tv_distance(a, b).value == tv_distance(b, a).value

    @given(pmfs, pmfs, pmfs)
    def test_triangle_inequality(self, a, b, c):
        dab = tv_distance(a, b).value
        dbc = tv_distance(b, c).value
        dac = tv_distance(a, c).value
        assert dac <= dab + dbc + 1e-12


class TestConvolve:
    def test_point_mass_zero_is_identity(self):
        g = geometric_pmf(GeometricLaw(0.6))
        out = convolve(point_mass(0), g)
        assert np.allclose(out.probs, g.probs, atol=1e-15)

    def test_point_masses_add(self):
        out = convolve(point_mass(2), point_mass(3))
        assert out.probs[5] == 1.0
        assert out.probs.sum() == 1.0

    def test_geometric_square_is_negative_binomial(self):
        g = geometric_pmf(GeometricLaw(0.5), horizon=60)
        out = convolve(g, g)
        k = np.arange(61)
        expected = (k + 1) * 0.25 * 0.5**k
        assert np.max(np.abs(out.probs[:61] - expected)) < 1e-14

    @given(pmfs, pmfs)
    def test_commutative(self, a, b):
        ab, ba = convolve(a, b), convolve(b, a)
        assert np.max(np.abs(ab.probs - ba.probs)) < 1e-13

    @given(pmfs, pmfs, pmfs)
    @settings(max_examples=40)
    def test_associative(self, a, b, c):
        left = convolve(convolve(a, b), c)
        right = convolve(a, convolve(b, c))
        assert np.max(np.abs(left.probs - right.probs)) < 1e-13


class TestCompound:
    def test_zero_count_gives_point_mass(self):
        out = compound_pmf(point_mass(0), point_mass(1))
        assert out.probs.tolist() == [1.0]

    def test_unit_summands_reproduce_count_law(self):
        n = poisson_pmf(1.3)
        out = compound_pmf(n, point_mass(1))
        assert np.max(np.abs(out.probs[:len(n)] - n.probs)) <= 1e-14

    def test_rejects_mass_at_zero(self):
        with pytest.raises(ValueError):
            compound_pmf(poisson_pmf(1.0), uniform_pmf(0, 2))

    def test_matches_geometric_compound_recursion(self):
        # independent oracle: the defective-renewal recursion
        # f(0) = r, f(s) = (1 - r) sum_j x_j f(s - j)
        r = 0.4
        n = geometric_pmf(GeometricLaw(r))
        x = uniform_pmf(1, 3)
        out = compound_pmf(n, x)
        f = [r]
        for s in range(1, len(out)):
            f.append((1 - r) * sum(x.probs[j] * f[s - j]
                                   for j in range(1, min(s, 3) + 1)))
        assert np.max(np.abs(out.probs - np.asarray(f))) < 1e-12

    def test_weight_at_zero_is_count_zero_mass(self):
        n = poisson_pmf(0.8)
        out = compound_pmf(n, uniform_pmf(1, 2))
        assert out.probs[0] == n.probs[0]


class TestHazardOrder:
    def test_geometric_is_boundary_case(self):
        g = geometric_pmf(GeometricLaw(0.35))
        assert hazard_order_vs_geometric(g, 0.35)

    def test_point_mass_fails(self):
        assert not hazard_order_vs_geometric(point_mass(5), 0.5)

    def test_poisson_matches_direct_sweep(self):
        n = poisson_pmf(2.0)
        p = float(n.probs[0])
        # brute-force sweep of the hazard condition on the survival values
        surv = [n.probs[j + 1:].sum() + n.tail_mass for j in range(len(n))]
        expected = all((1 - p) * n.probs[j] <= p * surv[j] * (1 + 1e-10) + 1e-18
                       for j in range(len(n)))
        assert hazard_order_vs_geometric(n, p) == expected

    def test_rejects_degenerate_parameter(self):
        with pytest.raises(ValueError):
            hazard_order_vs_geometric(point_mass(0), 1.0)


def _hazard_bounded_law(p, qs, eps_tail=1e-15):
    """Law with discrete hazards q_j <= p and an exact geometric continuation,
    so the hazard condition holds on the whole support."""
    probs = []
    alive = 1.0
    for q in [p] + list(qs):
        probs.append(alive * q)
        alive *= 1.0 - q
    k = math.ceil(math.log(eps_tail / max(alive, 1e-300)) / math.log1p(-p)) + 1
    for j in range(k):
        probs.append(alive * p * (1 - p) ** j)
    tail = alive * (1 - p) ** k
    return Pmf(np.asarray(probs), tail)


class TestStochasticOrderAndShift:
    def test_reflexive(self):
        g = geometric_pmf(GeometricLaw(0.3))
        assert stochastically_larger(g, g)

    def test_point_masses(self):
        assert stochastically_larger(point_mass(3), point_mass(2))
        assert not stochastically_larger(point_mass(2), point_mass(3))

    def test_smaller_rate_dominates(self):
        a = geometric_pmf(GeometricLaw(0.3))
        b = geometric_pmf(GeometricLaw(0.5))
        assert stochastically_larger(a, b)
        assert not stochastically_larger(b, a)

    def test_shift_tv_point_mass(self):
        assert shift_tv(point_mass(1)).value == 1.0

    def test_shift_tv_uniform_block(self):
        assert shift_tv(uniform_pmf(1, 4)).value == pytest.approx(0.25, abs=1e-15)

    @given(st.floats(0.2, 0.8), st.lists(st.floats(0.0, 1.0), min_size=0, max_size=6))
    @settings(max_examples=60)
    def test_hazard_condition_implies_shifted_conditional_dominance(self, p, fractions):
        n_law = _hazard_bounded_law(p, [f * p for f in fractions])
        assert hazard_order_vs_geometric(n_law, float(n_law.probs[0]))
        p0 = float(n_law.probs[0])
        shifted_conditional = Pmf(n_law.probs[1:] / (1 - p0), n_law.tail_mass / (1 - p0))
        assert stochastically_larger(shifted_conditional, n_law)
