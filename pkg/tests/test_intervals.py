import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annpair.errors import GapCheckError
from annpair.intervals import (
    Interval,
    IntervalSet,
    PeriodicBlockUnion,
    PeriodicIntervalSet,
    complement_within,
    density_profile,
    epsilon_thin_check,
    periodic_gap_check,
    projection_and_multiplicity,
    sigma_from_gap,
)


def iset(*pairs):
    return IntervalSet(pairs)


# hypothesis strategy: sets with dyadic-rational endpoints so identities are exact
@st.composite
def dyadic_sets(draw, max_intervals=6, denom_bits=8, span=32):
    n = draw(st.integers(0, max_intervals))
    pairs = []
    for _ in range(n):
        a = draw(st.integers(-span * 2**denom_bits, span * 2**denom_bits))
        w = draw(st.integers(1, 2**denom_bits))
        pairs.append((a / 2**denom_bits, (a + w) / 2**denom_bits))
    return IntervalSet(pairs)


class TestInterval:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Interval(1.0, 1.0)
        with pytest.raises(ValueError):
            Interval(2.0, 1.0)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            Interval(0.0, float("inf"))

    def test_contains_half_open(self):
        iv = Interval(0.0, 1.0)
        assert iv.contains(0.0) and not iv.contains(1.0)


class TestUnion:
    def test_adjacent_merge(self):
        s = iset((0, 1)).union(iset((1, 2)))
        assert s.to_json() == [[0.0, 2.0]]
        assert s.measure() == 2.0

    def test_identity_with_empty(self):
        s = iset((0, 1))
        assert s.union(IntervalSet.empty()) == s

    def test_overlap_against_grid_oracle(self):
        a, b = iset((0, 2)), iset((1, 3))
        u = a.union(b)
        assert u.measure() == 3.0
        grid = np.linspace(-0.5, 3.5, 4001)
        expect = a.contains_points(grid) | b.contains_points(grid)
        np.testing.assert_array_equal(u.contains_points(grid), expect)

    @given(dyadic_sets(), dyadic_sets())
    @settings(max_examples=60, deadline=None)
    def test_inclusion_exclusion(self, a, b):
        lhs = a.union(b).measure() + a.intersect(b).measure()
        assert lhs == pytest.approx(a.measure() + b.measure(), abs=1e-12)

    @given(dyadic_sets())
    @settings(max_examples=40, deadline=None)
    def test_canonical_idempotent(self, s):
        assert IntervalSet(s.to_json()) == s

    @given(dyadic_sets())
    @settings(max_examples=40, deadline=None)
    def test_strict_gaps_between_intervals(self, s):
        assert np.all(s.los[1:] > s.his[:-1]) if len(s) > 1 else True


class TestIntersect:
    def test_basic(self):
        assert iset((0, 2)).intersect(iset((1, 3))).to_json() == [[1.0, 2.0]]

    def test_absorbing_empty(self):
        assert not iset((0, 2)).intersect(IntervalSet.empty())
        assert not PeriodicIntervalSet(iset((0, 0.1)), 1.0, 0, 9).intersect(IntervalSet.empty())

    def test_periodic_intersect_example(self):
        p = PeriodicIntervalSet(iset((0, 0.1)), 1.0, 0, 9)
        got = p.intersect(iset((0, 3)))
        assert got == iset((0, 0.1), (1, 1.1), (2, 2.1))

    @given(dyadic_sets(), dyadic_sets())
    @settings(max_examples=60, deadline=None)
    def test_intersect_grid_oracle(self, a, b):
        got = a.intersect(b)
        grid = np.linspace(-40, 40, 2001)
        np.testing.assert_array_equal(
            got.contains_points(grid), a.contains_points(grid) & b.contains_points(grid)
        )


class TestComplementWithin:
    def test_examples(self):
        assert iset((1, 2)).complement_within(Interval(0, 3)) == iset((0, 1), (2, 3))
        assert IntervalSet.empty().complement_within(Interval(0, 1)) == iset((0, 1))
        assert not iset((0, 3)).complement_within(Interval(1, 2))

    @given(dyadic_sets())
    @settings(max_examples=60, deadline=None)
    def test_partition_of_window(self, s):
        window = Interval(-8.0, 8.0)
        comp = s.complement_within(window)
        total = s.measure_within(window.lo, window.hi) + comp.measure()
        assert total == pytest.approx(window.length, abs=1e-12)


class TestMeasure:
    def test_empty(self):
        assert IntervalSet.empty().measure() == 0.0

    def test_periodic_counted(self):
        p = PeriodicIntervalSet(iset((0.0, 0.2)), 1.0, 1, 10)
        assert p.measure() == pytest.approx(2.0, abs=1e-15)
        assert p.measure() == pytest.approx(p.materialize_all().measure(), abs=1e-12)

    def test_measure_within_matches_materialized(self):
        p = PeriodicIntervalSet(iset((0.05, 0.25), (0.5, 0.6)), 0.7, -5, 12)
        for lo, hi in [(-1.3, 2.2), (0.0, 8.7), (-10, 20), (3.33, 3.34)]:
            assert p.measure_within(lo, hi) == pytest.approx(
                p.materialize(lo, hi).measure(), abs=1e-12
            )


class TestPeriodicSet:
    def test_pattern_must_fit_period(self):
        with pytest.raises(ValueError):
            PeriodicIntervalSet(iset((0.0, 1.5)), 1.0, 0, 1)

    def test_materialize_matches_brute_force(self):
        rng = np.random.default_rng(7)
        pat = iset((0.1, 0.2), (0.4, 0.45))
        p = PeriodicIntervalSet(pat, 0.5, -20, 40)
        for _ in range(25):
            a = rng.uniform(-12, 20)
            b = a + rng.uniform(0.01, 10)
            brute_pairs = []
            for k in range(-20, 41):
                for lo, hi in pat.to_json():
                    brute_pairs.append((k * 0.5 + lo, k * 0.5 + hi))
            brute = IntervalSet(brute_pairs).intersect(iset((a, b)))
            assert p.materialize(a, b) == brute

    def test_contains_matches_materialized(self):
        p = PeriodicIntervalSet(iset((0.2, 0.3)), 1.25, 0, 30)
        xs = np.random.default_rng(3).uniform(-2, 40, size=4000)
        mat = p.materialize(-2, 41)
        np.testing.assert_array_equal(p.contains_points(xs), mat.contains_points(xs))

    def test_json_roundtrip(self):
        p = PeriodicIntervalSet(iset((0.2, 0.3)), 1.25, -3, 30)
        assert PeriodicIntervalSet.from_json(p.to_json()) == p


class TestBlockUnion:
    def test_measure_and_contains(self):
        p1 = PeriodicIntervalSet(iset((0.0, 0.1)), 1.0, 0, 9)
        p2 = PeriodicIntervalSet(iset((0.0, 0.5)), 2.0, 0, 4)
        u = PeriodicBlockUnion([(100.0, p2), (0.0, p1)])
        assert u.measure() == pytest.approx(p1.measure() + p2.measure())
        assert u.contains_points(np.array([0.05, 100.25, 50.0])).tolist() == [True, True, False]
        assert u.measure_within(0, 1000) == pytest.approx(u.measure(), abs=1e-12)
        assert PeriodicBlockUnion.from_json(u.to_json()).measure() == u.measure()


class TestDensityProfile:
    def test_examples(self):
        assert density_profile(iset((0, 1)), [10.0]) == [(10.0, pytest.approx(0.1))]
        assert density_profile(IntervalSet.empty(), [3.0]) == [(3.0, 0.0)]
        with pytest.raises(ValueError):
            density_profile(iset((0, 1)), [0.0])


class TestThinness:
    def test_empty_passes(self):
        rep = epsilon_thin_check(IntervalSet.empty(), eps=1e-6, probes=[0.0, 5.0, -3.0])
        assert rep.passed

    def test_direct_failure(self):
        rep = epsilon_thin_check(iset((-1, 1)), eps=0.4, probes=[0.0])
        assert not rep.passed
        assert rep.worst_ratio == pytest.approx(2.0 / 0.8)
        assert rep.worst_probe == 0.0

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            epsilon_thin_check(IntervalSet.empty(), eps=0.0, probes=[0.0])


class TestGapCheck:
    def test_violation(self):
        assert not periodic_gap_check(iset((0.5, 0.7)), Interval(0.4, 0.6), 1.0)

    def test_empty_passes(self):
        assert periodic_gap_check(IntervalSet.empty(), Interval(0.4, 0.6), 1.0)

    def test_windowed(self):
        s = iset((10.45, 10.5))
        assert not periodic_gap_check(s, Interval(0.4, 0.6), 1.0)
        assert periodic_gap_check(s, Interval(0.4, 0.6), 1.0, window=Interval(0, 5))

    def test_periodic_set_with_integer_period(self):
        pat = iset((0.0, 0.3))
        assert periodic_gap_check(PeriodicIntervalSet(pat, 7.0, -3, 3), Interval(0.4, 0.6), 1.0)
        bad = PeriodicIntervalSet(iset((0.35, 0.45)), 7.0, -3, 3)
        assert not periodic_gap_check(bad, Interval(0.4, 0.6), 1.0)


class TestProjection:
    def test_worked_example(self):
        s = iset((0.2, 0.4), (1.2, 1.3), (2.5, 2.6))
        prof = projection_and_multiplicity(s)
        assert prof.value_at(0.25) == 2
        assert prof.value_at(0.35) == 1
        assert prof.value_at(0.55) == 1
        assert prof.value_at(0.45) == 0
        assert prof.value_at(0.95) == 0
        support = prof.support()
        # folded endpoints are computed (hi - cell), e.g. 2.6 - 2.0 is an ulp off 0.6
        np.testing.assert_allclose(support.los, [0.2, 0.5], atol=1e-12)
        np.testing.assert_allclose(support.his, [0.4, 0.6], atol=1e-12)
        assert prof.integral() == pytest.approx(s.measure(), abs=1e-12)

    def test_unit_interval(self):
        prof = projection_and_multiplicity(iset((0, 1)))
        assert prof.breakpoints == [(0.0, 1)]

    def test_empty(self):
        prof = projection_and_multiplicity(IntervalSet.empty())
        assert prof.breakpoints == [(0.0, 0)]
        assert prof.integral() == 0.0

    @given(dyadic_sets())
    @settings(max_examples=60, deadline=None)
    def test_integral_equals_measure(self, s):
        assert projection_and_multiplicity(s).integral() == pytest.approx(
            s.measure(), abs=1e-12
        )

    def test_superlevel_partition(self):
        s = iset((0.2, 0.4), (1.2, 1.3), (7.1, 7.9))
        prof = projection_and_multiplicity(s)
        above = prof.superlevel(0.5).measure()
        below = prof.superlevel(-1).measure() - above  # support of w>=0 is [0,1)
        assert above + below == pytest.approx(1.0, abs=1e-12)


class TestSigmaFromGap:
    def test_length_ratio(self):
        got = sigma_from_gap(iset((0.0, 0.2)), 1.0, Interval(0.4, 0.6))
        assert got.sigma == pytest.approx(0.2)
        assert got.offset == pytest.approx(0.4)

    def test_period_rescaling(self):
        got = sigma_from_gap(IntervalSet.empty(), 2.0, Interval(0.4, 0.6))
        assert got.sigma == pytest.approx(0.1)

    def test_failing_gap_raises(self):
        with pytest.raises(GapCheckError):
            sigma_from_gap(iset((0.5, 0.7)), 1.0, Interval(0.4, 0.6))
