import numpy as np
import pytest
from scipy.integrate import quad

from annpair.bump import build_bump
from annpair.errors import TableRangeError


def hat_magnitude_by_quadrature(bump, s: float) -> float:
    """|psi_hat(s)| via oscillatory-weight quadrature, independent of the FFT."""

    def psi(t):
        return float(bump.psi(np.array([t]))[0])

    re = quad(psi, 0.0, 1.0, weight="cos", wvar=2 * np.pi * s, epsabs=1e-13, limit=200)[0]
    im = quad(psi, 0.0, 1.0, weight="sin", wvar=2 * np.pi * s, epsabs=1e-13, limit=200)[0]
    return float(np.hypot(re, im))


class TestNormalization:
    def test_unit_l2_time(self, bump):
        assert bump.l2_time == pytest.approx(1.0, abs=1e-8)

    def test_unit_l2_freq(self, bump):
        assert bump.l2_freq == pytest.approx(1.0, abs=1e-6)

    def test_mean_positive_and_matches_quadrature(self, bump):
        direct = quad(lambda t: float(bump.psi(np.array([t]))[0]), 0, 1, epsabs=1e-13)[0]
        assert bump.integral > 0
        assert bump.integral == pytest.approx(direct, abs=1e-10)

    def test_support_in_unit_interval(self, bump):
        ts = np.array([-0.5, -1e-9, 0.0, 1.0, 1.5])
        assert np.all(bump.psi(ts) == 0.0)

    def test_table_converged(self, bump):
        assert bump.refinement_error <= 1e-10 * np.max(np.abs(bump.table))


class TestDecayCertificate:
    def test_envelope_dominates_on_grid(self, bump):
        s = np.arange(bump.table.size - 2) * bump.table_step
        g = bump.table[1:-1]
        assert np.all(np.abs(g) <= bump.c1 / (1 + s * s) + 1e-15)

    def test_band_maxima_shrink_at_doubling_radii(self, bump):
        ratios = bump.band_ratios
        assert np.all(ratios <= 1.0 + 1e-12)
        peak_band = int(np.argmax(ratios))
        tail = ratios[peak_band:]
        assert np.all(np.diff(tail) < 0)
        assert tail[-1] < 1e-6  # far bands sit way below the envelope


class TestTransformTable:
    def test_matches_independent_quadrature(self, bump):
        rng = np.random.default_rng(11)
        ss = np.concatenate([rng.uniform(0, 12, 40), rng.uniform(12, 40, 10)])
        peak = float(np.abs(bump.table).max())
        for s in ss:
            oracle = hat_magnitude_by_quadrature(bump, float(s))
            got = float(np.abs(bump.hat_signed(s)))
            if oracle >= 1e-2 * peak:
                assert got == pytest.approx(oracle, rel=1e-8)
            else:
                assert got == pytest.approx(oracle, abs=1e-8 * peak)

    def test_even_in_s(self, bump):
        ss = np.linspace(0, 30, 101)
        np.testing.assert_allclose(bump.hat_signed(ss), bump.hat_signed(-ss), atol=0)

    def test_out_of_range_strict_raises(self, bump):
        with pytest.raises(TableRangeError):
            bump.hat_signed(bump.s_max + 5.0)

    def test_out_of_range_flagged_envelope(self, bump):
        vals, flags = bump.hat_abs_or_bound(np.array([1.0, bump.s_max + 5.0]))
        assert flags.tolist() == [False, True]
        assert vals[1] == pytest.approx(bump.c1 / (1 + (bump.s_max + 5.0) ** 2))

    def test_sq_integral_prefix(self, bump):
        h = bump.table_step
        g = bump.table[1:-1]
        for s_hi in (0.5, 3.0, 37.2):
            n = int(s_hi / h)
            oracle = float(np.trapezoid(g[: n + 1] ** 2, dx=h))
            val, rem = bump.hat_sq_integral(s_hi)
            assert rem == 0.0
            assert val == pytest.approx(oracle, abs=1e-9)

    def test_sq_integral_beyond_table_has_remainder(self, bump):
        val, rem = bump.hat_sq_integral(bump.s_max * 4)
        assert val == pytest.approx(0.5, abs=1e-6)  # half of the unit norm
        assert 0 < rem <= bump.c1**2 * bump.s_max**-3 / 3


class TestBuildOptions:
    def test_smaller_table(self):
        small = build_bump(grid_per_unit=512, zero_pad=1024, s_max=64.0, refine=False)
        assert small.s_max == 64.0
        assert small.l2_time == pytest.approx(1.0, abs=1e-8)

    def test_unknown_kind(self):
        with pytest.raises(KeyError):
            build_bump("no-such-shape")
