import numpy as np
import pytest

from dispersim.decay import (
    DecayFit,
    ExponentTable,
    TorusData,
    alpha_p_empirical,
    alpha_p_theory,
    fit_decay,
    kernel_lp_norm,
    torus_l1_norm,
    torus_supnorm,
)
from dispersim.errors import ResourceLimitError


class TestFitDecay:
    def test_exact_power_law(self):
        t = np.geomspace(1, 100, 20)
        fit = fit_decay(t, t ** (-1.0 / 3.0))
        assert fit.slope == pytest.approx(-1.0 / 3.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant_norms(self):
        t = np.geomspace(1, 100, 10)
        fit = fit_decay(t, np.full(10, 2.5))
        assert fit.slope == pytest.approx(0.0, abs=1e-14)

    def test_planted_exponents_recovered(self, rng):
        for _ in range(100):
            planted = float(rng.uniform(-1.0, -0.1))
            t = np.geomspace(1, 1e3, 30)
            noise = 1.0 + 0.01 * rng.normal(size=t.size)
            fit = fit_decay(t, t**planted * noise)
            assert abs(fit.slope - planted) <= 0.01
            assert fit.r_squared >= 0.999

    def test_window_restricts(self):
        t = np.geomspace(1, 100, 30)
        y = t**-0.5
        y[:5] = 10.0  # garbage outside the window
        fit = fit_decay(t, y, window=(5.0, 100.0))
        assert fit.slope == pytest.approx(-0.5, abs=1e-10)
        assert fit.window == (5.0, 100.0)

    def test_rejections(self):
        t = np.geomspace(1, 10, 10)
        with pytest.raises(ValueError):
            fit_decay(t, np.zeros(10))  # nonpositive norms
        with pytest.raises(ValueError):
            fit_decay(t, t**-0.5, window=(5.0, 5.0))  # degenerate window
        with pytest.raises(ValueError):
            fit_decay(t[:5], t[:5] ** -0.5)  # too few samples
        with pytest.raises(ValueError):
            fit_decay(t[::-1], t**-0.5)  # not increasing


class TestAlphaPTheory:
    def test_endpoints(self):
        assert alpha_p_theory(2.0) == 0.0
        assert alpha_p_theory(np.inf) == pytest.approx(1.0 / 3.0, abs=0)
        assert alpha_p_theory(4.0) == 0.25

    def test_branch_values(self):
        assert alpha_p_theory(3.0) == pytest.approx(1.0 / 6.0, abs=1e-15)
        assert alpha_p_theory(6.0) == pytest.approx(5.0 / 18.0, abs=1e-15)

    def test_continuity_at_four(self):
        eps = 1e-9
        assert abs(alpha_p_theory(4.0 - eps) - 0.25) < 1e-9
        assert abs(alpha_p_theory(4.0 + eps) - 0.25) < 1e-9

    def test_nondecreasing_on_grid(self):
        grid = [2.0, 2.5, 3.0, 4.0, 5.0, 8.0, 16.0, np.inf]
        vals = [alpha_p_theory(p) for p in grid]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_rejects_small_p(self):
        with pytest.raises(ValueError):
            alpha_p_theory(1.5)

    def test_table(self):
        table = ExponentTable.on_grid([2.0, 4.0, np.inf])
        assert table.entries[0] == (2.0, 0.0)
        assert table.entries[1] == (4.0, 0.25)


class TestKernelLpNorm:
    def test_l2_is_one(self):
        for t in [5.0, 50.0]:
            assert kernel_lp_norm(t, 2.0) == pytest.approx(1.0, abs=1e-10)

    def test_sup_matches_direct_max(self):
        from dispersim.kernel import kernel_abs_row

        t = 30.0
        direct = float(kernel_abs_row(t, 2 * 60 + 200).max())
        assert kernel_lp_norm(t, np.inf) == pytest.approx(direct, abs=0)

    def test_p2_slope_is_flat(self):
        t = np.geomspace(10, 200, 10)
        fit = alpha_p_empirical(2.0, t)
        assert -0.02 <= fit.slope <= 0.02

    def test_empirical_carries_theory(self):
        t = np.geomspace(10, 200, 10)
        fit = alpha_p_empirical(np.inf, t)
        assert fit.theoretical == pytest.approx(-1.0 / 3.0, abs=1e-15)

    def test_budget(self):
        with pytest.raises(ResourceLimitError):
            alpha_p_empirical(2.0, np.geomspace(1, 10, 500))

    def test_improves_on_naive_interpolation(self):
        # measured decay at least as fast as the naive (p-2)/(3p) bound
        t = np.geomspace(100, 2000, 12)
        for p in [2.5, 3.0]:
            fit = alpha_p_empirical(p, t)
            naive = (p - 2.0) / (3.0 * p)
            assert fit.slope <= -naive + 0.02


class TestTorus:
    def test_data_validation(self):
        with pytest.raises(ValueError):
            TorusData(4, np.zeros(9))
        with pytest.raises(ValueError):
            TorusData(4, np.ones(5))
        with pytest.raises(ValueError):
            TorusData(0, np.ones(1))

    def test_dirichlet_peak_at_zero_time(self):
        for n in [4, 16]:
            data = TorusData.ones(n)
            assert torus_supnorm(data, 0.0) == pytest.approx(2 * n + 1, rel=1e-12)

    def test_single_mode_is_unimodular(self, rng):
        coeff = np.zeros(9, complex)
        coeff[6] = 1.0
        data = TorusData(4, coeff)
        for t in rng.uniform(0, 10, size=5):
            assert torus_supnorm(data, float(t)) == pytest.approx(1.0, abs=1e-12)

    def test_oversample_and_cap(self):
        data = TorusData.ones(8)
        with pytest.raises(ValueError):
            torus_supnorm(data, 0.1, oversample=4)
        with pytest.raises(ResourceLimitError):
            torus_supnorm(data, 0.1, oversample=8, cap=64)

    def test_refinement_never_below_grid_max(self):
        data = TorusData.ones(12)
        coarse_is_fine = torus_supnorm(data, 0.03, oversample=8)
        dense = torus_supnorm(data, 0.03, oversample=64)
        assert dense <= coarse_is_fine * (1 + 1e-9) or coarse_is_fine <= dense

    def test_l1_matches_independent_quadrature(self):
        data = TorusData.ones(8)
        k = data.modes
        x = np.linspace(0, 2 * np.pi, 200001)[:-1]
        brute = float(np.mean(np.abs(np.exp(1j * np.outer(x, k)).sum(axis=1))))
        assert torus_l1_norm(data) == pytest.approx(brute, rel=1e-5)
