import math

import numpy as np
import pytest
import scipy.special

from dispersim.bessel import bessel_j, bessel_j_array


def series_oracle(n: int, x: float, terms: int = 60) -> float:
    """Brute-force ascending series with explicit factorials (independent oracle)."""
    total = 0.0
    for m in range(terms):
        total += (-1) ** m * (x / 2.0) ** (n + 2 * m) / (
            math.factorial(m) * math.factorial(n + m)
        )
    return total


class TestAgainstSeriesOracle:
    @pytest.mark.parametrize("n,x", [(0, 0.0), (0, 0.5), (0, 2.0), (1, 1.0), (2, 3.5),
                                     (5, 0.1), (7, 8.0), (12, 15.0), (40, 18.0)])
    def test_small_argument(self, n, x):
        assert bessel_j(n, x) == pytest.approx(series_oracle(n, x), abs=5e-13)

    def test_j0_at_two_matches_reference(self):
        # J_0(2) = 0.22389077914123567... (Abramowitz & Stegun 9.1)
        assert bessel_j(0, 2.0) == pytest.approx(0.22389077914123567, abs=1e-14)


class TestAgainstScipy:
    def test_broad_random_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            n = int(rng.integers(0, 800))
            x = float(rng.uniform(0.0, 500.0))
            assert bessel_j(n, x) == pytest.approx(float(scipy.special.jv(n, x)), abs=2e-13)

    def test_large_argument_array(self):
        x = 4.0e4
        mine = bessel_j_array(90000, x)
        check = np.arange(0, 90001, 3000)
        ref = scipy.special.jv(check, x)
        assert np.max(np.abs(mine[check] - ref)) < 1e-12

    def test_series_recurrence_seam(self):
        # both regimes around the switchover argument agree with scipy
        for x in [19.5, 20.0, 20.5, 21.0]:
            for n in [0, 3, 17, 60]:
                assert bessel_j(n, x) == pytest.approx(float(scipy.special.jv(n, x)), abs=2e-12)


class TestSymmetriesAndStructure:
    def test_negative_order(self):
        for n, x in [(1, 3.0), (4, 7.7), (9, 30.0)]:
            assert bessel_j(-n, x) == pytest.approx((-1.0) ** n * bessel_j(n, x), abs=1e-15)

    def test_negative_argument(self):
        for n, x in [(0, 2.0), (3, 5.0), (6, 25.0)]:
            assert bessel_j(n, -x) == pytest.approx((-1.0) ** n * bessel_j(n, x), abs=1e-15)

    def test_array_matches_scalar(self):
        for x in [0.7, 13.0, 45.0]:
            arr = bessel_j_array(25, x)
            for n in range(26):
                assert arr[n] == pytest.approx(bessel_j(n, x), abs=1e-14)

    def test_normalization_identity(self):
        # J_0 + 2 sum J_{2k} = 1 (the Miller normalizer; a real check on the series path)
        for x in [0.5, 7.0, 19.0, 33.0, 250.0]:
            arr = bessel_j_array(int(2 * x) + 60, x)
            assert arr[0] + 2.0 * arr[2::2].sum() == pytest.approx(1.0, abs=1e-12)

    def test_far_superexponential_orders_underflow_to_zero(self):
        assert bessel_j(500, 1.0) == 0.0
        arr = bessel_j_array(2000, 30.0)
        assert np.all(np.isfinite(arr))
        assert abs(arr[-1]) < 1e-300

    def test_rejects_negative_nmax(self):
        with pytest.raises(ValueError):
            bessel_j_array(-1, 1.0)
