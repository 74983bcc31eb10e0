import numpy as np
import pytest

from dispersim import (
    CoupledLatticeSpec,
    LatticeState,
    build_coupled_operator,
    discrete_laplacian,
    lp_norm,
)

from conftest import aligned_values, random_lattice_state


class TestLatticeState:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            LatticeState(0, np.array([]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            LatticeState(0, np.array([1.0, np.nan]))
        with pytest.raises(ValueError):
            LatticeState(0, np.array([np.inf, 1.0]))

    def test_values_are_read_only(self):
        s = LatticeState(0, np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            s.values[0] = 3.0

    def test_get_outside_window_is_zero(self):
        s = LatticeState(2, np.array([1.0, 2.0]))
        assert s.get(1) == 0
        assert s.get(2) == 1.0
        assert s.get(4) == 0

    def test_restrict_pads(self):
        s = LatticeState(0, np.array([1.0, 2.0]))
        r = s.restrict(-1, 2)
        assert r.offset == -1
        assert np.allclose(r.values, [0, 1, 2, 0])


class TestDiscreteLaplacian:
    def test_constant_vanishes_interior(self):
        s = LatticeState(-3, np.full(7, 2.5 + 0.5j))
        out = discrete_laplacian(s)
        # interior of the original window
        inner = out.restrict(-2, 2).values
        assert np.max(np.abs(inner)) == 0

    def test_delta_gives_second_difference_stencil(self):
        out = discrete_laplacian(LatticeState.delta(0))
        assert out.offset == -1
        assert np.allclose(out.values, [1, -2, 1])

    def test_linear_ramp_vanishes_interior(self):
        j = np.arange(-4, 5)
        out = discrete_laplacian(LatticeState(-4, j.astype(complex)))
        inner = out.restrict(-3, 3).values
        assert np.max(np.abs(inner)) < 1e-14

    def test_support_grows_one_site_each_side(self):
        s = LatticeState(3, np.ones(5))
        out = discrete_laplacian(s)
        assert out.offset == 2 and out.last_site == 8

    def test_linearity(self, rng):
        for _ in range(25):
            u = random_lattice_state(rng)
            v = random_lattice_state(rng)
            a, b = rng.normal(size=2)
            lo = min(u.offset, v.offset) - 1
            hi = max(u.last_site, v.last_site) + 1
            combo = LatticeState(lo, a * u.restrict(lo, hi).values + b * v.restrict(lo, hi).values)
            lhs = discrete_laplacian(combo)
            lu, lv = discrete_laplacian(u), discrete_laplacian(v)
            rhs = a * lu.restrict(lo - 1, hi + 1).values + b * lv.restrict(lo - 1, hi + 1).values
            scale = max(np.max(np.abs(rhs)), 1.0)
            assert np.max(np.abs(lhs.values - rhs)) <= 1e-13 * scale

    def test_total_sum_telescopes_to_zero(self, rng):
        for _ in range(25):
            u = random_lattice_state(rng)
            total = np.sum(discrete_laplacian(u).values)
            assert abs(total) <= 1e-13 * np.sum(np.abs(u.values))


class TestLpNorm:
    def test_delta_all_p(self):
        d = LatticeState.delta(0)
        for p in [1, 1.5, 2, 7, np.inf]:
            assert lp_norm(d, p) == pytest.approx(1.0, abs=1e-15)

    def test_two_ones_l2(self):
        s = LatticeState(0, np.array([1.0, 1.0]))
        assert lp_norm(s, 2) == pytest.approx(np.sqrt(2), abs=1e-15)

    def test_sup_of_complex(self):
        s = LatticeState(0, np.array([3.0, -4.0j]))
        assert lp_norm(s, np.inf) == pytest.approx(4.0, abs=1e-15)

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            lp_norm(LatticeState.delta(0), 0.5)

    def test_norm_nesting(self, rng):
        ps = [1, 1.3, 2, 3, 5, 11, np.inf]
        for _ in range(20):
            u = random_lattice_state(rng)
            norms = [lp_norm(u, p) for p in ps]
            for a, b in zip(norms, norms[1:]):
                assert b <= a * (1 + 1e-12)
            assert norms[-1] <= norms[0] * (1 + 1e-12)

    def test_monotone_in_magnitude(self, rng):
        for _ in range(10):
            u = random_lattice_state(rng)
            bigger = LatticeState(u.offset, 2.0 * u.values)
            for p in [1, 2, np.inf]:
                assert lp_norm(bigger, p) >= lp_norm(u, p)


class TestCoupledOperator:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            CoupledLatticeSpec(0.0, 1.0, 5)
        with pytest.raises(ValueError):
            CoupledLatticeSpec(1.0, -2.0, 5)
        with pytest.raises(ValueError):
            CoupledLatticeSpec(1.0, 1.0, 1)

    def test_equal_speeds_junction_weight_is_half(self):
        op = build_coupled_operator(CoupledLatticeSpec(1.0, 1.0, 4))
        m = 4
        assert op.entry(m - 1, m) == pytest.approx(0.5, abs=0)

    def test_symmetry_entrywise(self):
        op = build_coupled_operator(CoupledLatticeSpec(1.3, 0.7, 5))
        dense = op.to_dense()
        assert np.array_equal(dense, dense.T)
        for i in range(op.dimension):
            for j in range(op.dimension):
                assert op.entry(i, j) == op.entry(j, i)

    def test_interior_and_junction_rows_sum_to_zero(self):
        # row sums cancel symbolically: interior b^-2 (1 - 2 + 1) = 0 and
        # junction b1^-2 - b1^-2 - kappa + kappa = 0; exact in floating point
        for b1, b2, m in [(1.0, 1.0, 4), (1.0, 2.0, 6), (0.6, 1.7, 5)]:
            op = build_coupled_operator(CoupledLatticeSpec(b1, b2, m))
            sums = op.row_sums()
            assert np.max(np.abs(sums[1:-1])) == 0.0
            # Dirichlet-cut end rows lose one neighbour
            assert sums[0] == pytest.approx(-(b1**-2), abs=0)
            assert sums[-1] == pytest.approx(-(b2**-2), abs=0)

    def test_junction_value_solves_both_coupling_lines(self, rng):
        # the reconstruction is the unique w with b1^-2(u(-1)-w) = b2^-2(w-v(1))
        for _ in range(10):
            b1, b2 = rng.uniform(0.3, 2.5, size=2)
            spec = CoupledLatticeSpec(b1, b2, 4)
            left, right = rng.normal(size=2) + 1j * rng.normal(size=2)
            w = spec.junction_value(left, right)
            assert b1**-2 * (left - w) == pytest.approx(b2**-2 * (w - right), abs=1e-14)

    def test_dimension_and_bandwidth(self):
        op = build_coupled_operator(CoupledLatticeSpec(1.0, 2.0, 7))
        assert op.dimension == 14
        assert op.entry(0, 2) == 0.0
