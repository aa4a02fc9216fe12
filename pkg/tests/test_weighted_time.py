import numpy as np
import pytest

from evoeddy.weighted_time import (
    TimeSignal,
    WeightedTimeGrid,
    d0,
    d0_inverse,
    truncate,
    weighted_inner,
    weighted_norm,
)


def random_signal(grid, dim, seed=0):
    rng = np.random.default_rng(seed)
    return TimeSignal(grid, rng.standard_normal((grid.num_nodes, dim)))


class TestGrid:
    def test_nodes(self):
        g = WeightedTimeGrid(horizon=2.0, steps=4, rho=1.0)
        assert g.dt == 0.5
        np.testing.assert_allclose(g.times, [0.0, 0.5, 1.0, 1.5, 2.0])

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            WeightedTimeGrid(horizon=-1.0, steps=4, rho=1.0)
        with pytest.raises(ValueError):
            WeightedTimeGrid(horizon=1.0, steps=0, rho=1.0)
        with pytest.raises(ValueError):
            WeightedTimeGrid(horizon=1.0, steps=4, rho=-2.0)

    def test_accretivity_constraint_enforced(self):
        # dt = 0.5 > 1/rho = 0.25
        with pytest.raises(ValueError, match="1/rho"):
            WeightedTimeGrid(horizon=2.0, steps=4, rho=4.0)

    def test_signal_validation(self):
        g = WeightedTimeGrid(1.0, 4, 1.0)
        with pytest.raises(ValueError, match="samples"):
            TimeSignal(g, np.zeros((3, 2)))
        bad = np.zeros((5, 2))
        bad[2, 1] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            TimeSignal(g, bad)


class TestWeightedInner:
    def test_unit_weight_quadrature_of_one(self):
        # rho ~ 0: the weight is ~1 and the sum is (N+1) * dt = 1 + dt
        g = WeightedTimeGrid(1.0, 1000, 1e-12)
        one = TimeSignal(g, np.ones(g.num_nodes))
        assert weighted_inner(one, one, 0) == pytest.approx(1.0, abs=2 * g.dt)

    def test_exponential_weight_halves_the_mass(self):
        # closed form: integral of exp(-2t) over [0, inf) equals 1/2; the
        # left-endpoint rule overshoots by at most dt/2 and the tail beyond
        # T = 20 is ~1e-18
        g = WeightedTimeGrid(20.0, 20000, 1.0)
        one = TimeSignal(g, np.ones(g.num_nodes))
        assert abs(weighted_inner(one, one, 0) - 0.5) <= 1e-8 + g.dt

    def test_zero_signal(self):
        g = WeightedTimeGrid(1.0, 16, 1.0)
        z = TimeSignal.zeros(g, 3)
        f = random_signal(g, 3)
        for k in (-2, -1, 0, 1):
            assert weighted_inner(z, f, k) == 0.0

    def test_symmetry_and_bilinearity(self):
        g = WeightedTimeGrid(1.0, 32, 1.0)
        f, h = random_signal(g, 2, 1), random_signal(g, 2, 2)
        assert weighted_inner(f, h) == pytest.approx(weighted_inner(h, f), rel=1e-14)
        lhs = weighted_inner(2.0 * f + h, h)
        rhs = 2.0 * weighted_inner(f, h) + weighted_inner(h, h)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_positivity(self):
        g = WeightedTimeGrid(1.0, 32, 1.0)
        f = random_signal(g, 3, 3)
        assert weighted_inner(f, f) > 0.0
        assert weighted_inner(TimeSignal.zeros(g, 3), TimeSignal.zeros(g, 3)) == 0.0

    def test_monotone_in_rho(self):
        values = np.random.default_rng(4).standard_normal((33, 2))
        norms = []
        for rho in (0.5, 1.0, 2.0, 4.0):
            g = WeightedTimeGrid(1.0, 32, rho)
            norms.append(weighted_inner(TimeSignal(g, values), TimeSignal(g, values)))
        assert all(a > b for a, b in zip(norms, norms[1:]))

    def test_unsupported_shift(self):
        g = WeightedTimeGrid(1.0, 8, 1.0)
        f = random_signal(g, 1)
        with pytest.raises(ValueError, match="unsupported shift"):
            weighted_inner(f, f, 2)

    def test_mismatch_errors(self):
        g1 = WeightedTimeGrid(1.0, 8, 1.0)
        g2 = WeightedTimeGrid(1.0, 16, 1.0)
        with pytest.raises(ValueError, match="different grids"):
            weighted_inner(random_signal(g1, 1), random_signal(g2, 1))
        with pytest.raises(ValueError, match="dimension mismatch"):
            weighted_inner(random_signal(g1, 1), random_signal(g1, 2))


class TestDifferenceCalculus:
    def test_d0_of_linear_ramp(self):
        g = WeightedTimeGrid(1.0, 10, 1.0)
        f = TimeSignal(g, g.times)
        out = d0(f).values[:, 0]
        assert out[0] == 0.0  # t_0 / dt with zero history
        np.testing.assert_allclose(out[1:], 1.0, atol=1e-13)

    def test_d0_zero(self):
        g = WeightedTimeGrid(1.0, 10, 1.0)
        assert np.all(d0(TimeSignal.zeros(g, 2)).values == 0.0)

    def test_d0_inverse_of_constant(self):
        g = WeightedTimeGrid(1.0, 10, 1.0)
        one = TimeSignal(g, np.ones(g.num_nodes))
        expected = g.dt * (np.arange(g.num_nodes) + 1)
        np.testing.assert_allclose(d0_inverse(one).values[:, 0], expected, rtol=1e-14)

    def test_exact_inverses(self):
        g = WeightedTimeGrid(3.0, 64, 1.0)
        f = random_signal(g, 4, 5)
        np.testing.assert_allclose(d0(d0_inverse(f)).values, f.values, atol=1e-12)
        np.testing.assert_allclose(d0_inverse(d0(f)).values, f.values, atol=1e-12)

    @pytest.mark.parametrize("op", [d0, d0_inverse])
    def test_causality_exact(self, op):
        g = WeightedTimeGrid(1.0, 32, 1.0)
        f = random_signal(g, 2, 6)
        n0 = 13
        vals = f.values.copy()
        vals[:n0] = 0.0
        out = op(TimeSignal(g, vals)).values
        assert np.all(out[:n0] == 0.0)

    def test_accretivity_of_d0(self):
        # <f, d0 f> >= 0 in the weighted product whenever dt <= 1/rho
        for seed in range(20):
            g = WeightedTimeGrid(1.0, 32, 2.0)
            f = random_signal(g, 3, seed)
            assert weighted_inner(f, d0(f), 0) >= -1e-13

    def test_norm_shifts_compose(self):
        g = WeightedTimeGrid(1.0, 32, 1.0)
        f = random_signal(g, 2, 7)
        assert weighted_inner(f, f, -2) == pytest.approx(
            weighted_inner(d0_inverse(f), d0_inverse(f), -1), rel=1e-13
        )
        assert weighted_norm(f, 1) == pytest.approx(
            np.sqrt(weighted_inner(d0(f), d0(f), 0)), rel=1e-13
        )


class TestTruncate:
    def test_full_horizon_is_identity(self):
        g = WeightedTimeGrid(1.0, 16, 1.0)
        f = random_signal(g, 2, 8)
        np.testing.assert_array_equal(truncate(f, g.horizon).values, f.values)

    def test_cut_at_zero_keeps_first_node(self):
        g = WeightedTimeGrid(1.0, 16, 1.0)
        f = random_signal(g, 2, 9)
        out = truncate(f, 0.0).values
        np.testing.assert_array_equal(out[0], f.values[0])
        assert np.all(out[1:] == 0.0)

    def test_idempotent(self):
        g = WeightedTimeGrid(1.0, 16, 1.0)
        f = random_signal(g, 2, 10)
        once = truncate(f, 0.4)
        np.testing.assert_array_equal(truncate(once, 0.4).values, once.values)
